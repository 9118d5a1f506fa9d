#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bubblestory {

/// Stable machine-readable error codes shared by the library, the CLI and
/// the HTTP API. The string form (see code_name) never changes.
enum class Errc {
  malformed_header,
  bad_value,
  duplicate_topic,
  empty_body,
  unknown_topic,
  unknown_dataset,
  unknown_story,
  malformed_body,
  k_too_large,
  empty_input,
  too_few_points,
  unlabeled_dataset,
  missing_class,
  empty_vocabulary,
  overlap_conflict,
  too_long,
  bad_interval,
  unknown_caption,
  not_recording,
  already_recording,
  time_regression,
  bad_event,
  malformed_recording,
  schedule_mismatch,
  bad_version,
  schema_violation,
  bad_config,
  io_error,
};

std::string_view code_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// CSV parse failure. Row and column are 1-based; row 1 is the header.
class ParseError : public Error {
 public:
  ParseError(Errc code, std::size_t row, std::size_t column,
             const std::string& message);

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace bubblestory
