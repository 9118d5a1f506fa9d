#include "bubblestory/error.hpp"

namespace bubblestory {

std::string_view code_name(Errc code) noexcept {
  switch (code) {
    case Errc::malformed_header: return "malformed_header";
    case Errc::bad_value: return "bad_value";
    case Errc::duplicate_topic: return "duplicate_topic";
    case Errc::empty_body: return "empty_body";
    case Errc::unknown_topic: return "unknown_topic";
    case Errc::unknown_dataset: return "unknown_dataset";
    case Errc::unknown_story: return "unknown_story";
    case Errc::malformed_body: return "malformed_body";
    case Errc::k_too_large: return "k_too_large";
    case Errc::empty_input: return "empty_input";
    case Errc::too_few_points: return "too_few_points";
    case Errc::unlabeled_dataset: return "unlabeled_dataset";
    case Errc::missing_class: return "missing_class";
    case Errc::empty_vocabulary: return "empty_vocabulary";
    case Errc::overlap_conflict: return "caption_overlap";
    case Errc::too_long: return "caption_too_long";
    case Errc::bad_interval: return "bad_interval";
    case Errc::unknown_caption: return "unknown_caption";
    case Errc::not_recording: return "not_recording";
    case Errc::already_recording: return "already_recording";
    case Errc::time_regression: return "time_regression";
    case Errc::bad_event: return "bad_event";
    case Errc::malformed_recording: return "malformed_recording";
    case Errc::schedule_mismatch: return "schedule_mismatch";
    case Errc::bad_version: return "bad_version";
    case Errc::schema_violation: return "schema_violation";
    case Errc::bad_config: return "bad_config";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

ParseError::ParseError(Errc code, std::size_t row, std::size_t column,
                       const std::string& message)
    : Error(code, "row " + std::to_string(row) + ", column " +
                      std::to_string(column) + ": " + message),
      row_(row),
      column_(column) {}

}  // namespace bubblestory
