#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bubblestory/dataset.hpp"
#include "bubblestory/scheduling.hpp"

namespace bubblestory {

/// Insertion-ordered JSON document; every serialized artifact uses it so
/// that key order is fixed.
using Json = nlohmann::ordered_json;

inline constexpr std::size_t kMaxCaptionChars = 160;

/// Subtitle anchored to fractional period positions [start_pos, end_pos).
struct Caption {
  std::string id;
  std::string text;
  double start_pos = 0.0;
  double end_pos = 0.0;

  bool operator==(const Caption&) const = default;
};

enum class EventKind {
  play,
  pause,
  seek,
  select_topic,
  deselect_topic,
  caption_add,
  caption_edit,
  caption_delete,
  config_change,
  trajectory_toggle,
  record_start,
  record_stop,
};

std::string_view to_string(EventKind kind) noexcept;
EventKind parse_event_kind(std::string_view text);

struct ReplayEvent {
  std::int64_t t_ms = 0;
  EventKind kind = EventKind::play;
  Json payload = Json::object();

  bool operator==(const ReplayEvent&) const = default;
};

struct Recording {
  std::vector<ReplayEvent> events;

  /// record_start seen and record_stop not yet.
  bool open() const noexcept;
  bool operator==(const Recording&) const = default;
};

struct Story {
  std::string id;
  std::string dataset_id;
  std::vector<std::string> selected;
  ScheduleConfig config;
  std::vector<Caption> captions;
  std::optional<Recording> recording;
  std::string created_at;
  std::string modified_at;

  bool operator==(const Story&) const = default;
};

/// ISO-8601 UTC with millisecond precision.
std::string utc_now();

/// Number of Unicode code points in UTF-8 text.
std::size_t utf8_length(std::string_view text) noexcept;

/// Length and interval checks on a single caption.
void check_caption(const Caption& caption);

/// Half-open intervals; shared endpoints do not overlap.
inline bool overlaps(const Caption& a, const Caption& b) noexcept {
  return a.start_pos < b.end_pos && b.start_pos < a.end_pos;
}

/// Captions are kept sorted by start position. An empty id is replaced by
/// the next free "c<n>".
Story add_caption(Story story, Caption caption, std::string_view now);
Story edit_caption(Story story, const Caption& caption, std::string_view now);
Story delete_caption(Story story, std::string_view caption_id, std::string_view now);

/// Checks the kind-specific payload shape.
void check_event_payload(const ReplayEvent& event);

/// record_start opens a recording when the story has none; everything else
/// requires an open recording with non-decreasing t_ms.
Story append_event(Story story, ReplayEvent event, std::string_view now);

/// Structural validation of captions and recording.
void validate(const Story& story);

/// validate() plus selection membership in the dataset and caption
/// positions inside the dataset's period range.
void validate_against(const Story& story, const Dataset& dataset);

}  // namespace bubblestory
