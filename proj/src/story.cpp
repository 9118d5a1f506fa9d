#include "bubblestory/story.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

#include "bubblestory/error.hpp"
#include "bubblestory/serialization.hpp"

namespace bubblestory {
namespace {

constexpr std::string_view kEventNames[] = {
    "play",          "pause",          "seek",          "select_topic",
    "deselect_topic", "caption_add",   "caption_edit",  "caption_delete",
    "config_change", "trajectory_toggle", "record_start", "record_stop",
};

void sort_captions(std::vector<Caption>& captions) {
  std::stable_sort(captions.begin(), captions.end(),
                   [](const Caption& a, const Caption& b) { return a.start_pos < b.start_pos; });
}

void require_no_overlap(const std::vector<Caption>& captions, const Caption& c) {
  for (const auto& other : captions) {
    if (other.id != c.id && overlaps(other, c)) {
      throw Error(Errc::overlap_conflict,
                  "caption [" + std::to_string(c.start_pos) + ", " + std::to_string(c.end_pos) +
                      ") overlaps caption '" + other.id + "'");
    }
  }
}

std::string next_caption_id(const std::vector<Caption>& captions) {
  for (std::size_t n = captions.size() + 1;; ++n) {
    std::string id = "c" + std::to_string(n);
    if (std::none_of(captions.begin(), captions.end(),
                     [&](const Caption& c) { return c.id == id; })) {
      return id;
    }
  }
}

}  // namespace

std::string_view to_string(EventKind kind) noexcept {
  return kEventNames[static_cast<std::size_t>(kind)];
}

EventKind parse_event_kind(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kEventNames); ++i) {
    if (kEventNames[i] == text) return static_cast<EventKind>(i);
  }
  throw Error(Errc::bad_event, "unknown event kind '" + std::string(text) + "'");
}

bool Recording::open() const noexcept {
  return !events.empty() && events.front().kind == EventKind::record_start &&
         events.back().kind != EventKind::record_stop;
}

std::string utc_now() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t secs = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

std::size_t utf8_length(std::string_view text) noexcept {
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

void check_caption(const Caption& c) {
  const auto n = utf8_length(c.text);
  if (n > kMaxCaptionChars) {
    throw Error(Errc::too_long, "caption has " + std::to_string(n) + " characters; the limit is " +
                                    std::to_string(kMaxCaptionChars));
  }
  if (!std::isfinite(c.start_pos) || !std::isfinite(c.end_pos) || c.start_pos < 0.0 ||
      c.end_pos <= c.start_pos) {
    throw Error(Errc::bad_interval, "caption interval must satisfy 0 <= start_pos < end_pos");
  }
}

Story add_caption(Story story, Caption caption, std::string_view now) {
  check_caption(caption);
  if (caption.id.empty()) {
    caption.id = next_caption_id(story.captions);
  } else if (std::any_of(story.captions.begin(), story.captions.end(),
                         [&](const Caption& c) { return c.id == caption.id; })) {
    throw Error(Errc::schema_violation, "caption id '" + caption.id + "' already exists");
  }
  require_no_overlap(story.captions, caption);
  story.captions.push_back(std::move(caption));
  sort_captions(story.captions);
  story.modified_at = now;
  return story;
}

Story edit_caption(Story story, const Caption& caption, std::string_view now) {
  check_caption(caption);
  auto it = std::find_if(story.captions.begin(), story.captions.end(),
                         [&](const Caption& c) { return c.id == caption.id; });
  if (it == story.captions.end()) {
    throw Error(Errc::unknown_caption, "unknown caption '" + caption.id + "'");
  }
  require_no_overlap(story.captions, caption);
  *it = caption;
  sort_captions(story.captions);
  story.modified_at = now;
  return story;
}

Story delete_caption(Story story, std::string_view caption_id, std::string_view now) {
  auto it = std::find_if(story.captions.begin(), story.captions.end(),
                         [&](const Caption& c) { return c.id == caption_id; });
  if (it == story.captions.end()) {
    throw Error(Errc::unknown_caption, "unknown caption '" + std::string(caption_id) + "'");
  }
  story.captions.erase(it);
  story.modified_at = now;
  return story;
}

void check_event_payload(const ReplayEvent& e) {
  auto fail = [&](const std::string& why) {
    throw Error(Errc::bad_event, std::string(to_string(e.kind)) + " event: " + why);
  };
  if (e.t_ms < 0) fail("t_ms must be non-negative");
  if (!e.payload.is_object()) fail("payload must be an object");
  const Json& p = e.payload;
  switch (e.kind) {
    case EventKind::seek:
      if (!p.contains("position") || !p["position"].is_number() ||
          !std::isfinite(p["position"].get<double>())) {
        fail("payload.position must be a number");
      }
      break;
    case EventKind::select_topic:
    case EventKind::deselect_topic:
      if (!p.contains("topic") || !p["topic"].is_string()) fail("payload.topic must be a string");
      break;
    case EventKind::caption_add:
    case EventKind::caption_edit:
      if (!p.contains("caption")) fail("payload.caption is required");
      try {
        check_caption(caption_from_json(p["caption"]));
      } catch (const Error& err) {
        fail(std::string("payload.caption: ") + err.what());
      }
      break;
    case EventKind::caption_delete:
      if (!p.contains("id") || !p["id"].is_string()) fail("payload.id must be a string");
      break;
    case EventKind::config_change:
      if (p.contains("speed_factor") &&
          (!p["speed_factor"].is_number() || !(p["speed_factor"].get<double>() > 0))) {
        fail("payload.speed_factor must be a positive number");
      }
      break;
    case EventKind::trajectory_toggle:
      if (!p.contains("on") || !p["on"].is_boolean()) fail("payload.on must be a boolean");
      break;
    case EventKind::play:
    case EventKind::pause:
    case EventKind::record_start:
    case EventKind::record_stop:
      break;
  }
}

Story append_event(Story story, ReplayEvent event, std::string_view now) {
  if (event.payload.is_null()) event.payload = Json::object();
  check_event_payload(event);
  if (event.kind == EventKind::record_start) {
    if (story.recording && story.recording->open()) {
      throw Error(Errc::already_recording, "a recording is already open");
    }
    if (story.recording && !story.recording->events.empty()) {
      throw Error(Errc::not_recording, "the story already holds a finished recording");
    }
    story.recording = Recording{{std::move(event)}};
    story.modified_at = now;
    return story;
  }
  if (!story.recording || !story.recording->open()) {
    throw Error(Errc::not_recording, "no open recording; send record_start first");
  }
  auto& events = story.recording->events;
  if (event.t_ms < events.back().t_ms) {
    throw Error(Errc::time_regression, "t_ms " + std::to_string(event.t_ms) +
                                           " precedes the previous event at " +
                                           std::to_string(events.back().t_ms));
  }
  events.push_back(std::move(event));
  story.modified_at = now;
  return story;
}

void validate(const Story& story) {
  for (std::size_t i = 0; i < story.captions.size(); ++i) {
    check_caption(story.captions[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (story.captions[i].id == story.captions[j].id) {
        throw Error(Errc::schema_violation, "duplicate caption id '" + story.captions[i].id + "'");
      }
      if (overlaps(story.captions[i], story.captions[j])) {
        throw Error(Errc::overlap_conflict, "captions '" + story.captions[j].id + "' and '" +
                                                story.captions[i].id + "' overlap");
      }
    }
  }
  validate(story.config);
  if (!story.recording) return;
  const auto& events = story.recording->events;
  for (std::size_t i = 0; i < events.size(); ++i) {
    check_event_payload(events[i]);
    const bool first = i == 0;
    const bool last = i + 1 == events.size();
    if (first != (events[i].kind == EventKind::record_start)) {
      throw Error(Errc::malformed_recording, "record_start must be exactly the first event");
    }
    if (events[i].kind == EventKind::record_stop && !last) {
      throw Error(Errc::malformed_recording, "record_stop must be the last event");
    }
    if (!first && events[i].t_ms < events[i - 1].t_ms) {
      throw Error(Errc::malformed_recording, "event times must be non-decreasing");
    }
  }
}

void validate_against(const Story& story, const Dataset& dataset) {
  validate(story);
  if (story.dataset_id != dataset.id) {
    throw Error(Errc::schema_violation, "story belongs to dataset '" + story.dataset_id + "'");
  }
  for (const auto& t : story.selected) dataset.topic_index(t);
  const double extent = static_cast<double>(dataset.period_count());
  for (const auto& c : story.captions) {
    if (c.end_pos > extent) {
      throw Error(Errc::bad_interval, "caption '" + c.id + "' ends past the last period");
    }
  }
}

}  // namespace bubblestory
