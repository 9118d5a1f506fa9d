#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bubblestory/dataset.hpp"
#include "bubblestory/leveling.hpp"
#include "bubblestory/playback.hpp"
#include "bubblestory/scheduling.hpp"
#include "bubblestory/story.hpp"
#include "bubblestory/tendency.hpp"

namespace bubblestory {

inline constexpr int kDocumentVersion = 1;

/// Rounds to `digits` significant decimal digits, so the shortest
/// round-trip rendering of the result has at most that many digits.
double round_significant(double value, int digits = 9);

/// Pretty-printed with a trailing newline. Byte-stable for equal documents.
std::string dump(const Json& doc);

/// Parses JSON text; syntax errors become Errc::schema_violation.
Json parse_json(std::string_view text);

Json to_json(const ScheduleConfig& cfg);
/// Overlays the keys present in `j` on `base`. Unknown keys and bad types
/// throw Errc::bad_config; the result is validated.
ScheduleConfig config_from_json(const Json& j, ScheduleConfig base = {});

Json dataset_summary(const Dataset& dataset);

Json to_json(const LevelingReport& report);
Json to_json(const MovementLine& line);
/// Levels plus tipping points per topic; the leveling and pulse payloads.
Json pulse_json(const Dataset& labeled, const std::vector<std::string>& topics);

Json to_json(const AnimationSchedule& schedule);

Json to_json(const Caption& caption);
Caption caption_from_json(const Json& j);

Json to_json(const ReplayEvent& event);
ReplayEvent event_from_json(const Json& j);

Json to_json(const Recording& recording);
Recording recording_from_json(const Json& j);

Json to_json(const Story& story);
/// Strict v1: unknown fields, missing fields and bad versions are errors.
/// The result passes validate(Story).
Story story_from_json(const Json& j);

std::string save_story(const Story& story);
Story load_story(std::string_view text);

Json to_json(const PlaybackState& state);
Json to_json(const PlaybackTrace& trace);

Json to_json(const TendencyModel& model);
TendencyModel tendency_model_from_json(const Json& j);

/// Self-contained replay bundle: story, compiled schedule, captions, recording.
Json export_bundle(const Story& story, const AnimationSchedule& schedule);

}  // namespace bubblestory
