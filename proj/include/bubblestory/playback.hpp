#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bubblestory/scheduling.hpp"
#include "bubblestory/story.hpp"

namespace bubblestory {

/// Maps schedule time (seconds from the first frame) to a fractional period
/// position and back. Each frame holds for its pause, then eases towards the
/// next frame over its transition.
class Timeline {
 public:
  explicit Timeline(const AnimationSchedule& schedule);

  double duration() const noexcept { return duration_; }
  double start_position() const noexcept { return positions_.front(); }
  double end_position() const noexcept { return positions_.back(); }

  double position_at(double clock_s) const;
  /// Earliest clock showing `position`. Positions past the end map to the
  /// end of the schedule.
  double clock_at(double position) const;

 private:
  struct Segment {
    double arrive = 0.0;
    double pause = 0.0;
    double transition = 0.0;
    double ease = 3.0;
  };
  std::vector<double> positions_;
  std::vector<Segment> segments_;
  double duration_ = 0.0;
};

struct PlaybackState {
  std::int64_t t_ms = 0;
  double position = 0.0;
  bool playing = false;
  double speed_factor = 1.0;
  std::vector<std::string> visible_captions;
  std::vector<std::string> selection;
  bool trajectories = false;

  bool operator==(const PlaybackState&) const = default;
};

using PlaybackTrace = std::vector<PlaybackState>;

/// Folds the story's recording over the schedule: one initial state plus one
/// state per event. Throws Errc::malformed_recording or
/// Errc::schedule_mismatch.
PlaybackTrace replay(const Story& story, const AnimationSchedule& schedule);

}  // namespace bubblestory
