#include "bubblestory/playback.hpp"

#include <algorithm>

#include "bubblestory/error.hpp"
#include "bubblestory/serialization.hpp"

namespace bubblestory {

Timeline::Timeline(const AnimationSchedule& schedule) {
  if (schedule.frames.empty()) {
    throw Error(Errc::schedule_mismatch, "schedule has no frames");
  }
  double clock = 0.0;
  for (const auto& frame : schedule.frames) {
    positions_.push_back(static_cast<double>(frame.period_index));
    Segment seg{clock, frame.pause_s, frame.transition_out_s.value_or(0.0), frame.ease_exponent};
    clock += seg.pause + seg.transition;
    segments_.push_back(seg);
  }
  duration_ = clock;
}

double Timeline::position_at(double clock) const {
  if (clock <= 0.0) return positions_.front();
  for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
    const auto& s = segments_[i];
    const double moving = s.arrive + s.pause;
    if (clock <= moving) return positions_[i];
    if (clock < moving + s.transition) {
      const double u = (clock - moving) / s.transition;
      return positions_[i] + ease_poly_out(u, s.ease) * (positions_[i + 1] - positions_[i]);
    }
  }
  return positions_.back();
}

double Timeline::clock_at(double position) const {
  if (position <= positions_.front()) return 0.0;
  if (position > positions_.back()) return duration_;
  for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
    if (position == positions_[i]) return segments_[i].arrive;
    if (position < positions_[i + 1]) {
      const auto& s = segments_[i];
      const double frac = (position - positions_[i]) / (positions_[i + 1] - positions_[i]);
      return s.arrive + s.pause + ease_poly_out_inverse(frac, s.ease) * s.transition;
    }
  }
  return segments_.back().arrive;
}

namespace {

void refresh(PlaybackState& state, const Timeline& timeline, double clock,
             const std::vector<Caption>& captions) {
  state.position = timeline.position_at(clock);
  state.visible_captions.clear();
  for (const auto& c : captions) {
    if (c.start_pos <= state.position && state.position < c.end_pos) {
      state.visible_captions.push_back(c.id);
    }
  }
}

void apply_caption_event(std::vector<Caption>& captions, const ReplayEvent& e) {
  if (e.kind == EventKind::caption_delete) {
    const auto id = e.payload.at("id").get<std::string>();
    std::erase_if(captions, [&](const Caption& c) { return c.id == id; });
    return;
  }
  Caption c = caption_from_json(e.payload.at("caption"));
  auto it = std::find_if(captions.begin(), captions.end(),
                         [&](const Caption& x) { return x.id == c.id; });
  if (it != captions.end()) {
    *it = std::move(c);
  } else {
    captions.push_back(std::move(c));
  }
  std::stable_sort(captions.begin(), captions.end(),
                   [](const Caption& a, const Caption& b) { return a.start_pos < b.start_pos; });
}

}  // namespace

PlaybackTrace replay(const Story& story, const AnimationSchedule& schedule) {
  if (!story.recording) {
    throw Error(Errc::malformed_recording, "story '" + story.id + "' has no recording");
  }
  if (schedule.dataset_id != story.dataset_id || !(schedule.config == story.config)) {
    throw Error(Errc::schedule_mismatch,
                "schedule was not compiled from this story's dataset and config");
  }
  if (!story.selected.empty() && schedule.selected != story.selected) {
    throw Error(Errc::schedule_mismatch, "schedule selection differs from the story's");
  }
  try {
    validate(story);
  } catch (const Error& e) {
    throw Error(Errc::malformed_recording, e.what());
  }

  const Timeline timeline(schedule);
  const auto& events = story.recording->events;
  std::vector<Caption> captions = story.captions;

  PlaybackState state;
  state.selection = story.selected.empty() ? schedule.selected : story.selected;
  state.t_ms = events.empty() ? 0 : events.front().t_ms;
  double clock = 0.0;
  refresh(state, timeline, clock, captions);

  PlaybackTrace trace{state};
  for (const auto& e : events) {
    if (state.playing) {
      clock += static_cast<double>(e.t_ms - state.t_ms) / 1000.0 * state.speed_factor;
      if (clock >= timeline.duration()) {
        clock = timeline.duration();
        state.playing = false;
      }
    }
    state.t_ms = e.t_ms;
    switch (e.kind) {
      case EventKind::play:
        state.playing = clock < timeline.duration();
        break;
      case EventKind::pause:
        state.playing = false;
        break;
      case EventKind::seek:
        clock = timeline.clock_at(e.payload.at("position").get<double>());
        if (clock >= timeline.duration()) state.playing = false;
        break;
      case EventKind::select_topic: {
        auto topic = e.payload.at("topic").get<std::string>();
        if (std::find(state.selection.begin(), state.selection.end(), topic) ==
            state.selection.end()) {
          state.selection.push_back(std::move(topic));
        }
        break;
      }
      case EventKind::deselect_topic:
        std::erase(state.selection, e.payload.at("topic").get<std::string>());
        break;
      case EventKind::caption_add:
      case EventKind::caption_edit:
      case EventKind::caption_delete:
        apply_caption_event(captions, e);
        break;
      case EventKind::config_change:
        if (e.payload.contains("speed_factor")) {
          state.speed_factor = e.payload["speed_factor"].get<double>();
        }
        break;
      case EventKind::trajectory_toggle:
        state.trajectories = e.payload.at("on").get<bool>();
        break;
      case EventKind::record_start:
      case EventKind::record_stop:
        break;
    }
    refresh(state, timeline, clock, captions);
    trace.push_back(state);
  }
  return trace;
}

}  // namespace bubblestory
