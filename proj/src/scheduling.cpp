#include "bubblestory/scheduling.hpp"

#include <algorithm>
#include <unordered_set>

#include "bubblestory/error.hpp"

namespace bubblestory {

std::string_view to_string(Side side) noexcept {
  switch (side) {
    case Side::leave: return "leave";
    case Side::remain: return "remain";
    case Side::neutral: return "neutral";
  }
  return "neutral";
}

void validate(const ScheduleConfig& cfg) {
  auto fail = [](const char* field, const char* rule) {
    throw Error(Errc::bad_config, std::string(field) + " must be " + rule);
  };
  if (!(cfg.base_transition_s > 0) || !std::isfinite(cfg.base_transition_s)) {
    fail("base_transition_s", "> 0");
  }
  if (cfg.min_highlighted < 1) fail("min_highlighted", ">= 1");
  if (!(cfg.seconds_per_object > 0) || !std::isfinite(cfg.seconds_per_object)) {
    fail("seconds_per_object", "> 0");
  }
  if (!(cfg.slow_gain >= 0) || !std::isfinite(cfg.slow_gain)) fail("slow_gain", ">= 0");
  if (!(cfg.ease_exponent >= 1) || !std::isfinite(cfg.ease_exponent)) {
    fail("ease_exponent", ">= 1");
  }
  if (!(cfg.neutral_band >= 0 && cfg.neutral_band < 0.5)) fail("neutral_band", "in [0, 0.5)");
  if (!(cfg.r_min > 0 && cfg.r_min < cfg.r_max) || !std::isfinite(cfg.r_max)) {
    fail("r_min/r_max", "0 < r_min < r_max");
  }
}

std::vector<std::string> highlights(std::span<const std::string> topics,
                                    std::span<const int> levels) {
  std::vector<std::string> out;
  if (levels.empty()) return out;
  const int top = *std::max_element(levels.begin(), levels.end());
  if (top == 0) return out;
  for (std::size_t i = 0; i < topics.size(); ++i) {
    if (levels[i] == top) out.push_back(topics[i]);
  }
  return out;
}

std::vector<std::string> resolve_selection(const Dataset& dataset,
                                           std::span<const std::string> requested) {
  std::vector<bool> chosen(dataset.topic_count(), requested.empty());
  for (const auto& name : requested) chosen[dataset.topic_index(name)] = true;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    if (chosen[i]) out.push_back(dataset.topics[i].topic);
  }
  return out;
}

AnimationSchedule compile_schedule(const Dataset& dataset, std::span<const std::string> selected,
                                   const ScheduleConfig& cfg) {
  validate(cfg);
  if (!dataset.labeled()) {
    throw Error(Errc::unlabeled_dataset,
                "dataset '" + dataset.id + "' is unlabeled; run leveling first");
  }

  AnimationSchedule schedule;
  schedule.dataset_id = dataset.id;
  schedule.selected = resolve_selection(dataset, selected);
  schedule.config = cfg;

  std::vector<const TopicSeries*> series;
  for (const auto& name : schedule.selected) {
    series.push_back(&dataset.topics[dataset.topic_index(name)]);
  }

  const PeriodRange range = main_timeline(dataset, schedule.selected);
  std::vector<int> levels(series.size());
  for (std::size_t t = range.first; t <= range.last; ++t) {
    FramePlan frame;
    frame.period_index = t;
    frame.period = dataset.axis.periods[t];
    frame.ease_exponent = cfg.ease_exponent;
    for (std::size_t i = 0; i < series.size(); ++i) {
      const auto& s = *series[i];
      const auto& p = s.points[t];
      levels[i] = *p.level;
      frame.bubbles.push_back({s.topic,
                               display_value(static_cast<double>(p.tweets), cfg.scale_mode),
                               display_value(static_cast<double>(p.retweets), cfg.scale_mode),
                               {polarity(s.trend, cfg.neutral_band),
                                radius(s.trend, cfg.r_min, cfg.r_max)}});
    }
    frame.max_level = *std::max_element(levels.begin(), levels.end());
    frame.highlighted = highlights(schedule.selected, levels);
    frame.pause_s = pause_duration(frame.highlighted.size(), cfg);
    schedule.frames.push_back(std::move(frame));
  }

  double pauses = 0.0;
  double transitions = 0.0;
  for (std::size_t f = 0; f < schedule.frames.size(); ++f) {
    auto& frame = schedule.frames[f];
    if (f + 1 < schedule.frames.size()) {
      frame.transition_out_s =
          transition_duration(frame.max_level, schedule.frames[f + 1].max_level, cfg);
      transitions += *frame.transition_out_s;
    }
    pauses += frame.pause_s;
  }
  schedule.total_s = pauses + transitions;
  return schedule;
}

}  // namespace bubblestory
