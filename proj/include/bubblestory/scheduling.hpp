#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bubblestory/dataset.hpp"
#include "bubblestory/leveling.hpp"

namespace bubblestory {

enum class Side { leave, remain, neutral };

std::string_view to_string(Side side) noexcept;

struct PolarityStyle {
  Side side = Side::neutral;
  double radius = 0.0;

  bool operator==(const PolarityStyle&) const = default;
};

struct ScheduleConfig {
  double base_transition_s = 1.0;
  bool pause_enabled = true;
  int min_highlighted = 4;
  double seconds_per_object = 1.0;
  double slow_gain = 0.5;
  double ease_exponent = 3.0;
  double neutral_band = 0.1;
  double r_min = 4.0;
  double r_max = 40.0;
  ScaleMode scale_mode = ScaleMode::linear;

  bool operator==(const ScheduleConfig&) const = default;
};

/// Throws Errc::bad_config naming the first offending field.
void validate(const ScheduleConfig& cfg);

struct BubbleFrame {
  std::string topic;
  double x = 0.0;
  double y = 0.0;
  PolarityStyle style;

  bool operator==(const BubbleFrame&) const = default;
};

struct FramePlan {
  std::size_t period_index = 0;
  std::string period;
  /// One entry per selected topic, in selection order.
  std::vector<BubbleFrame> bubbles;
  std::vector<std::string> highlighted;
  int max_level = 0;
  double pause_s = 0.0;
  /// Absent on the last frame.
  std::optional<double> transition_out_s;
  double ease_exponent = 3.0;

  bool operator==(const FramePlan&) const = default;
};

struct AnimationSchedule {
  std::string dataset_id;
  std::vector<std::string> selected;
  ScheduleConfig config;
  std::vector<FramePlan> frames;
  double total_s = 0.0;

  bool operator==(const AnimationSchedule&) const = default;
};

inline Side polarity(double trend, double band) noexcept {
  if (std::abs(trend - 0.5) <= band) return Side::neutral;
  return trend > 0.5 ? Side::leave : Side::remain;
}

inline double radius(double trend, double r_min, double r_max) noexcept {
  return r_min + (r_max - r_min) * std::min(1.0, 2.0 * std::abs(trend - 0.5));
}

/// Topics holding the maximal level among `levels`; empty when that maximum
/// is 0. `topics` and `levels` are parallel.
std::vector<std::string> highlights(std::span<const std::string> topics,
                                    std::span<const int> levels);

inline double pause_duration(std::size_t n_highlighted, const ScheduleConfig& cfg) noexcept {
  if (!cfg.pause_enabled || n_highlighted < static_cast<std::size_t>(cfg.min_highlighted)) {
    return 0.0;
  }
  return cfg.seconds_per_object * static_cast<double>(n_highlighted);
}

inline double transition_duration(int max_level_now, int max_level_next,
                                  const ScheduleConfig& cfg) noexcept {
  return cfg.base_transition_s * (1.0 + cfg.slow_gain * std::abs(max_level_next - max_level_now));
}

/// Polynomial ease-out 1 - (1 - u)^e.
inline double ease_poly_out(double u, double exponent) noexcept {
  return 1.0 - std::pow(1.0 - u, exponent);
}

/// Inverse of ease_poly_out on [0,1].
inline double ease_poly_out_inverse(double v, double exponent) noexcept {
  return 1.0 - std::pow(1.0 - v, 1.0 / exponent);
}

/// Canonical selection: dataset order, stored topic spelling, duplicates
/// dropped. An empty request selects every topic.
std::vector<std::string> resolve_selection(const Dataset& dataset,
                                           std::span<const std::string> requested);

AnimationSchedule compile_schedule(const Dataset& dataset,
                                   std::span<const std::string> selected,
                                   const ScheduleConfig& cfg);

}  // namespace bubblestory
