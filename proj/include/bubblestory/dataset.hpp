#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bubblestory {

enum class Granularity { monthly, weekly };
enum class ScaleMode { linear, log10p };

std::string_view to_string(Granularity g) noexcept;
std::string_view to_string(ScaleMode m) noexcept;
ScaleMode parse_scale_mode(std::string_view text);

/// Ordered period identifiers: "YYYY-MM" (monthly) or "YYYY-Www" (weekly).
struct PeriodAxis {
  Granularity granularity = Granularity::monthly;
  std::vector<std::string> periods;

  std::size_t size() const noexcept { return periods.size(); }
  bool operator==(const PeriodAxis&) const = default;
};

struct PeriodPoint {
  std::int64_t tweets = 0;
  std::int64_t retweets = 0;
  std::optional<int> level;

  bool operator==(const PeriodPoint&) const = default;
};

struct TopicSeries {
  std::string topic;
  double trend = 0.5;
  std::vector<PeriodPoint> points;

  bool operator==(const TopicSeries&) const = default;
};

struct Dataset {
  std::string id;
  PeriodAxis axis;
  std::vector<TopicSeries> topics;
  ScaleMode scale_mode = ScaleMode::linear;

  std::size_t period_count() const noexcept { return axis.size(); }
  std::size_t topic_count() const noexcept { return topics.size(); }

  /// True iff every point carries a level.
  bool labeled() const noexcept;

  /// Case-insensitive lookup; returns the topic's index.
  std::optional<std::size_t> find_topic(std::string_view name) const;
  /// As find_topic, but throws Errc::unknown_topic.
  std::size_t topic_index(std::string_view name) const;
};

/// Axis and series equality; ignores id and scale mode, which the CSV
/// format does not carry.
bool structurally_equal(const Dataset& a, const Dataset& b);

/// Period identifier shape. Throws Errc::malformed_header on anything else.
Granularity classify_period(std::string_view id);

/// Throws bubblestory::Error when any dataset invariant is violated.
void validate(const Dataset& dataset);

Dataset parse_csv(std::string_view text, ScaleMode mode = ScaleMode::linear);
std::string write_csv(const Dataset& dataset);

inline double display_value(double v, ScaleMode mode) noexcept {
  return mode == ScaleMode::linear ? v : std::log10(1.0 + v);
}

/// First and last period index with tweets > 0.
std::optional<std::pair<std::size_t, std::size_t>> topic_lifespan(
    const Dataset& dataset, std::string_view topic);

/// Inclusive period-index range [first, last].
struct PeriodRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const noexcept { return last - first + 1; }
  bool operator==(const PeriodRange&) const = default;
};

/// Starts at the earliest first-active period among the selected topics and
/// runs to the end of the axis. Falls back to the full axis when no selected
/// topic is ever active.
PeriodRange main_timeline(const Dataset& dataset,
                          std::span<const std::string> selected);

}  // namespace bubblestory
