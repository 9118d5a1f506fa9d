#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bubblestory/dataset.hpp"
#include "bubblestory/kmeans.hpp"

namespace bubblestory {

/// One (topic, period) observation.
struct Dot {
  std::size_t topic = 0;
  std::size_t period_index = 0;
  std::int64_t tweets = 0;
  std::int64_t retweets = 0;
};

/// Per-topic movement level over the whole axis ("hashtag pulse").
struct MovementLine {
  std::string topic;
  std::vector<int> levels;

  bool operator==(const MovementLine&) const = default;
};

struct LevelingReport {
  double threshold = 0.0;
  std::size_t total_dots = 0;
  std::size_t candidate_dots = 0;
  /// Knee of the distortion curve. Without an elbow search (fewer than three
  /// candidates) this is 1, or 0 when nothing passed the threshold.
  int chosen_k = 0;
  std::map<int, double> distortion_curve;
  std::map<int, std::size_t> level_counts;
  std::uint64_t seed = 0;
};

struct LevelingOptions {
  Eigen::Index k_max = 8;
  int restarts = 5;
};

struct LevelingResult {
  Dataset dataset;  // copy of the input with lv values filled in
  std::vector<MovementLine> lines;
  LevelingReport report;
};

std::vector<Dot> collect_dots(const Dataset& dataset);

/// Mean tweet count over every (topic, period) dot.
double compute_threshold(const Dataset& dataset);

/// Threshold filter, standardization, elbow-selected k-means and
/// cluster-to-level mapping. The top cluster is always level 3; dots at or
/// below the threshold are level 0.
LevelingResult assign_levels(const Dataset& dataset, std::uint64_t seed,
                             const LevelingOptions& options = {});

std::vector<MovementLine> movement_lines(const Dataset& labeled);

/// Indices t >= 1 where the level differs from t - 1.
std::vector<std::size_t> tipping_points(const MovementLine& line);

}  // namespace bubblestory
