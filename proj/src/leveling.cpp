#include "bubblestory/leveling.hpp"

#include <algorithm>
#include <numeric>

namespace bubblestory {

namespace {
// Levels 1..3 come from clusters; 0 is reserved for below-threshold dots.
constexpr Eigen::Index kMaxClusters = 3;
}  // namespace

std::vector<Dot> collect_dots(const Dataset& dataset) {
  std::vector<Dot> dots;
  dots.reserve(dataset.topic_count() * dataset.period_count());
  for (std::size_t i = 0; i < dataset.topics.size(); ++i) {
    const auto& points = dataset.topics[i].points;
    for (std::size_t t = 0; t < points.size(); ++t) {
      dots.push_back({i, t, points[t].tweets, points[t].retweets});
    }
  }
  return dots;
}

double compute_threshold(const Dataset& dataset) {
  long double sum = 0;
  std::size_t n = 0;
  for (const auto& s : dataset.topics) {
    for (const auto& p : s.points) {
      sum += static_cast<long double>(p.tweets);
      ++n;
    }
  }
  if (n == 0) throw Error(Errc::empty_input, "dataset has no dots");
  return static_cast<double>(sum / static_cast<long double>(n));
}

LevelingResult assign_levels(const Dataset& dataset, std::uint64_t seed,
                             const LevelingOptions& options) {
  validate(dataset);
  LevelingResult result{dataset, {}, {}};
  LevelingReport& report = result.report;
  report.seed = seed;
  report.threshold = compute_threshold(dataset);

  const auto dots = collect_dots(dataset);
  report.total_dots = dots.size();

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < dots.size(); ++i) {
    if (static_cast<double>(dots[i].tweets) > report.threshold) candidates.push_back(i);
  }
  report.candidate_dots = candidates.size();

  std::vector<int> level(dots.size(), 0);
  if (candidates.size() < 3) {
    for (auto i : candidates) level[i] = 3;
    report.chosen_k = candidates.empty() ? 0 : 1;
  } else {
    PointMatrix<double> raw(static_cast<Eigen::Index>(candidates.size()), 2);
    for (std::size_t r = 0; r < candidates.size(); ++r) {
      const auto& d = dots[candidates[r]];
      raw(static_cast<Eigen::Index>(r), 0) = static_cast<double>(d.tweets);
      raw(static_cast<Eigen::Index>(r), 1) = static_cast<double>(d.retweets);
    }
    const PointMatrix<double> z = standardize(raw);

    const auto curve =
        distortion_curve(z, elbow_upper_k(z.rows(), options.k_max), seed, options.restarts);
    for (const auto& [k, d] : curve) report.distortion_curve[static_cast<int>(k)] = d;
    const Eigen::Index knee = knee_of(curve);
    report.chosen_k = static_cast<int>(knee);

    const Eigen::Index k = std::min({knee, kMaxClusters, z.rows()});
    const auto model = kmeans_best_of(z, k, seed, options.restarts);

    // Rank clusters by centroid (z_tweets + z_retweets); highest gets level 3.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const Eigen::VectorXd weight = model.centroids.rowwise().sum();
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return weight(a) < weight(b); });
    std::vector<int> level_of_cluster(static_cast<std::size_t>(k));
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
      level_of_cluster[static_cast<std::size_t>(order[rank])] =
          static_cast<int>(kMaxClusters + 1 - k) + static_cast<int>(rank);
    }
    for (std::size_t r = 0; r < candidates.size(); ++r) {
      level[candidates[r]] = level_of_cluster[static_cast<std::size_t>(model.assignments[r])];
    }
  }

  for (int lv = 0; lv <= 3; ++lv) report.level_counts[lv] = 0;
  for (std::size_t i = 0; i < dots.size(); ++i) {
    result.dataset.topics[dots[i].topic].points[dots[i].period_index].level = level[i];
    ++report.level_counts[level[i]];
  }
  result.lines = movement_lines(result.dataset);
  return result;
}

std::vector<MovementLine> movement_lines(const Dataset& labeled) {
  if (!labeled.labeled()) throw Error(Errc::unlabeled_dataset, "dataset is not labeled");
  std::vector<MovementLine> lines;
  lines.reserve(labeled.topic_count());
  for (const auto& s : labeled.topics) {
    MovementLine line{s.topic, {}};
    line.levels.reserve(s.points.size());
    for (const auto& p : s.points) line.levels.push_back(*p.level);
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<std::size_t> tipping_points(const MovementLine& line) {
  std::vector<std::size_t> out;
  for (std::size_t t = 1; t < line.levels.size(); ++t) {
    if (line.levels[t] != line.levels[t - 1]) out.push_back(t);
  }
  return out;
}

}  // namespace bubblestory
