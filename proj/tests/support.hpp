#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "bubblestory/dataset.hpp"

namespace testing {

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& stem) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (stem + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::vector<std::string> month_axis(int count, int year = 2016) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year + i / 12, i % 12 + 1);
    out.emplace_back(buf);
  }
  return out;
}

/// Random valid dataset. When `labeled`, levels are drawn uniformly from 0..3.
inline bubblestory::Dataset random_dataset(std::mt19937_64& rng, bool labeled,
                                           int max_topics = 6, int max_periods = 8) {
  std::uniform_int_distribution<int> n_topics(1, max_topics);
  std::uniform_int_distribution<int> n_periods(2, max_periods);
  std::uniform_int_distribution<std::int64_t> count(0, 500);
  std::uniform_int_distribution<int> level(0, 3);
  std::uniform_real_distribution<double> trend(0.0, 1.0);

  bubblestory::Dataset d;
  d.id = "rand";
  d.axis.periods = month_axis(n_periods(rng));
  const int topics = n_topics(rng);
  for (int t = 0; t < topics; ++t) {
    bubblestory::TopicSeries s;
    s.topic = "#t" + std::to_string(t);
    s.trend = trend(rng);
    for (std::size_t p = 0; p < d.axis.size(); ++p) {
      bubblestory::PeriodPoint pt{count(rng), count(rng), std::nullopt};
      if (labeled) pt.level = level(rng);
      s.points.push_back(pt);
    }
    d.topics.push_back(std::move(s));
  }
  return d;
}


using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Minimum within-cluster sum of squares over every partition of the rows
/// into exactly k non-empty groups, by enumerating all k^n labelings.
inline double exhaustive_optimum(const Points& pts, int k) {
  const int n = static_cast<int>(pts.rows());
  std::vector<int> label(n, 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    std::vector<int> size(k, 0);
    for (int l : label) ++size[l];
    if (std::all_of(size.begin(), size.end(), [](int s) { return s > 0; })) {
      Points mean = Points::Zero(k, pts.cols());
      for (int i = 0; i < n; ++i) mean.row(label[i]) += pts.row(i);
      for (int c = 0; c < k; ++c) mean.row(c) /= size[c];
      double d = 0;
      for (int i = 0; i < n; ++i) d += (pts.row(i) - mean.row(label[i])).squaredNorm();
      best = std::min(best, d);
    }
    int pos = 0;
    while (pos < n && ++label[pos] == k) label[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

/// `per_blob` points uniform in discs of `radius` around each center.
inline Points make_blobs(std::mt19937_64& rng, const std::vector<std::pair<double, double>>& centers,
                         int per_blob, double radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Points pts(static_cast<Eigen::Index>(centers.size()) * per_blob, 2);
  Eigen::Index row = 0;
  for (const auto& [cx, cy] : centers) {
    for (int i = 0; i < per_blob; ++i) {
      const double r = radius * std::sqrt(unit(rng));
      const double a = 2.0 * M_PI * unit(rng);
      pts(row, 0) = cx + r * std::cos(a);
      pts(row, 1) = cy + r * std::sin(a);
      ++row;
    }
  }
  return pts;
}

inline Points random_points(std::mt19937_64& rng, int n, double scale = 10.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Points pts(n, 2);
  for (int i = 0; i < n; ++i) {
    pts(i, 0) = u(rng);
    pts(i, 1) = u(rng);
  }
  return pts;
}

}  // namespace testing
