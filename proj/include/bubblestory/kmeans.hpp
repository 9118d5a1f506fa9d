#pragma once

#include <Eigen/Core>

#include <cassert>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "bubblestory/error.hpp"

namespace bubblestory {

/// Points stored one per row.
template <typename Scalar>
using PointMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
struct ClusterModel {
  Eigen::Index k = 0;
  PointMatrix<Scalar> centroids;
  std::vector<Eigen::Index> assignments;
  /// Within-cluster sum of squared distances under `centroids`.
  Scalar distortion = 0;
  /// Distortion after every Lloyd iteration; non-increasing.
  std::vector<Scalar> history;
  int iterations = 0;
};

struct KMeansOptions {
  int max_iterations = 300;
  double tolerance = 1e-9;
};

namespace detail {

/// Uniform draw in [0,1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
inline double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Eigen::Index index_draw(std::mt19937_64& rng, Eigen::Index n) {
  return static_cast<Eigen::Index>(unit_draw(rng) * static_cast<double>(n));
}

template <typename Derived, typename CentroidDerived>
Eigen::Index nearest(const Eigen::MatrixBase<Derived>& point,
                     const Eigen::MatrixBase<CentroidDerived>& centroids,
                     typename Derived::Scalar* best_d2 = nullptr) {
  Eigen::Index best = 0;
  auto best_value = std::numeric_limits<typename Derived::Scalar>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const auto d2 = (point - centroids.row(c)).squaredNorm();
    if (d2 < best_value) {
      best_value = d2;
      best = c;
    }
  }
  if (best_d2) *best_d2 = best_value;
  return best;
}

template <typename Derived>
PointMatrix<typename Derived::Scalar> plus_plus_seeds(const Eigen::MatrixBase<Derived>& points,
                                                      Eigen::Index k, std::mt19937_64& rng) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.rows();
  PointMatrix<Scalar> centroids(k, points.cols());
  centroids.row(0) = points.row(index_draw(rng, n));

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d2(i) = (points.row(i) - centroids.row(0)).squaredNorm();
  }
  for (Eigen::Index c = 1; c < k; ++c) {
    const Scalar total = d2.sum();
    Eigen::Index pick = n - 1;
    if (total > Scalar(0)) {
      const Scalar target = static_cast<Scalar>(unit_draw(rng)) * total;
      Scalar acc = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (d2(i) <= Scalar(0)) continue;
        acc += d2(i);
        pick = i;
        if (acc > target) break;
      }
    } else {
      pick = index_draw(rng, n);
    }
    centroids.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2(i) = std::min(d2(i), (points.row(i) - centroids.row(c)).squaredNorm());
    }
  }
  return centroids;
}

template <typename Derived, typename Scalar>
Scalar distortion_of(const Eigen::MatrixBase<Derived>& points, const PointMatrix<Scalar>& centroids,
                     const std::vector<Eigen::Index>& assignments) {
  Scalar total = 0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    total += (points.row(i) - centroids.row(assignments[i])).squaredNorm();
  }
  return total;
}

}  // namespace detail

/// Lloyd's algorithm with k-means++ seeding. Deterministic for a fixed
/// (points, k, seed). Empty clusters take the point farthest from its own
/// centroid.
template <typename Derived>
ClusterModel<typename Derived::Scalar> kmeans(const Eigen::MatrixBase<Derived>& points,
                                              Eigen::Index k, std::uint64_t seed,
                                              const KMeansOptions& options = {}) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.rows();
  if (n == 0) throw Error(Errc::empty_input, "k-means needs at least one point");
  if (k < 1 || k > n) {
    throw Error(Errc::k_too_large, "k must lie in [1, " + std::to_string(n) + "], got " +
                                       std::to_string(k));
  }

  std::mt19937_64 rng(seed);
  ClusterModel<Scalar> model;
  model.k = k;
  model.centroids = detail::plus_plus_seeds(points, k, rng);
  model.assignments.assign(static_cast<std::size_t>(n), 0);

  std::vector<Eigen::Index> sizes(static_cast<std::size_t>(k));
  std::vector<Scalar> own_d2(static_cast<std::size_t>(n));
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::fill(sizes.begin(), sizes.end(), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto c = detail::nearest(points.row(i), model.centroids, &own_d2[i]);
      model.assignments[i] = c;
      ++sizes[c];
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (sizes[model.assignments[i]] > 1 && (far < 0 || own_d2[i] > own_d2[far])) far = i;
      }
      --sizes[model.assignments[far]];
      model.assignments[far] = c;
      own_d2[far] = 0;
      sizes[c] = 1;
    }

    PointMatrix<Scalar> next = PointMatrix<Scalar>::Zero(k, points.cols());
    for (Eigen::Index i = 0; i < n; ++i) next.row(model.assignments[i]) += points.row(i);
    for (Eigen::Index c = 0; c < k; ++c) next.row(c) /= static_cast<Scalar>(sizes[c]);

    const Scalar shift = (next - model.centroids).rowwise().norm().maxCoeff();
    model.centroids = std::move(next);
    model.iterations = iter + 1;

    const Scalar d = detail::distortion_of(points, model.centroids, model.assignments);
    assert(model.history.empty() ||
           d <= model.history.back() * (1 + Scalar(1e-12)) + Scalar(1e-12));
    model.history.push_back(d);
    if (shift < static_cast<Scalar>(options.tolerance)) break;
  }
  model.distortion = model.history.back();
  return model;
}

/// Best (lowest distortion) of `restarts` runs seeded seed, seed+1, ...
template <typename Derived>
ClusterModel<typename Derived::Scalar> kmeans_best_of(const Eigen::MatrixBase<Derived>& points,
                                                      Eigen::Index k, std::uint64_t seed,
                                                      int restarts,
                                                      const KMeansOptions& options = {}) {
  auto best = kmeans(points, k, seed, options);
  for (int r = 1; r < restarts; ++r) {
    auto candidate = kmeans(points, k, seed + static_cast<std::uint64_t>(r), options);
    if (candidate.distortion < best.distortion) best = std::move(candidate);
  }
  return best;
}

/// D(k) for k = 1..k_hi, each the best of `restarts` seeded runs.
template <typename Derived>
std::map<Eigen::Index, typename Derived::Scalar> distortion_curve(
    const Eigen::MatrixBase<Derived>& points, Eigen::Index k_hi, std::uint64_t seed,
    int restarts) {
  std::map<Eigen::Index, typename Derived::Scalar> curve;
  for (Eigen::Index k = 1; k <= k_hi; ++k) {
    curve[k] = kmeans_best_of(points, k, seed, restarts).distortion;
  }
  return curve;
}

/// Largest k the elbow search evaluates for n points. Normally n - 1; with
/// exactly three points it is 3 so that one interior candidate exists.
inline Eigen::Index elbow_upper_k(Eigen::Index n, Eigen::Index k_max) {
  return std::min(k_max, n > 3 ? n - 1 : n);
}

/// Interior k maximizing (D(k-1) - D(k)) - (D(k) - D(k+1)); ties go to the
/// smallest k.
template <typename Scalar>
Eigen::Index knee_of(const std::map<Eigen::Index, Scalar>& curve) {
  Eigen::Index best_k = 0;
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  for (auto it = std::next(curve.begin()); it != curve.end() && std::next(it) != curve.end();
       ++it) {
    const Scalar prev = std::prev(it)->second;
    const Scalar next = std::next(it)->second;
    const Scalar second_diff = (prev - it->second) - (it->second - next);
    if (second_diff > best) {
      best = second_diff;
      best_k = it->first;
    }
  }
  return best_k;
}

template <typename Derived>
Eigen::Index elbow_k(const Eigen::MatrixBase<Derived>& points, Eigen::Index k_max,
                     std::uint64_t seed, int restarts = 5) {
  if (points.rows() < 3) {
    throw Error(Errc::too_few_points, "elbow search needs at least three points");
  }
  if (k_max < 3) throw Error(Errc::k_too_large, "elbow search needs k_max >= 3");
  return knee_of(distortion_curve(points, elbow_upper_k(points.rows(), k_max), seed, restarts));
}

/// Per-column z-scores (population standard deviation). Constant columns
/// become zero.
template <typename Derived>
PointMatrix<typename Derived::Scalar> standardize(const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  PointMatrix<Scalar> z(points.rows(), points.cols());
  if (points.rows() == 0) return z;
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const auto col = points.col(j);
    const Scalar mean = col.mean();
    const Scalar var = (col.array() - mean).square().mean();
    if (var > Scalar(0)) {
      z.col(j) = (col.array() - mean) / std::sqrt(var);
    } else {
      z.col(j).setZero();
    }
  }
  return z;
}

}  // namespace bubblestory
