#include <catch2/catch_amalgamated.hpp>

#include "bubblestory/kmeans.hpp"
#include "support.hpp"

using namespace bubblestory;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using testing::Points;

TEST_CASE("k=2 on two pairs finds the obvious partition", "[kmeans]") {
  Points pts(4, 2);
  pts << 0, 0, 0, 1, 10, 10, 10, 11;
  const auto m = kmeans(pts, 2, 42);
  CHECK(m.assignments[0] == m.assignments[1]);
  CHECK(m.assignments[2] == m.assignments[3]);
  CHECK(m.assignments[0] != m.assignments[2]);
  CHECK_THAT(m.distortion, WithinRel(testing::exhaustive_optimum(pts, 2), 1e-12));
  CHECK_THAT(m.distortion, WithinAbs(1.0, 1e-12));
}

TEST_CASE("k=1 puts the centroid at the mean", "[kmeans]") {
  std::mt19937_64 rng(3);
  const Points pts = testing::random_points(rng, 25);
  const auto m = kmeans(pts, 1, 9);
  const Eigen::RowVector2d mean = pts.colwise().mean();
  CHECK_THAT(m.centroids(0, 0), WithinAbs(mean(0), 1e-12));
  CHECK_THAT(m.centroids(0, 1), WithinAbs(mean(1), 1e-12));
  const double scatter = (pts.rowwise() - mean).squaredNorm();
  CHECK_THAT(m.distortion, WithinRel(scatter, 1e-12));
}

TEST_CASE("k=n has zero distortion", "[kmeans]") {
  std::mt19937_64 rng(5);
  const Points pts = testing::random_points(rng, 7);
  CHECK(kmeans(pts, 7, 1).distortion == 0.0);
}

TEST_CASE("k-means argument errors", "[kmeans]") {
  Points pts(3, 2);
  pts << 0, 0, 1, 1, 2, 2;
  try {
    kmeans(pts, 4, 1);
    FAIL("expected k_too_large");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::k_too_large);
  }
  CHECK_THROWS_AS(kmeans(pts, 0, 1), Error);
  try {
    kmeans(Points(0, 2), 1, 1);
    FAIL("expected empty_input");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_input);
  }
  try {
    elbow_k(Points(Points::Zero(2, 2)), 8, 1);
    FAIL("expected too_few_points");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::too_few_points);
  }
}

TEST_CASE("distortion never increases across iterations", "[kmeans][property]") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const Points pts = testing::random_points(rng, 40);
    const auto m = kmeans(pts, 1 + trial % 6, static_cast<std::uint64_t>(trial));
    REQUIRE(m.history.size() == static_cast<std::size_t>(m.iterations));
    for (std::size_t i = 1; i < m.history.size(); ++i) {
      REQUIRE(m.history[i] <= m.history[i - 1] * (1 + 1e-12));
    }
    for (Eigen::Index c = 0; c < m.k; ++c) {
      REQUIRE(std::count(m.assignments.begin(), m.assignments.end(), c) > 0);
    }
  }
}

TEST_CASE("fixed seed is deterministic", "[kmeans]") {
  std::mt19937_64 rng(23);
  const Points pts = testing::random_points(rng, 60);
  const auto a = kmeans(pts, 4, 99);
  const auto b = kmeans(pts, 4, 99);
  CHECK(a.assignments == b.assignments);
  CHECK(a.centroids == b.centroids);
  CHECK(a.history == b.history);
}

TEST_CASE("50 restarts reach the exhaustive optimum on small instances", "[kmeans][oracle]") {
  std::mt19937_64 rng(2016);
  std::uniform_int_distribution<int> size(3, 8);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = size(rng);
    const Points pts = testing::random_points(rng, n);
    const int k = 1 + trial % 3;
    const auto m = kmeans_best_of(pts, k, static_cast<std::uint64_t>(trial), 50);
    const double opt = testing::exhaustive_optimum(pts, k);
    INFO("trial " << trial << " n=" << n << " k=" << k);
    REQUIRE(std::abs(m.distortion - opt) <= 1e-6 * std::max(opt, 1e-12));
  }
}

TEST_CASE("knee_of picks the maximal second difference", "[kmeans]") {
  std::map<Eigen::Index, double> curve{{1, 100}, {2, 50}, {3, 10}, {4, 8}, {5, 7}};
  CHECK(knee_of(curve) == 3);
  std::map<Eigen::Index, double> tie{{1, 30}, {2, 20}, {3, 10}, {4, 0}};
  CHECK(knee_of(tie) == 2);
  CHECK(elbow_upper_k(3, 8) == 3);
  CHECK(elbow_upper_k(20, 8) == 8);
  CHECK(elbow_upper_k(6, 8) == 5);
}

TEST_CASE("elbow finds separated blobs", "[kmeans][elbow]") {
  const std::vector<std::pair<double, double>> three{{0, 0}, {40, 0}, {20, 35}};
  const std::vector<std::pair<double, double>> two{{0, 0}, {40, 0}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    REQUIRE(elbow_k(testing::make_blobs(rng, three, 30, 1.0), 8, seed) == 3);
    REQUIRE(elbow_k(testing::make_blobs(rng, two, 30, 1.0), 8, seed) == 2);
  }
}

TEST_CASE("standardize gives zero mean, unit population variance", "[kmeans]") {
  std::mt19937_64 rng(31);
  Points pts = testing::random_points(rng, 30);
  pts.col(1).setConstant(4.0);
  const auto z = standardize(pts);
  CHECK_THAT(z.col(0).mean(), WithinAbs(0.0, 1e-12));
  CHECK_THAT(z.col(0).squaredNorm() / 30.0, WithinAbs(1.0, 1e-12));
  CHECK(z.col(1).isZero());
}

TEST_CASE("single-precision points work", "[kmeans]") {
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> pts(4, 2);
  pts << 0, 0, 0, 1, 10, 10, 10, 11;
  const auto m = kmeans(pts, 2, 42);
  CHECK_THAT(static_cast<double>(m.distortion), WithinAbs(1.0, 1e-5));
}
