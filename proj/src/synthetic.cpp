#include "bubblestory/synthetic.hpp"

#include <array>
#include <cstdio>
#include <random>
#include <utility>

#include "bubblestory/kmeans.hpp"

namespace bubblestory {
namespace {

struct TopicSpec {
  const char* name;
  double trend;
};

constexpr std::array<TopicSpec, 36> kTopics = {{
    {"#brexit", 0.55},          {"#voteleave", 0.94},      {"#voteremain", 0.07},
    {"#euref", 0.48},           {"#takecontrol", 0.91},    {"#strongerin", 0.09},
    {"#leaveeu", 0.89},         {"#bremain", 0.12},        {"#marchtoleave", 0.86},
    {"#peoplesvotemarch", 0.1}, {"#standup4brexit", 0.84}, {"#remainernow", 0.15},
    {"#no2eu", 0.82},           {"#yeseu", 0.13},          {"#nodeal", 0.8},
    {"#abtv", 0.18},            {"#article50", 0.52},      {"#peoplesvote", 0.2},
    {"#theresamay", 0.5},       {"#borisjohnson", 0.62},   {"#stopbrexit", 0.06},
    {"#leavemeansleave", 0.9},  {"#finalsay", 0.16},       {"#fbpe", 0.04},
    {"#backstop", 0.46},        {"#brexitdeal", 0.57},     {"#ukip", 0.78},
    {"#farage", 0.74},          {"#corbyn", 0.35},         {"#labour", 0.3},
    {"#tories", 0.58},          {"#eu", 0.42},             {"#uk", 0.51},
    {"#indyref2", 0.22},        {"#revokearticle50", 0.08}, {"#wto", 0.72},
}};

constexpr int kPeriods = 41;
constexpr std::int64_t kMeanTweets = 98;

// Group sizes and (tweets, retweets) ranges; the three groups sit at the
// corners of a triangle in standardized space.
struct Group {
  int size;
  std::int64_t tweets_lo, tweets_hi;
  std::int64_t retweets_lo, retweets_hi;
};
constexpr Group kHigh{24, 900, 1100, 4000, 4800};
constexpr Group kMedium{70, 800, 1000, 200, 500};
constexpr Group kLow{188, 110, 250, 150, 500};

// 2016-06, the month of the vote.
constexpr int kPausePeriod = 5;
constexpr int kPauseTopics = 6;

std::int64_t draw_between(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(detail::unit_draw(rng) * static_cast<double>(hi - lo));
}

}  // namespace

Dataset brexit_shaped_sample(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Dataset d;
  d.id = "brexit-sample";
  d.axis.granularity = Granularity::monthly;
  for (int t = 0; t < kPeriods; ++t) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%04d-%02d", 2016 + t / 12, 1 + t % 12);
    d.axis.periods.emplace_back(buf);
  }
  for (const auto& spec : kTopics) {
    d.topics.push_back({spec.name, spec.trend, std::vector<PeriodPoint>(kPeriods)});
  }

  const int topics = static_cast<int>(kTopics.size());
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i < topics; ++i) {
    for (int t = 0; t < kPeriods; ++t) {
      const bool forced = t == kPausePeriod && i < kPauseTopics;
      if (!forced) cells.emplace_back(i, t);
    }
  }
  for (std::size_t i = cells.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(detail::index_draw(rng, static_cast<Eigen::Index>(i + 1)));
    std::swap(cells[i], cells[j]);
  }

  auto fill = [&](const Group& g, std::pair<int, int> cell) {
    auto& p = d.topics[cell.first].points[cell.second];
    p.tweets = draw_between(rng, g.tweets_lo, g.tweets_hi);
    p.retweets = draw_between(rng, g.retweets_lo, g.retweets_hi);
  };

  std::size_t next = 0;
  for (int i = 0; i < kPauseTopics; ++i) fill(kHigh, {i, kPausePeriod});
  for (int n = kPauseTopics; n < kHigh.size; ++n) fill(kHigh, cells[next++]);
  for (int n = 0; n < kMedium.size; ++n) fill(kMedium, cells[next++]);
  for (int n = 0; n < kLow.size; ++n) fill(kLow, cells[next++]);

  std::int64_t candidate_sum = 0;
  for (const auto& s : d.topics) {
    for (const auto& p : s.points) candidate_sum += p.tweets;
  }

  // Remaining cells share whatever tweet total makes the overall mean exactly
  // kMeanTweets. Squared uniform weights skew them towards quiet months.
  std::vector<std::pair<int, int>> quiet(cells.begin() + static_cast<std::ptrdiff_t>(next),
                                         cells.end());
  const std::int64_t budget =
      kMeanTweets * topics * kPeriods - candidate_sum;
  std::vector<double> weight(quiet.size());
  double weight_sum = 0;
  for (auto& w : weight) {
    const double u = detail::unit_draw(rng);
    w = u * u;
    weight_sum += w;
  }
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < quiet.size(); ++i) {
    auto& p = d.topics[quiet[i].first].points[quiet[i].second];
    p.tweets = static_cast<std::int64_t>(weight[i] / weight_sum * static_cast<double>(budget));
    assigned += p.tweets;
  }
  for (std::size_t i = 0; assigned < budget; i = (i + 1) % quiet.size()) {
    ++d.topics[quiet[i].first].points[quiet[i].second].tweets;
    ++assigned;
  }
  for (const auto& cell : quiet) {
    auto& p = d.topics[cell.first].points[cell.second];
    p.retweets = draw_between(rng, 0, 3 * p.tweets + 1);
  }
  return d;
}

}  // namespace bubblestory
