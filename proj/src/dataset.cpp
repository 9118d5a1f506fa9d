#include "bubblestory/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_set>

#include "bubblestory/error.hpp"
#include "text_util.hpp"

namespace bubblestory {
namespace {

constexpr std::string_view kTweetsPrefix = "x:";
constexpr std::string_view kRetweetsPrefix = "y:";
constexpr std::string_view kLevelPrefix = "lv:";

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::int64_t parse_count(std::string_view field, std::size_t row, std::size_t col) {
  std::int64_t value = 0;
  if (!all_digits(field)) {
    throw ParseError(Errc::bad_value, row, col,
                     "expected a non-negative integer count, got '" +
                         std::string(field) + "'");
  }
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(Errc::bad_value, row, col,
                     "count out of range: '" + std::string(field) + "'");
  }
  return value;
}

double parse_trend(std::string_view field, std::size_t row, std::size_t col) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() ||
      !std::isfinite(value)) {
    throw ParseError(Errc::bad_value, row, col,
                     "trend is not a number: '" + std::string(field) + "'");
  }
  if (value < 0.0 || value > 1.0) {
    throw ParseError(Errc::bad_value, row, col,
                     "trend outside [0,1]: '" + std::string(field) + "'");
  }
  return value;
}

int parse_level(std::string_view field, std::size_t row, std::size_t col) {
  if (field.size() != 1 || field[0] < '0' || field[0] > '3') {
    throw ParseError(Errc::bad_value, row, col,
                     "level must be 0-3, got '" + std::string(field) + "'");
  }
  return field[0] - '0';
}

bool valid_period_shape(std::string_view id, Granularity& g) {
  // YYYY-MM or YYYY-Www
  if (id.size() == 7 && all_digits(id.substr(0, 4)) && id[4] == '-' &&
      all_digits(id.substr(5, 2))) {
    int month = (id[5] - '0') * 10 + (id[6] - '0');
    g = Granularity::monthly;
    return month >= 1 && month <= 12;
  }
  if (id.size() == 8 && all_digits(id.substr(0, 4)) && id[4] == '-' &&
      id[5] == 'W' && all_digits(id.substr(6, 2))) {
    int week = (id[6] - '0') * 10 + (id[7] - '0');
    g = Granularity::weekly;
    return week >= 1 && week <= 53;
  }
  return false;
}

struct HeaderLayout {
  PeriodAxis axis;
  bool has_levels = false;
  std::size_t columns = 0;
};

HeaderLayout parse_header(std::string_view line) {
  auto fields = split_fields(line);
  if (fields.size() < 2 || fields[0] != "topic" || fields[1] != "trend") {
    throw ParseError(Errc::malformed_header, 1, 1,
                     "header must start with 'topic,trend'");
  }

  std::vector<std::string> groups[3];
  constexpr std::string_view prefixes[3] = {kTweetsPrefix, kRetweetsPrefix, kLevelPrefix};
  int group = 0;
  for (std::size_t i = 2; i < fields.size(); ++i) {
    std::string_view f = fields[i];
    while (group < 3 && !f.starts_with(prefixes[group])) {
      ++group;
    }
    if (group == 3) {
      throw ParseError(Errc::malformed_header, 1, i + 1,
                       "unexpected column '" + std::string(f) +
                           "'; expected x:, y: then optional lv: groups");
    }
    groups[group].emplace_back(f.substr(prefixes[group].size()));
  }

  HeaderLayout layout;
  layout.columns = fields.size();
  layout.axis.periods = groups[0];
  layout.has_levels = !groups[2].empty();
  if (groups[0].size() < 2) {
    throw ParseError(Errc::malformed_header, 1, 3,
                     "at least two periods are required");
  }
  if (groups[1] != groups[0]) {
    throw ParseError(Errc::malformed_header, 1, 3 + groups[0].size(),
                     "y: periods do not match x: periods");
  }
  if (layout.has_levels && groups[2] != groups[0]) {
    throw ParseError(Errc::malformed_header, 1, 3 + 2 * groups[0].size(),
                     "lv: periods do not match x: periods");
  }

  const auto& periods = layout.axis.periods;
  for (std::size_t t = 0; t < periods.size(); ++t) {
    Granularity g{};
    std::size_t col = 3 + t;
    if (!valid_period_shape(periods[t], g)) {
      throw ParseError(Errc::malformed_header, 1, col,
                       "bad period identifier '" + periods[t] + "'");
    }
    if (t == 0) {
      layout.axis.granularity = g;
    } else if (g != layout.axis.granularity) {
      throw ParseError(Errc::malformed_header, 1, col, "mixed period granularity");
    } else if (periods[t] <= periods[t - 1]) {
      throw ParseError(Errc::malformed_header, 1, col,
                       "periods must be strictly increasing");
    }
  }
  return layout;
}

void append_real(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

std::string_view to_string(Granularity g) noexcept {
  return g == Granularity::monthly ? "monthly" : "weekly";
}

std::string_view to_string(ScaleMode m) noexcept {
  return m == ScaleMode::linear ? "linear" : "log10p";
}

ScaleMode parse_scale_mode(std::string_view text) {
  if (text == "linear") return ScaleMode::linear;
  if (text == "log10p") return ScaleMode::log10p;
  throw Error(Errc::bad_config, "unknown scale mode '" + std::string(text) + "'");
}

Granularity classify_period(std::string_view id) {
  Granularity g{};
  if (!valid_period_shape(id, g)) {
    throw Error(Errc::malformed_header, "bad period identifier '" + std::string(id) + "'");
  }
  return g;
}

bool Dataset::labeled() const noexcept {
  if (topics.empty()) return false;
  return std::all_of(topics.begin(), topics.end(), [](const TopicSeries& s) {
    return std::all_of(s.points.begin(), s.points.end(),
                       [](const PeriodPoint& p) { return p.level.has_value(); });
  });
}

std::optional<std::size_t> Dataset::find_topic(std::string_view name) const {
  const std::string key = detail::ascii_lower(name);
  for (std::size_t i = 0; i < topics.size(); ++i) {
    if (detail::ascii_lower(topics[i].topic) == key) return i;
  }
  return std::nullopt;
}

std::size_t Dataset::topic_index(std::string_view name) const {
  if (auto i = find_topic(name)) return *i;
  throw Error(Errc::unknown_topic, "unknown topic '" + std::string(name) + "'");
}

bool structurally_equal(const Dataset& a, const Dataset& b) {
  return a.axis == b.axis && a.topics == b.topics;
}

void validate(const Dataset& d) {
  if (d.axis.size() < 2) throw Error(Errc::malformed_header, "axis needs at least two periods");
  for (std::size_t t = 0; t < d.axis.size(); ++t) {
    if (classify_period(d.axis.periods[t]) != d.axis.granularity) {
      throw Error(Errc::malformed_header, "period granularity mismatch");
    }
    if (t > 0 && d.axis.periods[t] <= d.axis.periods[t - 1]) {
      throw Error(Errc::malformed_header, "periods must be strictly increasing");
    }
  }
  if (d.topics.empty()) throw Error(Errc::empty_body, "dataset has no topics");

  std::unordered_set<std::string> seen;
  bool any_level = false;
  for (const auto& s : d.topics) {
    if (s.topic.empty() || s.topic.find_first_of(",\r\n") != std::string::npos) {
      throw Error(Errc::bad_value, "invalid topic name '" + s.topic + "'");
    }
    if (!seen.insert(detail::ascii_lower(s.topic)).second) {
      throw Error(Errc::duplicate_topic, "duplicate topic '" + s.topic + "'");
    }
    if (!(s.trend >= 0.0 && s.trend <= 1.0)) {
      throw Error(Errc::bad_value, "trend outside [0,1] for '" + s.topic + "'");
    }
    if (s.points.size() != d.axis.size()) {
      throw Error(Errc::bad_value, "series length mismatch for '" + s.topic + "'");
    }
    for (const auto& p : s.points) {
      if (p.tweets < 0 || p.retweets < 0) {
        throw Error(Errc::bad_value, "negative count for '" + s.topic + "'");
      }
      if (p.level) {
        any_level = true;
        if (*p.level < 0 || *p.level > 3) {
          throw Error(Errc::bad_value, "level outside 0-3 for '" + s.topic + "'");
        }
      }
    }
  }
  if (any_level && !d.labeled()) {
    throw Error(Errc::bad_value, "dataset is partially labeled");
  }
}

Dataset parse_csv(std::string_view text, ScaleMode mode) {
  auto lines = split_lines(text);
  if (lines.empty() || (lines.size() == 1 && lines[0].empty())) {
    throw ParseError(Errc::empty_body, 1, 1, "empty input");
  }
  HeaderLayout layout = parse_header(lines[0]);
  const std::size_t periods = layout.axis.size();

  Dataset d;
  d.axis = std::move(layout.axis);
  d.scale_mode = mode;

  std::unordered_set<std::string> seen;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t row = li + 1;
    if (lines[li].empty()) {
      if (li + 1 == lines.size()) break;
      throw ParseError(Errc::bad_value, row, 1, "blank line");
    }
    auto fields = split_fields(lines[li]);
    if (fields.size() != layout.columns) {
      throw ParseError(Errc::bad_value, row, std::min(fields.size(), layout.columns) + 1,
                       "expected " + std::to_string(layout.columns) + " columns, got " +
                           std::to_string(fields.size()));
    }
    TopicSeries s;
    s.topic = std::string(fields[0]);
    if (detail::trim(s.topic).empty()) {
      throw ParseError(Errc::bad_value, row, 1, "empty topic name");
    }
    if (!seen.insert(detail::ascii_lower(s.topic)).second) {
      throw ParseError(Errc::duplicate_topic, row, 1, "duplicate topic '" + s.topic + "'");
    }
    s.trend = parse_trend(fields[1], row, 2);
    s.points.resize(periods);
    for (std::size_t t = 0; t < periods; ++t) {
      s.points[t].tweets = parse_count(fields[2 + t], row, 3 + t);
      s.points[t].retweets = parse_count(fields[2 + periods + t], row, 3 + periods + t);
      if (layout.has_levels) {
        s.points[t].level = parse_level(fields[2 + 2 * periods + t], row, 3 + 2 * periods + t);
      }
    }
    d.topics.push_back(std::move(s));
  }
  if (d.topics.empty()) {
    throw ParseError(Errc::empty_body, 2, 1, "no data rows");
  }
  return d;
}

std::string write_csv(const Dataset& d) {
  const bool levels = d.labeled();
  std::string out = "topic,trend";
  for (const auto& p : d.axis.periods) out += ",x:" + p;
  for (const auto& p : d.axis.periods) out += ",y:" + p;
  if (levels) {
    for (const auto& p : d.axis.periods) out += ",lv:" + p;
  }
  out += '\n';
  for (const auto& s : d.topics) {
    out += s.topic;
    out += ',';
    append_real(out, s.trend);
    for (const auto& p : s.points) out += "," + std::to_string(p.tweets);
    for (const auto& p : s.points) out += "," + std::to_string(p.retweets);
    if (levels) {
      for (const auto& p : s.points) out += "," + std::to_string(*p.level);
    }
    out += '\n';
  }
  return out;
}

std::optional<std::pair<std::size_t, std::size_t>> topic_lifespan(
    const Dataset& dataset, std::string_view topic) {
  const auto& points = dataset.topics[dataset.topic_index(topic)].points;
  std::optional<std::pair<std::size_t, std::size_t>> span;
  for (std::size_t t = 0; t < points.size(); ++t) {
    if (points[t].tweets > 0) {
      if (!span) span.emplace(t, t);
      span->second = t;
    }
  }
  return span;
}

PeriodRange main_timeline(const Dataset& dataset, std::span<const std::string> selected) {
  if (selected.empty()) {
    throw Error(Errc::empty_input, "main timeline needs at least one topic");
  }
  const std::size_t last = dataset.period_count() - 1;
  std::optional<std::size_t> first;
  for (const auto& topic : selected) {
    if (auto life = topic_lifespan(dataset, topic)) {
      first = first ? std::min(*first, life->first) : life->first;
    }
  }
  return {first.value_or(0), last};
}

}  // namespace bubblestory
