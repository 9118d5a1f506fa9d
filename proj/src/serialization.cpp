#include "bubblestory/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <initializer_list>

#include "bubblestory/error.hpp"

namespace bubblestory {
namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(Errc::schema_violation, what);
}

void require_object(const Json& j, std::string_view what) {
  if (!j.is_object()) schema_error(std::string(what) + " must be an object");
}

/// Rejects keys outside `allowed` and requires every key in `required`.
void require_keys(const Json& j, std::string_view what, std::initializer_list<std::string_view> allowed,
                  std::initializer_list<std::string_view> required) {
  require_object(j, what);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) schema_error(std::string(what) + ": unknown field '" + key + "'");
  }
  for (auto r : required) {
    if (!j.contains(r)) schema_error(std::string(what) + ": missing field '" + std::string(r) + "'");
  }
}

std::string get_string(const Json& j, std::string_view key, std::string_view what) {
  const auto& v = j.at(key);
  if (!v.is_string()) schema_error(std::string(what) + "." + std::string(key) + " must be a string");
  return v.get<std::string>();
}

double get_number(const Json& j, std::string_view key, std::string_view what) {
  const auto& v = j.at(key);
  if (!v.is_number()) schema_error(std::string(what) + "." + std::string(key) + " must be a number");
  return v.get<double>();
}

std::vector<std::string> get_strings(const Json& j, std::string_view key, std::string_view what) {
  const auto& v = j.at(key);
  if (!v.is_array()) schema_error(std::string(what) + "." + std::string(key) + " must be an array");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) schema_error(std::string(what) + "." + std::string(key) + " must hold strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

void check_version(const Json& j, std::string_view what) {
  require_object(j, what);
  if (!j.contains("version")) {
    throw Error(Errc::bad_version, std::string(what) + " has no version field");
  }
  const auto& v = j["version"];
  if (!v.is_number_integer() || v.get<std::int64_t>() != kDocumentVersion) {
    throw Error(Errc::bad_version, std::string(what) + " version " + v.dump() + " is not supported");
  }
}

}  // namespace

double round_significant(double value, int digits) {
  if (value == 0.0 || !std::isfinite(value)) return value;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return std::strtod(buf, nullptr);
}

std::string dump(const Json& doc) {
  return doc.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    schema_error(std::string("invalid JSON: ") + e.what());
  }
}

namespace {

double r9(double v) { return round_significant(v, 9); }

Json config_json(const ScheduleConfig& c, double (*real)(double)) {
  return Json{{"base_transition_s", real(c.base_transition_s)},
              {"pause_enabled", c.pause_enabled},
              {"min_highlighted", c.min_highlighted},
              {"seconds_per_object", real(c.seconds_per_object)},
              {"slow_gain", real(c.slow_gain)},
              {"ease_exponent", real(c.ease_exponent)},
              {"neutral_band", real(c.neutral_band)},
              {"r_min", real(c.r_min)},
              {"r_max", real(c.r_max)},
              {"scale_mode", to_string(c.scale_mode)}};
}

}  // namespace

Json to_json(const ScheduleConfig& c) {
  return config_json(c, [](double v) { return v; });
}

ScheduleConfig config_from_json(const Json& j, ScheduleConfig c) {
  if (j.is_null()) {
    validate(c);
    return c;
  }
  if (!j.is_object()) throw Error(Errc::bad_config, "config must be an object");
  auto number = [](const Json& v, const std::string& key) {
    if (!v.is_number()) throw Error(Errc::bad_config, key + " must be a number");
    return v.get<double>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "base_transition_s") {
      c.base_transition_s = number(v, key);
    } else if (key == "pause_enabled") {
      if (!v.is_boolean()) throw Error(Errc::bad_config, key + " must be a boolean");
      c.pause_enabled = v.get<bool>();
    } else if (key == "min_highlighted") {
      if (!v.is_number_integer()) throw Error(Errc::bad_config, key + " must be an integer");
      const auto n = v.get<std::int64_t>();
      if (n < 1 || n > 1'000'000) throw Error(Errc::bad_config, key + " must be >= 1");
      c.min_highlighted = static_cast<int>(n);
    } else if (key == "seconds_per_object") {
      c.seconds_per_object = number(v, key);
    } else if (key == "slow_gain") {
      c.slow_gain = number(v, key);
    } else if (key == "ease_exponent") {
      c.ease_exponent = number(v, key);
    } else if (key == "neutral_band") {
      c.neutral_band = number(v, key);
    } else if (key == "r_min") {
      c.r_min = number(v, key);
    } else if (key == "r_max") {
      c.r_max = number(v, key);
    } else if (key == "scale_mode") {
      if (!v.is_string()) throw Error(Errc::bad_config, key + " must be a string");
      c.scale_mode = parse_scale_mode(v.get<std::string>());
    } else {
      throw Error(Errc::bad_config, "unknown config field '" + key + "'");
    }
  }
  validate(c);
  return c;
}

Json dataset_summary(const Dataset& d) {
  Json topics = Json::array();
  for (const auto& s : d.topics) topics.push_back(Json{{"topic", s.topic}, {"trend", s.trend}});
  return Json{{"id", d.id},
              {"granularity", to_string(d.axis.granularity)},
              {"scale_mode", to_string(d.scale_mode)},
              {"topic_count", d.topic_count()},
              {"period_count", d.period_count()},
              {"labeled", d.labeled()},
              {"periods", d.axis.periods},
              {"topics", topics}};
}

Json to_json(const LevelingReport& r) {
  Json curve = Json::object();
  for (const auto& [k, d] : r.distortion_curve) curve[std::to_string(k)] = d;
  Json counts = Json::object();
  for (const auto& [lv, n] : r.level_counts) counts[std::to_string(lv)] = n;
  return Json{{"version", kDocumentVersion},
              {"threshold", r.threshold},
              {"total_dots", r.total_dots},
              {"candidate_dots", r.candidate_dots},
              {"chosen_k", r.chosen_k},
              {"distortion_curve", curve},
              {"level_counts", counts},
              {"seed", r.seed}};
}

Json to_json(const MovementLine& line) {
  return Json{{"topic", line.topic}, {"levels", line.levels}, {"tipping_points", tipping_points(line)}};
}

Json pulse_json(const Dataset& labeled, const std::vector<std::string>& topics) {
  const auto lines = movement_lines(labeled);
  Json series = Json::array();
  for (const auto& name : resolve_selection(labeled, topics)) {
    series.push_back(to_json(lines[labeled.topic_index(name)]));
  }
  return Json{{"dataset_id", labeled.id}, {"periods", labeled.axis.periods}, {"series", series}};
}

Json to_json(const AnimationSchedule& s) {
  Json frames = Json::array();
  for (const auto& f : s.frames) {
    Json positions = Json::object();
    Json styles = Json::object();
    for (const auto& b : f.bubbles) {
      positions[b.topic] = Json::array({r9(b.x), r9(b.y)});
      styles[b.topic] = Json{{"side", to_string(b.style.side)}, {"radius", r9(b.style.radius)}};
    }
    frames.push_back(Json{{"period", f.period},
                          {"period_index", f.period_index},
                          {"positions", positions},
                          {"styles", styles},
                          {"highlighted", f.highlighted},
                          {"pause_s", r9(f.pause_s)},
                          {"transition_out_s",
                           f.transition_out_s ? Json(r9(*f.transition_out_s)) : Json(nullptr)},
                          {"ease_exponent", r9(f.ease_exponent)}});
  }
  return Json{{"version", kDocumentVersion},
              {"dataset_id", s.dataset_id},
              {"selected", s.selected},
              {"config", config_json(s.config, r9)},
              {"frames", frames},
              {"total_s", r9(s.total_s)}};
}

Json to_json(const Caption& c) {
  return Json{{"id", c.id}, {"text", c.text}, {"start_pos", c.start_pos}, {"end_pos", c.end_pos}};
}

Caption caption_from_json(const Json& j) {
  require_keys(j, "caption", {"id", "text", "start_pos", "end_pos"},
               {"text", "start_pos", "end_pos"});
  Caption c;
  if (j.contains("id")) c.id = get_string(j, "id", "caption");
  c.text = get_string(j, "text", "caption");
  c.start_pos = get_number(j, "start_pos", "caption");
  c.end_pos = get_number(j, "end_pos", "caption");
  return c;
}

Json to_json(const ReplayEvent& e) {
  return Json{{"t_ms", e.t_ms}, {"kind", to_string(e.kind)}, {"payload", e.payload}};
}

ReplayEvent event_from_json(const Json& j) {
  require_keys(j, "event", {"t_ms", "kind", "payload"}, {"t_ms", "kind"});
  if (!j["t_ms"].is_number_integer()) schema_error("event.t_ms must be an integer");
  ReplayEvent e;
  e.t_ms = j["t_ms"].get<std::int64_t>();
  e.kind = parse_event_kind(get_string(j, "kind", "event"));
  if (j.contains("payload") && !j["payload"].is_null()) e.payload = j["payload"];
  return e;
}

Json to_json(const Recording& r) {
  Json events = Json::array();
  for (const auto& e : r.events) events.push_back(to_json(e));
  return Json{{"version", kDocumentVersion}, {"events", events}};
}

Recording recording_from_json(const Json& j) {
  check_version(j, "recording");
  require_keys(j, "recording", {"version", "events"}, {"events"});
  if (!j["events"].is_array()) schema_error("recording.events must be an array");
  Recording r;
  for (const auto& e : j["events"]) r.events.push_back(event_from_json(e));
  return r;
}

Json to_json(const Story& s) {
  Json captions = Json::array();
  for (const auto& c : s.captions) captions.push_back(to_json(c));
  return Json{{"version", kDocumentVersion},
              {"id", s.id},
              {"dataset_id", s.dataset_id},
              {"selected", s.selected},
              {"config", to_json(s.config)},
              {"captions", captions},
              {"recording", s.recording ? to_json(*s.recording) : Json(nullptr)},
              {"created_at", s.created_at},
              {"modified_at", s.modified_at}};
}

Story story_from_json(const Json& j) {
  check_version(j, "story");
  require_keys(j, "story",
               {"version", "id", "dataset_id", "selected", "config", "captions", "recording",
                "created_at", "modified_at"},
               {"id", "dataset_id", "selected", "config", "captions", "recording", "created_at",
                "modified_at"});
  Story s;
  s.id = get_string(j, "id", "story");
  s.dataset_id = get_string(j, "dataset_id", "story");
  s.selected = get_strings(j, "selected", "story");
  try {
    s.config = config_from_json(j["config"]);
  } catch (const Error& e) {
    schema_error(std::string("story.config: ") + e.what());
  }
  if (!j["captions"].is_array()) schema_error("story.captions must be an array");
  for (const auto& c : j["captions"]) {
    s.captions.push_back(caption_from_json(c));
    if (s.captions.back().id.empty()) schema_error("stored captions need an id");
  }
  if (!j["recording"].is_null()) s.recording = recording_from_json(j["recording"]);
  s.created_at = get_string(j, "created_at", "story");
  s.modified_at = get_string(j, "modified_at", "story");
  try {
    validate(s);
  } catch (const Error& e) {
    schema_error(e.what());
  }
  return s;
}

std::string save_story(const Story& story) {
  validate(story);
  return dump(to_json(story));
}

Story load_story(std::string_view text) { return story_from_json(parse_json(text)); }

Json to_json(const PlaybackState& s) {
  return Json{{"t_ms", s.t_ms},
              {"position", s.position},
              {"playing", s.playing},
              {"speed_factor", s.speed_factor},
              {"visible_captions", s.visible_captions},
              {"selection", s.selection},
              {"trajectories", s.trajectories}};
}

Json to_json(const PlaybackTrace& trace) {
  Json out = Json::array();
  for (const auto& s : trace) out.push_back(to_json(s));
  return out;
}

Json to_json(const TendencyModel& m) {
  std::vector<double> idf(m.tfidf.idf.data(), m.tfidf.idf.data() + m.tfidf.idf.size());
  std::vector<double> leave, remain;
  for (Eigen::Index c = 0; c < m.nb.feature_log_prob.cols(); ++c) {
    leave.push_back(m.nb.feature_log_prob(0, c));
    remain.push_back(m.nb.feature_log_prob(1, c));
  }
  return Json{{"version", kDocumentVersion},
              {"alpha", m.nb.alpha},
              {"vocabulary", m.tfidf.tokens},
              {"idf", idf},
              {"feature_log_prob", Json{{"leave", leave}, {"remain", remain}}}};
}

TendencyModel tendency_model_from_json(const Json& j) {
  check_version(j, "model");
  require_keys(j, "model", {"version", "alpha", "vocabulary", "idf", "feature_log_prob"},
               {"alpha", "vocabulary", "idf", "feature_log_prob"});
  TendencyModel m;
  m.nb.alpha = get_number(j, "alpha", "model");
  m.tfidf.tokens = get_strings(j, "vocabulary", "model");
  const auto idf = j["idf"].get<std::vector<double>>();
  const auto& flp = j["feature_log_prob"];
  require_keys(flp, "model.feature_log_prob", {"leave", "remain"}, {"leave", "remain"});
  const auto leave = flp["leave"].get<std::vector<double>>();
  const auto remain = flp["remain"].get<std::vector<double>>();
  const auto n = m.tfidf.tokens.size();
  if (idf.size() != n || leave.size() != n || remain.size() != n) {
    schema_error("model arrays disagree in length");
  }
  m.tfidf.idf = Eigen::Map<const Eigen::VectorXd>(idf.data(), static_cast<Eigen::Index>(n));
  m.nb.feature_log_prob.resize(2, static_cast<Eigen::Index>(n));
  for (std::size_t c = 0; c < n; ++c) {
    m.tfidf.vocabulary.emplace(m.tfidf.tokens[c], static_cast<Eigen::Index>(c));
    m.nb.feature_log_prob(0, static_cast<Eigen::Index>(c)) = leave[c];
    m.nb.feature_log_prob(1, static_cast<Eigen::Index>(c)) = remain[c];
  }
  return m;
}

Json export_bundle(const Story& story, const AnimationSchedule& schedule) {
  Json captions = Json::array();
  for (const auto& c : story.captions) captions.push_back(to_json(c));
  return Json{{"version", kDocumentVersion},
              {"story", to_json(story)},
              {"schedule", to_json(schedule)},
              {"captions", std::move(captions)},
              {"recording", story.recording ? to_json(*story.recording) : Json(nullptr)}};
}

}  // namespace bubblestory
