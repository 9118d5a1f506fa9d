#include "bubblestory/server.hpp"

#include <functional>

#include "bubblestory/leveling.hpp"
#include "bubblestory/playback.hpp"
#include "bubblestory/scheduling.hpp"
#include "bubblestory/serialization.hpp"
#include "bubblestory/tendency.hpp"

#include <httplib.h>

namespace bubblestory {

int http_status(Errc code) noexcept {
  switch (code) {
    case Errc::malformed_header:
    case Errc::bad_value:
    case Errc::duplicate_topic:
    case Errc::empty_body:
    case Errc::malformed_body:
    case Errc::schema_violation:
    case Errc::bad_version:
      return 400;
    case Errc::unknown_topic:
    case Errc::unknown_dataset:
    case Errc::unknown_story:
    case Errc::unknown_caption:
      return 404;
    case Errc::overlap_conflict:
    case Errc::not_recording:
    case Errc::already_recording:
    case Errc::time_regression:
      return 409;
    case Errc::io_error:
      return 500;
    default:
      return 422;
  }
}

namespace {

using httplib::Request;
using httplib::Response;
using Handler = std::function<void(const Request&, Response&)>;

constexpr const char* kJson = "application/json";

constexpr const char* kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>bubblestory</title></head>
<body><h1>bubblestory</h1>
<p>The authoring UI is not installed. Start the server with <code>--ui-dir</code>
pointing at the built UI assets. The JSON API lives under <code>/api</code>.</p>
</body></html>
)";

void send(Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(dump(body), kJson);
}

void send_error(Response& res, int status, std::string_view code, const std::string& message,
                const Json& detail = nullptr) {
  Json body{{"status", status}, {"code", code}, {"message", message}};
  if (!detail.is_null()) body["detail"] = detail;
  send(res, status, body);
}

Handler guarded(Handler h) {
  return [h = std::move(h)](const Request& req, Response& res) {
    try {
      h(req, res);
    } catch (const ParseError& e) {
      send_error(res, 400, "malformed_csv", e.what(),
                 Json{{"reason", code_name(e.code())}, {"row", e.row()}, {"column", e.column()}});
    } catch (const Error& e) {
      send_error(res, http_status(e.code()), code_name(e.code()), e.what());
    } catch (const Json::exception& e) {
      send_error(res, 400, "malformed_body", e.what());
    } catch (const std::exception&) {
      send_error(res, 500, "internal", "internal error");
    }
  };
}

Json body_json(const Request& req, bool allow_empty = true) {
  if (req.body.empty()) {
    if (allow_empty) return Json::object();
    throw Error(Errc::malformed_body, "request body is required");
  }
  try {
    Json j = Json::parse(req.body);
    return j;
  } catch (const Json::parse_error& e) {
    throw Error(Errc::malformed_body, std::string("invalid JSON body: ") + e.what());
  }
}

void require_fields(const Json& j, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw Error(Errc::malformed_body, "request body must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(Errc::malformed_body, "unexpected field '" + key + "'");
    }
  }
}

std::vector<std::string> string_list(const Json& j, const char* field) {
  if (!j.is_array()) throw Error(Errc::malformed_body, std::string(field) + " must be an array");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw Error(Errc::malformed_body, std::string(field) + " must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<std::string> split_topics(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size() && !csv.empty()) {
    auto end = csv.find(',', start);
    if (end == std::string::npos) end = csv.size();
    if (end > start) out.push_back(csv.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::vector<Caption> build_captions(const Json& list) {
  if (!list.is_array()) throw Error(Errc::malformed_body, "captions must be an array");
  Story scratch;
  for (const auto& c : list) scratch = add_caption(std::move(scratch), caption_from_json(c), "");
  return scratch.captions;
}

}  // namespace

struct Server::Impl {
  httplib::Server http;
};

Server::Server(ServerConfig config)
    : config_(std::move(config)), store_(config_.data_dir), impl_(std::make_unique<Impl>()) {
  auto& http = impl_->http;
  DataStore& store = store_;
  const std::uint64_t default_seed = config_.seed;

  auto schedule_for = [&store](const Story& story) {
    const Dataset d = store.get_dataset(story.dataset_id);
    return compile_schedule(d, story.selected, story.config);
  };

  // Datasets
  http.Post("/api/datasets", guarded([&store](const Request& req, Response& res) {
    ScaleMode mode = ScaleMode::linear;
    if (req.has_param("scale")) mode = parse_scale_mode(req.get_param_value("scale"));
    const std::string id = store.put_dataset(req.body, mode);
    send(res, 201, Json{{"id", id}});
  }));

  http.Get("/api/datasets", guarded([&store](const Request&, Response& res) {
    Json list = Json::array();
    for (const auto& id : store.dataset_ids()) {
      const Dataset d = store.get_dataset(id);
      list.push_back(Json{{"id", d.id},
                          {"topic_count", d.topic_count()},
                          {"period_count", d.period_count()},
                          {"granularity", to_string(d.axis.granularity)},
                          {"labeled", d.labeled()}});
    }
    send(res, 200, Json{{"datasets", list}});
  }));

  http.Get(R"(/api/datasets/([^/]+))", guarded([&store](const Request& req, Response& res) {
    send(res, 200, dataset_summary(store.get_dataset(req.matches[1].str())));
  }));

  http.Post(R"(/api/datasets/([^/]+)/levels)",
            guarded([&store, default_seed](const Request& req, Response& res) {
              const Json body = body_json(req);
              require_fields(body, {"seed"});
              std::uint64_t seed = default_seed;
              if (body.contains("seed")) {
                if (!body["seed"].is_number_unsigned()) {
                  throw Error(Errc::malformed_body, "seed must be a non-negative integer");
                }
                seed = body["seed"].get<std::uint64_t>();
              }
              const Dataset d = store.get_dataset(req.matches[1].str());
              const auto result = assign_levels(d, seed);
              store.put_levels(result.dataset);
              Json lines = Json::array();
              for (const auto& line : result.lines) lines.push_back(to_json(line));
              send(res, 200, Json{{"report", to_json(result.report)}, {"lines", lines}});
            }));

  http.Get(R"(/api/datasets/([^/]+)/pulse)", guarded([&store](const Request& req, Response& res) {
    const Dataset d = store.get_dataset(req.matches[1].str());
    const auto topics = split_topics(req.get_param_value("topics"));
    send(res, 200, pulse_json(d, topics));
  }));

  http.Post(R"(/api/datasets/([^/]+)/schedule)", guarded([&store](const Request& req, Response& res) {
    const Json body = body_json(req);
    require_fields(body, {"selected", "config"});
    const Dataset d = store.get_dataset(req.matches[1].str());
    std::vector<std::string> selected;
    if (body.contains("selected")) selected = string_list(body["selected"], "selected");
    const ScheduleConfig cfg =
        config_from_json(body.contains("config") ? body["config"] : Json(nullptr));
    send(res, 200, to_json(compile_schedule(d, selected, cfg)));
  }));

  // Tendency scoring
  http.Post("/api/tendency", guarded([](const Request& req, Response& res) {
    const Json body = body_json(req, false);
    require_fields(body, {"train", "tweets", "alpha"});
    if (!body.contains("train") || !body["train"].is_array()) {
      throw Error(Errc::malformed_body, "train must be an array of {text, label}");
    }
    std::vector<LabeledTweet> corpus;
    for (const auto& t : body["train"]) {
      corpus.push_back({t.at("text").get<std::string>(),
                        parse_label(t.at("label").get<std::string>())});
    }
    const auto tweets = body.contains("tweets") ? string_list(body["tweets"], "tweets")
                                                : std::vector<std::string>{};
    const double alpha = body.contains("alpha") ? body["alpha"].get<double>() : 1.0;
    const auto model = fit(corpus, alpha);
    Json scores = Json::array();
    for (const auto& s : hashtag_tendency(model, tweets)) {
      scores.push_back(Json{{"hashtag", s.hashtag}, {"score", s.score}, {"support", s.support}});
    }
    send(res, 200, Json{{"scores", scores}});
  }));

  // Stories
  http.Post("/api/stories", guarded([&store](const Request& req, Response& res) {
    const Json body = body_json(req, false);
    require_fields(body, {"dataset_id", "selected", "config", "captions"});
    if (!body.contains("dataset_id") || !body["dataset_id"].is_string()) {
      throw Error(Errc::malformed_body, "dataset_id is required");
    }
    Story story;
    story.dataset_id = body["dataset_id"].get<std::string>();
    const Dataset d = store.get_dataset(story.dataset_id);
    if (body.contains("selected")) {
      const auto requested = string_list(body["selected"], "selected");
      if (!requested.empty()) story.selected = resolve_selection(d, requested);
    }
    story.config = config_from_json(body.contains("config") ? body["config"] : Json(nullptr));
    if (body.contains("captions")) story.captions = build_captions(body["captions"]);
    send(res, 201, to_json(store.create_story(std::move(story))));
  }));

  http.Get("/api/stories", guarded([&store](const Request&, Response& res) {
    Json list = Json::array();
    for (const auto& id : store.story_ids()) {
      const Story s = store.get_story(id);
      list.push_back(Json{{"id", s.id},
                          {"dataset_id", s.dataset_id},
                          {"captions", s.captions.size()},
                          {"modified_at", s.modified_at}});
    }
    send(res, 200, Json{{"stories", list}});
  }));

  http.Get(R"(/api/stories/([^/]+))", guarded([&store](const Request& req, Response& res) {
    send(res, 200, to_json(store.get_story(req.matches[1].str())));
  }));

  http.Put(R"(/api/stories/([^/]+))", guarded([&store](const Request& req, Response& res) {
    const Json body = body_json(req, false);
    require_fields(body, {"selected", "config", "captions"});
    const auto updated = store.update_story(req.matches[1].str(), [&](Story s) {
      const Dataset d = store.get_dataset(s.dataset_id);
      if (body.contains("selected")) {
        const auto requested = string_list(body["selected"], "selected");
        s.selected = requested.empty() ? std::vector<std::string>{}
                                       : resolve_selection(d, requested);
      }
      if (body.contains("config")) s.config = config_from_json(body["config"]);
      if (body.contains("captions")) s.captions = build_captions(body["captions"]);
      s.modified_at = utc_now();
      return s;
    });
    send(res, 200, to_json(updated));
  }));

  http.Delete(R"(/api/stories/([^/]+))", guarded([&store](const Request& req, Response& res) {
    store.delete_story(req.matches[1].str());
    res.status = 204;
  }));

  http.Post(R"(/api/stories/([^/]+)/captions)", guarded([&store](const Request& req, Response& res) {
    const Caption caption = caption_from_json(body_json(req, false));
    const auto updated = store.update_story(req.matches[1].str(), [&](Story s) {
      return add_caption(std::move(s), caption, utc_now());
    });
    send(res, 201, to_json(updated));
  }));

  http.Put(R"(/api/stories/([^/]+)/captions/([^/]+))",
           guarded([&store](const Request& req, Response& res) {
             Caption caption = caption_from_json(body_json(req, false));
             caption.id = req.matches[2].str();
             const auto updated = store.update_story(req.matches[1].str(), [&](Story s) {
               return edit_caption(std::move(s), caption, utc_now());
             });
             send(res, 200, to_json(updated));
           }));

  http.Delete(R"(/api/stories/([^/]+)/captions/([^/]+))",
              guarded([&store](const Request& req, Response& res) {
                const std::string caption_id = req.matches[2].str();
                const auto updated = store.update_story(req.matches[1].str(), [&](Story s) {
                  return delete_caption(std::move(s), caption_id, utc_now());
                });
                send(res, 200, to_json(updated));
              }));

  http.Post(R"(/api/stories/([^/]+)/events)", guarded([&store](const Request& req, Response& res) {
    const Json body = body_json(req, false);
    std::vector<ReplayEvent> events;
    if (body.is_array()) {
      for (const auto& e : body) events.push_back(event_from_json(e));
    } else {
      events.push_back(event_from_json(body));
    }
    const auto updated = store.update_story(req.matches[1].str(), [&](Story s) {
      const std::string now = utc_now();
      for (auto& e : events) s = append_event(std::move(s), std::move(e), now);
      return s;
    });
    send(res, 200, Json{{"recorded", updated.recording->events.size()},
                        {"open", updated.recording->open()}});
  }));

  http.Get(R"(/api/stories/([^/]+)/replay)",
           guarded([&store, schedule_for](const Request& req, Response& res) {
             const Story story = store.get_story(req.matches[1].str());
             send(res, 200, Json{{"trace", to_json(replay(story, schedule_for(story)))}});
           }));

  http.Get(R"(/api/stories/([^/]+)/export)",
           guarded([&store, schedule_for](const Request& req, Response& res) {
             const Story story = store.get_story(req.matches[1].str());
             send(res, 200, export_bundle(story, schedule_for(story)));
           }));

  // UI
  if (!config_.ui_dir.empty()) {
    http.set_mount_point("/", config_.ui_dir.string());
  } else {
    http.Get("/", [](const Request&, Response& res) {
      res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
    });
  }

  http.set_error_handler([](const Request&, Response& res) {
    if (res.body.empty() && res.status == 404) {
      send_error(res, 404, "not_found", "no such endpoint");
    }
  });
}

Server::~Server() { stop(); }

int Server::bind() {
  auto& http = impl_->http;
  if (config_.port == 0) {
    config_.port = http.bind_to_any_port(config_.host);
    if (config_.port < 0) throw Error(Errc::io_error, "cannot bind " + config_.host);
  } else if (!http.bind_to_port(config_.host, config_.port)) {
    throw Error(Errc::io_error,
                "cannot bind " + config_.host + ":" + std::to_string(config_.port));
  }
  return config_.port;
}

void Server::run() { impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace bubblestory
