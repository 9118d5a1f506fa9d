#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "bubblestory/leveling.hpp"
#include "bubblestory/serialization.hpp"
#include "bubblestory/synthetic.hpp"
#include "live_server.hpp"

using namespace bubblestory;
using testing::post_json;
using testing::put_json;
using testing::reply_of;

namespace {

std::string sample_csv() { return write_csv(brexit_shaped_sample()); }

std::string upload(httplib::Client& c, const std::string& csv) {
  const auto r = reply_of(c.Post("/api/datasets", csv, "text/csv"));
  REQUIRE(r.status == 201);
  return r.json["id"].get<std::string>();
}

}  // namespace

TEST_CASE("http status mapping", "[server]") {
  CHECK(http_status(Errc::malformed_header) == 400);
  CHECK(http_status(Errc::unknown_dataset) == 404);
  CHECK(http_status(Errc::overlap_conflict) == 409);
  CHECK(http_status(Errc::unlabeled_dataset) == 422);
  CHECK(http_status(Errc::bad_config) == 422);
  CHECK(http_status(Errc::io_error) == 500);
  CHECK(code_name(Errc::overlap_conflict) == "caption_overlap");
}

TEST_CASE("dataset endpoints", "[server]") {
  testing::LiveServer live;
  auto& c = live.client();
  const auto id = upload(c, sample_csv());
  CHECK(upload(c, sample_csv()) == id);

  auto r = reply_of(c.Get("/api/datasets/" + id));
  REQUIRE(r.status == 200);
  CHECK(r.json["topic_count"] == 36);
  CHECK(r.json["period_count"] == 41);
  CHECK(r.json["labeled"] == false);

  r = reply_of(c.Get("/api/datasets"));
  REQUIRE(r.json["datasets"].size() == 1);

  SECTION("bad uploads") {
    r = reply_of(c.Post("/api/datasets",
                        "topic,trend,x:2016-01,x:2016-02,y:2016-01,y:2016-02\n#a,1.5,1,2,3,4\n",
                        "text/csv"));
    CHECK(r.status == 400);
    CHECK(r.json["code"] == "malformed_csv");
    CHECK(r.json["detail"]["reason"] == "bad_value");
    CHECK(r.json["detail"]["row"] == 2);
    CHECK(r.json["detail"]["column"] == 2);
    r = reply_of(c.Post("/api/datasets", "", "text/csv"));
    CHECK(r.status == 400);
  }
  SECTION("unknown ids") {
    r = reply_of(c.Get("/api/datasets/ds-missing"));
    CHECK(r.status == 404);
    CHECK(r.json["code"] == "unknown_dataset");
    r = reply_of(c.Get("/api/datasets/..%2Fetc"));
    CHECK(r.status >= 400);
  }
  SECTION("unlabeled schedule and pulse") {
    r = post_json(c, "/api/datasets/" + id + "/schedule", Json::object());
    CHECK(r.status == 422);
    CHECK(r.json["code"] == "unlabeled_dataset");
    r = reply_of(c.Get("/api/datasets/" + id + "/pulse"));
    CHECK(r.status == 422);
  }
  SECTION("levels, pulse and schedule") {
    const auto first = post_json(c, "/api/datasets/" + id + "/levels", Json{{"seed", 42}});
    const auto second = post_json(c, "/api/datasets/" + id + "/levels", Json{{"seed", 42}});
    REQUIRE(first.status == 200);
    CHECK(first.body == second.body);
    CHECK(first.json["report"]["chosen_k"] == 3);
    CHECK(first.json["report"]["candidate_dots"] == 282);
    CHECK(first.json["lines"].size() == 36);

    r = reply_of(c.Get("/api/datasets/" + id + "/pulse?topics=%23Brexit,%23voteleave"));
    REQUIRE(r.status == 200);
    REQUIRE(r.json["series"].size() == 2);
    CHECK(r.json["series"][0]["topic"] == "#brexit");
    CHECK(r.json["series"][0]["levels"].size() == 41);
    r = reply_of(c.Get("/api/datasets/" + id + "/pulse?topics=%23nope"));
    CHECK(r.status == 404);
    CHECK(r.json["code"] == "unknown_topic");

    const Json req{{"selected", Json::array({"#brexit", "#voteleave"})},
                   {"config", {{"min_highlighted", 2}}}};
    r = post_json(c, "/api/datasets/" + id + "/schedule", req);
    REQUIRE(r.status == 200);
    CHECK(r.json["selected"].size() == 2);
    CHECK(r.json["config"]["min_highlighted"] == 2);
    CHECK(post_json(c, "/api/datasets/" + id + "/schedule", req).body == r.body);

    const auto labeled = assign_levels(brexit_shaped_sample(), 42).dataset;
    auto local = labeled;
    local.id = id;
    ScheduleConfig cfg;
    cfg.min_highlighted = 2;
    const std::vector<std::string> sel{"#brexit", "#voteleave"};
    CHECK(r.body == dump(to_json(compile_schedule(local, sel, cfg))));

    r = post_json(c, "/api/datasets/" + id + "/schedule", Json{{"config", {{"r_min", -1}}}});
    CHECK(r.status == 422);
    CHECK(r.json["code"] == "bad_config");
    r = post_json(c, "/api/datasets/" + id + "/schedule", Json{{"config", {{"bogus", 1}}}});
    CHECK(r.status == 422);
    r = post_json(c, "/api/datasets/" + id + "/schedule", Json{{"selected", Json::array({"#nope"})}});
    CHECK(r.status == 404);
    r = reply_of(c.Post("/api/datasets/" + id + "/schedule", "{not json", "application/json"));
    CHECK(r.status == 400);
    CHECK(r.json["code"] == "malformed_body");
    r = post_json(c, "/api/datasets/" + id + "/levels", Json{{"seed", -3}});
    CHECK(r.status == 400);
  }
}

TEST_CASE("story lifecycle", "[server]") {
  testing::LiveServer live;
  auto& c = live.client();
  const auto id = upload(c, sample_csv());
  REQUIRE(post_json(c, "/api/datasets/" + id + "/levels", Json{{"seed", 42}}).status == 200);

  auto r = post_json(c, "/api/stories",
                     Json{{"dataset_id", id}, {"selected", Json::array({"#brexit", "#euref"})}});
  REQUIRE(r.status == 201);
  const auto sid = r.json["id"].get<std::string>();
  const auto base = "/api/stories/" + sid;
  CHECK(r.json["recording"].is_null());

  r = reply_of(c.Get("/api/stories"));
  CHECK(r.json["stories"].size() == 1);

  r = post_json(c, base + "/captions", Json{{"text", "Referendum"}, {"start_pos", 5.0}, {"end_pos", 6.0}});
  CHECK(r.status == 201);
  CHECK(r.json["captions"][0]["id"] == "c1");
  r = post_json(c, base + "/captions", Json{{"text", "Clash"}, {"start_pos", 5.5}, {"end_pos", 7.0}});
  CHECK(r.status == 409);
  CHECK(r.json["code"] == "caption_overlap");
  r = post_json(c, base + "/captions", Json{{"text", std::string(161, 'x')}, {"start_pos", 8.0}, {"end_pos", 9.0}});
  CHECK(r.status == 422);
  CHECK(r.json["code"] == "caption_too_long");
  r = post_json(c, base + "/captions", Json{{"text", "late"}, {"start_pos", 40.5}, {"end_pos", 45.0}});
  CHECK(r.status == 422);
  r = post_json(c, base + "/captions", Json{{"text", "Result"}, {"start_pos", 6.0}, {"end_pos", 7.5}});
  CHECK(r.status == 201);
  r = put_json(c, base + "/captions/c2", Json{{"text", "Result day"}, {"start_pos", 6.0}, {"end_pos", 7.0}});
  CHECK(r.status == 200);
  r = put_json(c, base + "/captions/zz", Json{{"text", "x"}, {"start_pos", 20.0}, {"end_pos", 21.0}});
  CHECK(r.status == 404);
  CHECK(r.json["code"] == "unknown_caption");

  r = put_json(c, base, Json{{"selected", Json::array({"#brexit", "#euref", "#voteleave"})}});
  CHECK(r.status == 200);
  CHECK(r.json["selected"].size() == 3);
  r = put_json(c, base, Json{{"selected", Json::array({"#nope"})}});
  CHECK(r.status == 404);
  r = put_json(c, base, Json{{"owner", "x"}});
  CHECK(r.status == 400);

  SECTION("export without recording") {
    r = reply_of(c.Get(base + "/export"));
    REQUIRE(r.status == 200);
    CHECK(r.json["recording"].is_null());
    CHECK(r.json["captions"].size() == 2);
    const auto sched = post_json(c, "/api/datasets/" + id + "/schedule",
                                 Json{{"selected", r.json["story"]["selected"]},
                                      {"config", r.json["story"]["config"]}});
    CHECK(r.json["schedule"] == sched.json);
    r = reply_of(c.Get(base + "/replay"));
    CHECK(r.status == 422);
    CHECK(r.json["code"] == "malformed_recording");
  }
  SECTION("record, replay, export") {
    r = post_json(c, base + "/events", Json{{"t_ms", 0}, {"kind", "play"}});
    CHECK(r.status == 409);
    CHECK(r.json["code"] == "not_recording");
    r = post_json(c, base + "/events",
                  Json::array({{{"t_ms", 0}, {"kind", "record_start"}},
                               {{"t_ms", 10}, {"kind", "play"}}}));
    REQUIRE(r.status == 200);
    CHECK(r.json["recorded"] == 2);
    CHECK(r.json["open"] == true);
    r = post_json(c, base + "/events", Json{{"t_ms", 5}, {"kind", "pause"}});
    CHECK(r.status == 409);
    CHECK(r.json["code"] == "time_regression");
    r = post_json(c, base + "/events", Json{{"t_ms", 20}, {"kind", "record_start"}});
    CHECK(r.json["code"] == "already_recording");
    r = post_json(c, base + "/events", Json{{"t_ms", 20}, {"kind", "warp"}});
    CHECK(r.status == 422);
    r = post_json(c, base + "/events", Json{{"t_ms", 3000}, {"kind", "record_stop"}});
    CHECK(r.json["open"] == false);

    r = reply_of(c.Get(base + "/replay"));
    REQUIRE(r.status == 200);
    CHECK(r.json["trace"].size() == 4);
    CHECK(r.json["trace"][3]["position"].get<double>() > 0.0);

    r = reply_of(c.Get(base + "/export"));
    REQUIRE(r.status == 200);
    CHECK(r.json["recording"]["events"].size() == 3);
    CHECK(r.json["story"]["id"] == sid);

    r = post_json(c, base + "/events", Json{{"t_ms", 4000}, {"kind", "play"}});
    CHECK(r.status == 409);
  }
  SECTION("delete") {
    r = reply_of(c.Delete(base + "/captions/c1"));
    CHECK(r.status == 200);
    CHECK(r.json["captions"].size() == 1);
    r = reply_of(c.Delete(base));
    CHECK(r.status == 204);
    r = reply_of(c.Get(base));
    CHECK(r.status == 404);
    CHECK(r.json["code"] == "unknown_story");
    r = reply_of(c.Delete(base));
    CHECK(r.status == 404);
  }
}

TEST_CASE("story creation errors", "[server]") {
  testing::LiveServer live;
  auto& c = live.client();
  const auto id = upload(c, sample_csv());
  auto r = post_json(c, "/api/stories", Json{{"dataset_id", "ds-nope"}});
  CHECK(r.status == 404);
  r = post_json(c, "/api/stories", Json{{"selected", Json::array()}});
  CHECK(r.status == 400);
  r = post_json(c, "/api/stories", Json{{"dataset_id", id}, {"config", {{"slow_gain", "x"}}}});
  CHECK(r.status == 422);
  r = post_json(c, "/api/stories",
                Json{{"dataset_id", id},
                     {"captions", Json::array({{{"text", "a"}, {"start_pos", 0}, {"end_pos", 2}},
                                               {{"text", "b"}, {"start_pos", 1}, {"end_pos", 3}}})}});
  CHECK(r.status == 409);
  CHECK(reply_of(c.Get("/api/stories")).json["stories"].empty());
}

TEST_CASE("concurrent caption writes are serialized", "[server][concurrency]") {
  testing::LiveServer live;
  auto& c = live.client();
  const auto id = upload(c, sample_csv());
  const auto sid = post_json(c, "/api/stories", Json{{"dataset_id", id}}).json["id"].get<std::string>();

  constexpr int kThreads = 4;
  constexpr int kPerThread = 5;
  std::vector<std::thread> pool;
  std::atomic<int> created{0};
  for (int t = 0; t < kThreads; ++t) {
    pool.emplace_back([&, t] {
      httplib::Client local("127.0.0.1", live.port());
      for (int i = 0; i < kPerThread; ++i) {
        const double start = t * kPerThread + i;
        const auto r = post_json(local, "/api/stories/" + sid + "/captions",
                                 Json{{"text", "n"}, {"start_pos", start}, {"end_pos", start + 1}});
        if (r.status == 201) ++created;
      }
    });
  }
  for (auto& th : pool) th.join();
  CHECK(created == kThreads * kPerThread);
  const auto r = reply_of(c.Get("/api/stories/" + sid));
  CHECK(r.json["captions"].size() == kThreads * kPerThread);
}

TEST_CASE("tendency endpoint and static root", "[server]") {
  testing::LiveServer live;
  auto& c = live.client();
  auto r = post_json(c, "/api/tendency",
                     Json{{"train", Json::array({{{"text", "#out leave"}, {"label", "leave"}},
                                                 {{"text", "#in remain"}, {"label", "remain"}}})},
                          {"tweets", Json::array({"leave #out", "remain #in"})}});
  REQUIRE(r.status == 200);
  REQUIRE(r.json["scores"].size() == 2);
  CHECK(r.json["scores"][1]["hashtag"] == "#out");
  CHECK(r.json["scores"][1]["score"].get<double>() > 0.5);
  r = post_json(c, "/api/tendency", Json{{"train", Json::array({{{"text", "a"}, {"label", "leave"}}})}});
  CHECK(r.status == 422);
  CHECK(r.json["code"] == "missing_class");

  auto root = c.Get("/");
  REQUIRE(root);
  CHECK(root->status == 200);
  CHECK(root->body.find("<html") != std::string::npos);
  r = reply_of(c.Get("/api/nothing"));
  CHECK(r.status == 404);
}
