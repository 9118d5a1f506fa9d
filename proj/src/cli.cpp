#include "bubblestory/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "bubblestory/leveling.hpp"
#include "bubblestory/scheduling.hpp"
#include "bubblestory/serialization.hpp"
#include "bubblestory/server.hpp"
#include "bubblestory/store.hpp"
#include "bubblestory/synthetic.hpp"
#include "bubblestory/tendency.hpp"

#ifndef BUBBLESTORY_VERSION
#define BUBBLESTORY_VERSION "0.0.0"
#endif

namespace bubblestory::cli {
namespace {

constexpr const char* kDefaultStore = "bubblestory-data";
constexpr const char* kStoreEnv = "BUBBLESTORY_DATA_DIR";

std::vector<std::string> split_topics(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < csv.size()) {
    auto end = csv.find(',', start);
    if (end == std::string::npos) end = csv.size();
    if (end > start) out.push_back(csv.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

ScheduleConfig load_config(const std::string& arg) {
  if (arg.empty()) return {};
  const std::string text = arg.front() == '{' ? arg : read_file(arg);
  try {
    return config_from_json(Json::parse(text));
  } catch (const Json::parse_error& e) {
    throw Error(Errc::bad_config, std::string("config is not valid JSON: ") + e.what());
  }
}

void add_store_option(CLI::App* cmd, std::string& store) {
  cmd->add_option("--store", store, "Data directory")->envname(kStoreEnv)->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Authoring engine for animated bubble-chart data stories", "bubblestory"};
  app.set_version_flag("--version", BUBBLESTORY_VERSION);
  app.require_subcommand(1);

  std::string store_dir = kDefaultStore;
  std::string csv_path, out_path, report_path, topics, config_arg, train_path, tweets_path,
      model_path, id, ui_dir, host = "0.0.0.0";
  std::string scale = "linear";
  std::uint64_t seed = 42;
  std::uint64_t sample_seed = 2016;
  double alpha = 1.0;
  int port = 8972;

  auto* ingest = app.add_subcommand("ingest", "Validate a CSV file and add it to a store");
  ingest->add_option("csv", csv_path, "Wide-format CSV file")->required();
  ingest->add_option("--out", store_dir, "Store (data directory)")->required();
  ingest->add_option("--scale", scale, "Display scale")
      ->check(CLI::IsMember({"linear", "log10p"}))
      ->capture_default_str();

  auto* label = app.add_subcommand("label", "Assign movement levels and write them back");
  label->add_option("id", id, "Dataset id")->required();
  label->add_option("--seed", seed, "k-means seed")->capture_default_str();
  label->add_option("--report", report_path, "Also write the leveling report here");
  add_store_option(label, store_dir);

  auto* schedule = app.add_subcommand("schedule", "Compile an animation schedule");
  schedule->add_option("id", id, "Dataset id")->required();
  schedule->add_option("--topics", topics, "Comma-separated topics (default: all)");
  schedule->add_option("--config", config_arg, "Config JSON, inline or a file path");
  schedule->add_option("--out", out_path, "Output file")->required();
  add_store_option(schedule, store_dir);

  auto* score = app.add_subcommand("score", "Fit the tendency model and score hashtags");
  score->add_option("--train", train_path, "Labeled tweets, JSON lines")->required();
  score->add_option("--tweets", tweets_path, "Tweets to score, one per line")->required();
  score->add_option("--out", out_path, "Output CSV (hashtag,score,support)")->required();
  score->add_option("--alpha", alpha, "Smoothing")->capture_default_str();
  score->add_option("--model", model_path, "Also write the fitted model JSON here");

  auto* pulse = app.add_subcommand("pulse", "Print level series and tipping points");
  pulse->add_option("id", id, "Dataset id")->required();
  pulse->add_option("--topics", topics, "Comma-separated topics (default: all)");
  add_store_option(pulse, store_dir);

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--port", port, "TCP port")->envname("BUBBLESTORY_PORT")->capture_default_str();
  serve->add_option("--data-dir", store_dir, "Data directory")->envname(kStoreEnv)->capture_default_str();
  serve->add_option("--seed", seed, "Default leveling seed")
      ->envname("BUBBLESTORY_SEED")
      ->capture_default_str();
  serve->add_option("--host", host, "Listen address")->capture_default_str();
  serve->add_option("--ui-dir", ui_dir, "Static UI assets");

  auto* exp = app.add_subcommand("export", "Write a story's replay bundle");
  exp->add_option("story-id", id, "Story id")->required();
  exp->add_option("--out", out_path, "Output file")->required();
  add_store_option(exp, store_dir);

  auto* sample = app.add_subcommand("sample", "Write the bundled synthetic sample CSV");
  sample->add_option("--out", out_path, "Output file")->required();
  sample->add_option("--seed", sample_seed, "Generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest) {
      DataStore store(store_dir);
      out << store.put_dataset(read_file(csv_path), parse_scale_mode(scale)) << "\n";
    } else if (*label) {
      DataStore store(store_dir);
      const auto result = assign_levels(store.get_dataset(id), seed);
      store.put_levels(result.dataset);
      const std::string report = dump(to_json(result.report));
      if (!report_path.empty()) write_file_atomic(report_path, report);
      out << report;
    } else if (*schedule) {
      DataStore store(store_dir);
      const Dataset d = store.get_dataset(id);
      const auto compiled = compile_schedule(d, split_topics(topics), load_config(config_arg));
      write_file_atomic(out_path, dump(to_json(compiled)));
    } else if (*score) {
      const auto model = fit(read_labeled_jsonl(read_file(train_path)), alpha);
      const auto tweets = read_tweet_lines(read_file(tweets_path));
      write_file_atomic(out_path, write_scores_csv(hashtag_tendency(model, tweets)));
      if (!model_path.empty()) write_file_atomic(model_path, dump(to_json(model)));
    } else if (*pulse) {
      DataStore store(store_dir);
      out << dump(pulse_json(store.get_dataset(id), split_topics(topics)));
    } else if (*serve) {
      ServerConfig cfg;
      cfg.host = host;
      cfg.port = port;
      cfg.data_dir = store_dir;
      cfg.seed = seed;
      cfg.ui_dir = ui_dir;
      Server server(cfg);
      const int bound = server.bind();
      err << "listening on " << host << ":" << bound << " (data: " << store_dir << ")\n";
      server.run();
    } else if (*exp) {
      DataStore store(store_dir);
      const Story story = store.get_story(id);
      const Dataset d = store.get_dataset(story.dataset_id);
      const auto compiled = compile_schedule(d, story.selected, story.config);
      write_file_atomic(out_path, dump(export_bundle(story, compiled)));
    } else if (*sample) {
      write_file_atomic(out_path, write_csv(brexit_shaped_sample(sample_seed)));
    }
  } catch (const Error& e) {
    err << "error: " << code_name(e.code()) << ": " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace bubblestory::cli
