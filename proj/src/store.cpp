#include "bubblestory/store.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "bubblestory/error.hpp"
#include "bubblestory/serialization.hpp"

namespace fs = std::filesystem;

namespace bubblestory {
namespace {

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string random_id(std::string_view prefix) {
  static std::mt19937_64 rng{std::random_device{}()};
  static std::mutex m;
  std::lock_guard lock(m);
  return std::string(prefix) + hex64(rng());
}

std::vector<std::string> stems_with_extension(const fs::path& dir, std::string_view ext) {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      out.push_back(entry.path().stem().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  static std::atomic<std::uint64_t> counter{0};
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(Errc::io_error, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::io_error, "cannot replace " + path.string());
  }
}

DataStore::DataStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "datasets", ec);
  fs::create_directories(root_ / "stories", ec);
  if (!fs::is_directory(root_ / "datasets") || !fs::is_directory(root_ / "stories")) {
    throw Error(Errc::io_error, "cannot create data directory " + root_.string());
  }
}

void DataStore::check_id(std::string_view id) {
  const bool ok = !id.empty() && id.size() <= 128 &&
                  std::all_of(id.begin(), id.end(), [](char c) {
                    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                           (c >= '0' && c <= '9') || c == '-' || c == '_';
                  });
  if (!ok) throw Error(Errc::bad_value, "invalid id '" + std::string(id) + "'");
}

fs::path DataStore::dataset_csv(std::string_view id) const {
  return root_ / "datasets" / (std::string(id) + ".csv");
}

fs::path DataStore::dataset_meta(std::string_view id) const {
  return root_ / "datasets" / (std::string(id) + ".json");
}

fs::path DataStore::story_path(std::string_view id) const {
  return root_ / "stories" / (std::string(id) + ".json");
}

std::string DataStore::put_dataset(std::string_view csv, ScaleMode mode) {
  Dataset d = parse_csv(csv, mode);
  const std::string canonical = write_csv(d);
  d.id = "ds-" + hex64(fnv1a(canonical + std::string(to_string(mode))));

  std::lock_guard lock(datasets_mutex_);
  if (fs::exists(dataset_meta(d.id))) return d.id;
  write_file_atomic(dataset_csv(d.id), canonical);
  // The metadata file marks the dataset as present, so it goes last.
  write_file_atomic(dataset_meta(d.id),
                    dump(Json{{"version", kDocumentVersion},
                              {"id", d.id},
                              {"scale_mode", to_string(mode)}}));
  return d.id;
}

Dataset DataStore::get_dataset(std::string_view id) const {
  if (!id.empty()) {
    try {
      check_id(id);
    } catch (const Error&) {
      throw Error(Errc::unknown_dataset, "unknown dataset '" + std::string(id) + "'");
    }
  }
  std::string csv;
  Json meta;
  {
    std::lock_guard lock(datasets_mutex_);
    if (id.empty() || !fs::exists(dataset_meta(id))) {
      throw Error(Errc::unknown_dataset, "unknown dataset '" + std::string(id) + "'");
    }
    meta = parse_json(read_file(dataset_meta(id)));
    csv = read_file(dataset_csv(id));
  }
  Dataset d = parse_csv(csv, parse_scale_mode(meta.at("scale_mode").get<std::string>()));
  d.id = std::string(id);
  return d;
}

std::vector<std::string> DataStore::dataset_ids() const {
  std::lock_guard lock(datasets_mutex_);
  return stems_with_extension(root_ / "datasets", ".json");
}

void DataStore::put_levels(const Dataset& labeled) {
  const Dataset current = get_dataset(labeled.id);
  if (!labeled.labeled() || !(current.axis == labeled.axis) ||
      current.topic_count() != labeled.topic_count()) {
    throw Error(Errc::bad_value, "level write does not match stored dataset");
  }
  validate(labeled);
  std::lock_guard lock(datasets_mutex_);
  write_file_atomic(dataset_csv(labeled.id), write_csv(labeled));
}

std::shared_ptr<std::mutex> DataStore::story_lock(std::string_view id) {
  std::lock_guard lock(locks_mutex_);
  auto it = story_locks_.find(id);
  if (it == story_locks_.end()) {
    it = story_locks_.emplace(std::string(id), std::make_shared<std::mutex>()).first;
  }
  return it->second;
}

Story DataStore::create_story(Story story) {
  story.id = random_id("st-");
  const std::string now = utc_now();
  story.created_at = now;
  story.modified_at = now;
  validate_against(story, get_dataset(story.dataset_id));
  auto m = story_lock(story.id);
  std::lock_guard lock(*m);
  write_file_atomic(story_path(story.id), save_story(story));
  return story;
}

Story DataStore::get_story(std::string_view id) const {
  try {
    check_id(id);
  } catch (const Error&) {
    throw Error(Errc::unknown_story, "unknown story '" + std::string(id) + "'");
  }
  const auto path = story_path(id);
  if (!fs::exists(path)) throw Error(Errc::unknown_story, "unknown story '" + std::string(id) + "'");
  return load_story(read_file(path));
}

std::vector<std::string> DataStore::story_ids() const {
  return stems_with_extension(root_ / "stories", ".json");
}

void DataStore::delete_story(std::string_view id) {
  get_story(id);
  auto m = story_lock(id);
  std::lock_guard lock(*m);
  std::error_code ec;
  if (!fs::remove(story_path(id), ec)) {
    throw Error(Errc::unknown_story, "unknown story '" + std::string(id) + "'");
  }
}

Story DataStore::update_story(std::string_view id, const std::function<Story(Story)>& mutate) {
  get_story(id);
  auto m = story_lock(id);
  std::lock_guard lock(*m);
  Story updated = mutate(get_story(id));
  updated.id = std::string(id);
  validate_against(updated, get_dataset(updated.dataset_id));
  write_file_atomic(story_path(id), save_story(updated));
  return updated;
}

}  // namespace bubblestory
