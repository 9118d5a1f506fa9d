#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "bubblestory/dataset.hpp"
#include "bubblestory/story.hpp"

namespace bubblestory {

/// File-system persistence under one data directory:
///   datasets/<id>.csv, datasets/<id>.json (metadata), stories/<id>.json
/// Every write goes through a temporary file and a rename, so readers never
/// see a partial document. Story mutations are serialized per story id.
class DataStore {
 public:
  explicit DataStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

  /// Validates and stores a CSV upload. Ids derive from the content, so
  /// re-uploading identical data returns the existing id.
  std::string put_dataset(std::string_view csv, ScaleMode mode = ScaleMode::linear);
  Dataset get_dataset(std::string_view id) const;
  std::vector<std::string> dataset_ids() const;
  /// Replaces the stored series with a labeled copy of the same dataset.
  void put_levels(const Dataset& labeled);

  Story create_story(Story story);
  Story get_story(std::string_view id) const;
  std::vector<std::string> story_ids() const;
  void delete_story(std::string_view id);

  /// Loads, mutates and saves a story while holding its lock. Nothing is
  /// written if `mutate` throws.
  Story update_story(std::string_view id, const std::function<Story(Story)>& mutate);

  /// Throws Errc::bad_value unless `id` is a safe file-name stem.
  static void check_id(std::string_view id);

 private:
  std::filesystem::path dataset_csv(std::string_view id) const;
  std::filesystem::path dataset_meta(std::string_view id) const;
  std::filesystem::path story_path(std::string_view id) const;
  std::shared_ptr<std::mutex> story_lock(std::string_view id);

  std::filesystem::path root_;
  mutable std::mutex datasets_mutex_;
  std::mutex locks_mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>, std::less<>> story_locks_;
};

std::string read_file(const std::filesystem::path& path);
/// Write-to-temporary then rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace bubblestory
