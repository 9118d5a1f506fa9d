#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "bubblestory/error.hpp"
#include "bubblestory/store.hpp"

namespace bubblestory {

struct ServerConfig {
  std::string host = "0.0.0.0";
  int port = 8972;
  std::filesystem::path data_dir = "bubblestory-data";
  std::uint64_t seed = 42;
  /// Static UI assets served under /. Empty serves a placeholder page.
  std::filesystem::path ui_dir;
};

/// HTTP status for an error code: 400, 404, 409, 422 or 500.
int http_status(Errc code) noexcept;

/// JSON API over a DataStore. Handles requests concurrently.
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds config.port (0 picks a free port) and returns the bound port.
  int bind();
  /// Serves until stop(); call bind() first.
  void run();
  void stop();

  const ServerConfig& config() const noexcept { return config_; }
  DataStore& store() noexcept { return store_; }

 private:
  struct Impl;
  ServerConfig config_;
  DataStore store_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bubblestory
