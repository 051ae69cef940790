#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "artemis/server/registry.hpp"

namespace artemis::server {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> log_path;
  std::optional<std::filesystem::path> static_dir;  // served at /
  std::chrono::milliseconds stream_poll{200};
  std::size_t worker_threads = 32;  // each open event stream holds one
};

// HTTP + JSON front end over a Registry:
//   POST /api/reports                  200 {"victim_id"}, 400 {"errors": [...]}
//   GET  /api/victims?status=&acuity=  200 [VictimEntry...]
//   POST /api/victims/{id}/status      200 VictimEntry, 400, 404, 409
//   GET  /api/events?since=            text/event-stream, SSE id = event id
class CommandServer {
 public:
  explicit CommandServer(ServerConfig config);
  ~CommandServer();

  CommandServer(const CommandServer&) = delete;
  CommandServer& operator=(const CommandServer&) = delete;

  // Binds the listening socket and returns the port. ConfigError on failure.
  int bind();
  // Serves on the calling thread until stop().
  void run();
  // bind() + run() on a background thread.
  int start();
  void stop();

  int port() const noexcept { return port_; }
  std::string base_url() const;
  Registry& registry() noexcept { return *registry_; }

 private:
  struct Impl;
  ServerConfig config_;
  std::unique_ptr<Registry> registry_;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace artemis::server
