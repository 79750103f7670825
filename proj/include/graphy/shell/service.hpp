#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>
#include <utility>

#include <json.hpp>

#include "graphy/error.hpp"
#include "graphy/shell/app.hpp"

namespace httplib {
class Server;
}

namespace graphy::shell {

/// HTTP status for an error code: 404 for unknown sessions and nodes, 409
/// for out-of-order or stale actions, 502 for provider failures, 500 for IO,
/// 400 otherwise.
int http_status(ErrorCode code) noexcept;

/// {"code": "...", "message": "..."}
nlohmann::json error_body(ErrorCode code, const std::string& message);

nlohmann::json node_json(const graph::Node& node);

/// The REST API under /api/v1. Requests run concurrently on a worker pool;
/// actions on one session are serialized by the SessionStore. No route
/// mutates the graph.
class Service {
 public:
  explicit Service(App& app);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds to host:port (port 0 picks a free port) and returns the port.
  /// Throws BindFailure.
  int bind(const std::string& host, int port);
  /// Serves until stop(); requires bind().
  void run();
  /// bind() then run() on a background thread.
  int start(const std::string& host, int port);
  /// Stops serving and persists every loaded session.
  void stop();

 private:
  void routes();

  App& app_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::thread janitor_;
  std::atomic<bool> stopping_{false};
};

}  // namespace graphy::shell
