#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "adaptforge/config.hpp"
#include "adaptforge/session.hpp"

namespace adaptforge {

struct Response {
  int status = 200;
  nlohmann::ordered_json body;
};

struct ServiceOptions {
  int mining_wait_ms = 2000;
  unsigned workers = 2;
  std::string log_dir;
  Clock clock = utc_now;
};

ServiceOptions options_from(const ServiceConfig& cfg);

/// HTTP status for an engine error: 409 for illegal transitions, 404 for
/// missing resources, 500 for I/O, 400 otherwise.
int http_status(ErrorCode code);

/// Session store plus JSON routing. `handle` is transport-free so it can be
/// driven directly; `serve` binds it to an HTTP listener.
class Service {
 public:
  Service(Engine engine, ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(std::string_view method, std::string_view path, std::string_view body);

  /// Blocks until stop(). Returns false when the socket cannot be bound.
  bool serve(const std::string& host, int port);
  /// Binds to an ephemeral port and returns it (for tests); serve_bound()
  /// then runs the loop.
  int bind_ephemeral(const std::string& host);
  bool serve_bound();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace adaptforge
