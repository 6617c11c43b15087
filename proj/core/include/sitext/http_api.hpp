#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "sitext/service.hpp"

namespace sitext {

struct HttpOptions {
  /// Optional directory served at "/" (for a browser client).
  std::filesystem::path static_dir;
};

/// JSON-over-HTTP front end for a SessionManager:
///
///   POST /sessions                      {corpus?, feature_mode}
///   GET  /sessions/{id}
///   POST /sessions/{id}/interactions    {moves: [{doc_id, x, y}]}
///   POST /sessions/{id}/release         {doc_ids: [...]}
///   POST /sessions/{id}/reset
///   GET  /corpus/{doc_id}[?corpus=name]
///
/// Failures are answered as {code, message} with a matching status.
class HttpService {
 public:
  HttpService(SessionManager& sessions, HttpOptions options = {});
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds to an ephemeral port and returns it (-1 on failure).
  int bind_to_any_port(const std::string& host);
  bool bind(const std::string& host, int port);
  /// Blocks serving requests until stop() is called.
  bool listen_after_bind();
  void stop();
  bool is_running() const;
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sitext
