#pragma once

#include <memory>
#include <string>

#include "clicklayout/error.hpp"
#include "clicklayout/session.hpp"

namespace clicklayout {

/// HTTP status used for each error kind.
[[nodiscard]] int http_status_for(ErrorKind kind);

/// JSON API over a SessionManager:
///
///   POST /sessions                      {layout, width, height} -> {session_id}
///   GET  /sessions/{id}/layout          -> layout
///   POST /sessions/{id}/instruction     {instruction_text} | {tokens, units}
///                                       -> {layout, chain_of_thought, diff}
///   POST /sessions/{id}/reload          -> same shape
///   POST /sessions/{id}/undo            -> {layout}
///   GET  /sessions/{id}/history         -> [entry...]
///   GET  /sessions/{id}/preview.svg     -> image/svg+xml
///   POST /sessions/{id}/generate        -> image bytes, X-Clicklayout-Fallback: 0|1
///
/// Errors come back as {"error": kind, "message": ..., "raw"?: ...}.
class ApiServer {
 public:
  explicit ApiServer(SessionManager& sessions);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds without serving. Port 0 picks a free port; returns the bound port
  /// or -1 on failure.
  int bind(const std::string& host, int port);

  /// Serves until stop(). Requires a successful bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace clicklayout
