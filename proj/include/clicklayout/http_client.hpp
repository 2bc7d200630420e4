#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace clicklayout::http {

/// `scheme://host[:port]` plus the request path, split out of a URL.
struct Endpoint {
  std::string origin;
  std::string path;

  [[nodiscard]] std::string url() const { return origin + path; }
};

/// Throws Error(kArgument) for anything that is not an http(s) URL.
[[nodiscard]] Endpoint parse_endpoint(std::string_view url);

struct Response {
  int status = 0;
  std::string body;
  std::string content_type;
};

struct PostOptions {
  std::chrono::milliseconds timeout{30000};
  std::map<std::string, std::string> headers;
};

/// One POST. Returns nullopt on connection failure or timeout (no status).
[[nodiscard]] std::optional<Response> post(const Endpoint& endpoint, const std::string& body,
                                           std::string_view content_type,
                                           const PostOptions& options);

/// Caps concurrent requests per origin. Shared by every outbound client in
/// the process.
class InflightLimiter {
 public:
  static InflightLimiter& instance();

  void set_cap(std::size_t cap);
  [[nodiscard]] std::size_t cap() const;

  class Slot {
   public:
    explicit Slot(std::string key);
    ~Slot();
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    std::string key_;
  };

  [[nodiscard]] Slot acquire(const std::string& origin) { return Slot(origin); }

 private:
  InflightLimiter() = default;
};

inline constexpr std::size_t kDefaultInflightCap = 4;

}  // namespace clicklayout::http
