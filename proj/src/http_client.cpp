#include "clicklayout/http_client.hpp"

#include <condition_variable>
#include <mutex>

#include <httplib.h>

#include "clicklayout/error.hpp"

namespace clicklayout::http {

Endpoint parse_endpoint(std::string_view url) {
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorKind::kArgument, "endpoint must be an http(s) URL: " + std::string(url));
  }
  const std::string_view scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorKind::kArgument, "unsupported URL scheme: " + std::string(scheme));
  }
  const std::size_t host_start = scheme_end + 3;
  const std::size_t path_start = url.find('/', host_start);
  Endpoint ep;
  ep.origin = std::string(url.substr(0, path_start));
  ep.path = path_start == std::string_view::npos ? "/" : std::string(url.substr(path_start));
  if (ep.origin.size() <= host_start) {
    throw Error(ErrorKind::kArgument, "endpoint URL has no host: " + std::string(url));
  }
  return ep;
}

std::optional<Response> post(const Endpoint& endpoint, const std::string& body,
                             std::string_view content_type, const PostOptions& options) {
  httplib::Client client(endpoint.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  for (const auto& [k, v] : options.headers) headers.emplace(k, v);
  auto result = client.Post(endpoint.path, headers, body, std::string(content_type));
  if (!result) return std::nullopt;
  Response out;
  out.status = result->status;
  out.body = result->body;
  out.content_type = result->get_header_value("Content-Type");
  return out;
}

namespace {

struct LimiterState {
  std::mutex mu;
  std::condition_variable cv;
  std::map<std::string, std::size_t> active;
  std::size_t cap = kDefaultInflightCap;
};

LimiterState& state() {
  static LimiterState s;
  return s;
}

}  // namespace

InflightLimiter& InflightLimiter::instance() {
  static InflightLimiter limiter;
  return limiter;
}

void InflightLimiter::set_cap(std::size_t cap) {
  auto& s = state();
  {
    std::lock_guard lock(s.mu);
    s.cap = cap == 0 ? 1 : cap;
  }
  s.cv.notify_all();
}

std::size_t InflightLimiter::cap() const {
  auto& s = state();
  std::lock_guard lock(s.mu);
  return s.cap;
}

InflightLimiter::Slot::Slot(std::string key)
    : key_(std::move(key)) {
  auto& s = state();
  std::unique_lock lock(s.mu);
  s.cv.wait(lock, [&] { return s.active[key_] < s.cap; });
  ++s.active[key_];
}

InflightLimiter::Slot::~Slot() {
  auto& s = state();
  {
    std::lock_guard lock(s.mu);
    if (--s.active[key_] == 0) s.active.erase(key_);
  }
  s.cv.notify_all();
}

}  // namespace clicklayout::http
