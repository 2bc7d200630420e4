#pragma once

#include <arpa/inet.h>
#include <httplib.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "clicklayout/instruction.hpp"
#include "clicklayout/scene_graph.hpp"

namespace testing {

using namespace clicklayout;

inline std::filesystem::path test_data(const std::string& name) {
  return std::filesystem::path(CLICKLAYOUT_TEST_DATA_DIR) / name;
}

inline std::filesystem::path repo_data(const std::string& name) {
  return std::filesystem::path(CLICKLAYOUT_DATA_DIR) / name;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SceneGraph dog_car_input() {
  return {"A dog standing by a car.",
          {{0, "dog", {0.75, 0.8, 0.2, 0.2}}, {1, "car", {0.1, 0.65, 0.6, 0.35}}}};
}

inline SceneGraph dog_car_output() {
  return {"A dog standing on a car. ",
          {{1, "car", {0.1, 0.65, 0.6, 0.35}}, {0, "dog", {0.35, 0.45, 0.2, 0.2}}}};
}

inline const std::string kGoldenRetriever =
    "move {x: 0.75, y: 0.80, width: 0.20, height: 0.20} to {x: 0.45, y: 0.55} and make it a "
    "golden retriever";

/// Same boxes, compared as a set keyed by unique_id, coordinates within tol.
inline bool same_boxes(const SceneGraph& a, const SceneGraph& b, double tol = 1e-9) {
  if (a.boxes.size() != b.boxes.size()) return false;
  for (const auto& x : a.boxes) {
    const ObjectBox* y = b.find(x.unique_id);
    if (!y || y->name != x.name || max_field_delta(x.box, y->box) > tol) return false;
  }
  return true;
}

/// httplib server on an ephemeral loopback port, served from a background
/// thread for the lifetime of the object.
class StubServer {
 public:
  explicit StubServer(const std::function<void(httplib::Server&)>& routes) {
    routes(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  [[nodiscard]] int port() const { return port_; }
  [[nodiscard]] std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

 private:
  httplib::Server server_;
  int port_ = -1;
  std::thread thread_;
};

/// A loopback URL nobody listens on.
inline std::string unreachable_url() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  const int port = ntohs(addr.sin_port);
  ::close(fd);
  return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
}

// Generators for property tests.

inline double grid(std::mt19937_64& rng, int lo, int hi, double scale) {
  return std::uniform_int_distribution<int>(lo, hi)(rng) / scale;
}

inline std::string random_name(std::mt19937_64& rng) {
  static const char* kParts[] = {"dog", "car", "red", "tall", "wooden", "\"quoted\"",
                                 "tab\there", "caf\xc3\xa9", "back\\slash", "lamp"};
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_int_distribution<int> count(1, 3);
  std::string name;
  for (int i = count(rng); i > 0; --i) {
    if (!name.empty()) name += ' ';
    name += kParts[pick(rng)];
  }
  return name;
}

inline NormRect random_rect(std::mt19937_64& rng) {
  const double w = grid(rng, 1, 10000, 10000.0);
  const double h = grid(rng, 1, 10000, 10000.0);
  const double x = grid(rng, 0, static_cast<int>(10000 - w * 10000 + 0.5), 10000.0);
  const double y = grid(rng, 0, static_cast<int>(10000 - h * 10000 + 0.5), 10000.0);
  return {x, y, w, h};
}

inline SceneGraph random_graph(std::mt19937_64& rng, int max_boxes = 8) {
  SceneGraph g;
  g.prompt = std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? "" : random_name(rng);
  const int n = std::uniform_int_distribution<int>(0, max_boxes)(rng);
  std::vector<ObjectId> ids(64);
  for (int i = 0; i < 64; ++i) ids[i] = i * 3;
  std::shuffle(ids.begin(), ids.end(), rng);
  for (int i = 0; i < n; ++i) g.boxes.push_back({ids[i], random_name(rng), random_rect(rng)});
  return g;
}

inline MultimodalInstruction random_instruction(std::mt19937_64& rng) {
  static const char* kWords[] = {"move", "to", "and", "make it a", "golden retriever", "the",
                                 "resize", "delete", "add a cat at", ",", "over there."};
  const bool pixels = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  std::vector<InstructionToken> tokens;
  const int n = std::uniform_int_distribution<int>(1, 7)(rng);
  for (int i = 0; i < n; ++i) {
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
      case 0: {
        std::string text;
        for (int k = std::uniform_int_distribution<int>(1, 3)(rng); k > 0; --k) {
          if (!text.empty()) text += ' ';
          text += kWords[std::uniform_int_distribution<int>(0, 10)(rng)];
        }
        tokens.emplace_back(TextSpan{text});
        break;
      }
      case 1: {
        NormRect r = pixels ? NormRect{grid(rng, 0, 900, 1.0), grid(rng, 0, 900, 1.0),
                                       grid(rng, 1, 100, 1.0), grid(rng, 1, 100, 1.0)}
                            : NormRect{grid(rng, 0, 80, 100.0), grid(rng, 0, 80, 100.0),
                                       grid(rng, 1, 20, 100.0), grid(rng, 1, 20, 100.0)};
        tokens.emplace_back(BoxRef{r, {}});
        break;
      }
      default: {
        NormPoint p = pixels ? NormPoint{grid(rng, 0, 1000, 1.0), grid(rng, 0, 1000, 1.0)}
                             : NormPoint{grid(rng, 0, 100, 100.0), grid(rng, 0, 100, 100.0)};
        tokens.emplace_back(PointRef{p, {}});
      }
    }
  }
  return MultimodalInstruction(std::move(tokens), pixels ? Units::kPixels : Units::kNormalized);
}

}  // namespace testing
