#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include <unistd.h>

#include "clicklayout/config.hpp"
#include "clicklayout/error.hpp"
#include "support.hpp"

using namespace clicklayout;
using nlohmann::json;

namespace {

EnvLookup fake_env(std::map<std::string, std::string> vars) {
  return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

ErrorKind kind_of(const json& j) {
  AppConfig c;
  try {
    apply_config_json(c, j);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a config error for " << j.dump());
  return ErrorKind::kIo;
}

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  auto dir = std::filesystem::temp_directory_path() / "clicklayout_tests";
  std::filesystem::create_directories(dir);
  auto p = dir / (name + "_" + std::to_string(::getpid()));
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults") {
    const AppConfig c;
    CHECK(c.backend.kind == BackendKind::kOracle);
    CHECK(c.host == "127.0.0.1");
    CHECK(c.port == 8080);
    CHECK_FALSE(c.fallback.has_value());
    CHECK_FALSE(c.token_budget.has_value());
    CHECK(c.render.generation_endpoint.empty());
  }

  TEST_CASE("full file") {
    const auto path = write_temp("config.json", R"({
      "backend": {"kind": "remote", "endpoint": "https://llm.example/v1/chat/completions",
                  "model": "m1", "api_key": "k", "temperature": 0.1,
                  "regeneration_temperature": 0.9, "timeout_ms": 1234, "max_retries": 1,
                  "inflight_cap": 2},
      "fallback_backend": {"kind": "fixture", "fixture": "/tmp/f.json"},
      "generation": {"endpoint": "http://gen.example/run", "timeout_ms": 99,
                     "canvas_width": 512, "canvas_height": 256, "show_labels": false},
      "examples": "/data/store.json",
      "token_budget": 3000,
      "server": {"host": "0.0.0.0", "port": 9000, "journal_dir": "/var/lib/cl"},
      "unrelated": true
    })");
    const AppConfig c = load_config_file(path);
    CHECK(c.backend.kind == BackendKind::kRemote);
    CHECK(c.backend.endpoint == "https://llm.example/v1/chat/completions");
    CHECK(c.backend.model == "m1");
    CHECK(c.backend.api_key == "k");
    CHECK(c.backend.temperature == 0.1);
    CHECK(c.backend.regeneration_temperature == 0.9);
    CHECK(c.backend.timeout == std::chrono::milliseconds(1234));
    CHECK(c.backend.max_retries == 1);
    CHECK(c.backend.inflight_cap == 2);
    REQUIRE(c.fallback.has_value());
    CHECK(c.fallback->kind == BackendKind::kFixture);
    CHECK(c.fallback->fixture_path == "/tmp/f.json");
    CHECK(c.render.generation_endpoint == "http://gen.example/run");
    CHECK(c.render.generation_timeout == std::chrono::milliseconds(99));
    CHECK(c.render.canvas_width == 512);
    CHECK(c.render.canvas_height == 256);
    CHECK_FALSE(c.render.show_labels);
    CHECK(c.examples == "/data/store.json");
    CHECK(c.token_budget == std::optional<std::size_t>(3000));
    CHECK(c.host == "0.0.0.0");
    CHECK(c.port == 9000);
    CHECK(c.journal_dir == std::optional<std::filesystem::path>("/var/lib/cl"));
    std::filesystem::remove(path);
  }

  TEST_CASE("partial overlay keeps other values") {
    AppConfig c;
    c.backend.model = "keep";
    apply_config_json(c, {{"backend", {{"temperature", 0.5}}}});
    CHECK(c.backend.model == "keep");
    CHECK(c.backend.temperature == 0.5);
    apply_config_json(c, {{"token_budget", 10}});
    apply_config_json(c, {{"token_budget", nullptr}});
    CHECK_FALSE(c.token_budget.has_value());
  }

  TEST_CASE("bad values") {
    CHECK(kind_of(json::array()) == ErrorKind::kArgument);
    CHECK(kind_of({{"backend", {{"kind", "gpt"}}}}) == ErrorKind::kArgument);
    CHECK(kind_of({{"backend", {{"temperature", "hot"}}}}) == ErrorKind::kArgument);
    CHECK(kind_of({{"backend", 3}}) == ErrorKind::kArgument);
    CHECK(kind_of({{"server", {{"port", "80"}}}}) == ErrorKind::kArgument);
    CHECK(kind_of({{"token_budget", -1}}) == ErrorKind::kArgument);
  }

  TEST_CASE("file errors") {
    try {
      (void)load_config_file("/nonexistent/config.json");
      FAIL("expected io error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kIo);
    }
    const auto bad = write_temp("bad_config.json", "{\"backend\": ");
    CHECK_THROWS_AS((void)load_config_file(bad), ParseError);
    std::filesystem::remove(bad);
  }

  TEST_CASE("environment overrides the file") {
    AppConfig c;
    c.backend.api_key = "from-file";
    c.backend.endpoint = "http://file/";
    c.fallback = BackendConfig{};
    apply_environment(c, fake_env({{"CLICKLAYOUT_LLM_API_KEY", "from-env"},
                                   {"CLICKLAYOUT_GEN_ENDPOINT", "http://gen/"}}));
    CHECK(c.backend.api_key == "from-env");
    CHECK(c.fallback->api_key == "from-env");
    CHECK(c.backend.endpoint == "http://file/");
    CHECK(c.render.generation_endpoint == "http://gen/");

    apply_environment(c, fake_env({{"CLICKLAYOUT_LLM_ENDPOINT", "http://env/"},
                                   {"CLICKLAYOUT_LLM_API_KEY", ""}}));
    CHECK(c.backend.endpoint == "http://env/");
    CHECK(c.backend.api_key == "from-env");
  }

  TEST_CASE("service options") {
    AppConfig c;
    c.token_budget = 5000;
    const ServiceOptions o = make_service_options(c);
    CHECK(o.store.examples.size() == 20);
    CHECK(o.prompt.token_budget == std::optional<std::size_t>(5000));
    c.examples = testing::test_data("dog_car_example.json");
    CHECK(make_service_options(c).store.examples.size() == 1);
    c.examples = "/nonexistent/store.json";
    CHECK_THROWS_AS((void)make_service_options(c), Error);
  }
}
