#include "clicklayout/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "clicklayout/error.hpp"
#include "clicklayout/prompt_engine.hpp"

namespace clicklayout {

using nlohmann::json;

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

void apply_backend(BackendConfig& b, const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kArgument, "backend config must be an object");
  if (auto it = j.find("kind"); it != j.end()) {
    const auto kind = parse_backend_kind(it->get<std::string>());
    if (!kind) throw Error(ErrorKind::kArgument, "unknown backend kind '" + it->get<std::string>() + "'");
    b.kind = *kind;
  }
  read_if(j, "endpoint", b.endpoint);
  read_if(j, "model", b.model);
  read_if(j, "api_key", b.api_key);
  read_if(j, "temperature", b.temperature);
  read_if(j, "regeneration_temperature", b.regeneration_temperature);
  read_if(j, "max_retries", b.max_retries);
  read_if(j, "inflight_cap", b.inflight_cap);
  if (auto it = j.find("timeout_ms"); it != j.end()) {
    b.timeout = std::chrono::milliseconds(it->get<long long>());
  }
  if (auto it = j.find("fixture"); it != j.end()) b.fixture_path = it->get<std::string>();
}

}  // namespace

void apply_config_json(AppConfig& config, const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kArgument, "config must be a JSON object");
  try {
    if (auto it = j.find("backend"); it != j.end()) apply_backend(config.backend, *it);
    if (auto it = j.find("fallback_backend"); it != j.end() && !it->is_null()) {
      BackendConfig fb = config.fallback.value_or(BackendConfig{});
      apply_backend(fb, *it);
      config.fallback = fb;
    }
    if (auto it = j.find("generation"); it != j.end()) {
      const json& g = *it;
      read_if(g, "endpoint", config.render.generation_endpoint);
      read_if(g, "canvas_width", config.render.canvas_width);
      read_if(g, "canvas_height", config.render.canvas_height);
      read_if(g, "show_labels", config.render.show_labels);
      if (auto t = g.find("timeout_ms"); t != g.end()) {
        config.render.generation_timeout = std::chrono::milliseconds(t->get<long long>());
      }
    }
    if (auto it = j.find("examples"); it != j.end()) config.examples = it->get<std::string>();
    if (auto it = j.find("token_budget"); it != j.end()) {
      if (it->is_null()) {
        config.token_budget.reset();
      } else if (it->is_number_integer() && it->get<long long>() >= 0) {
        config.token_budget = it->get<std::size_t>();
      } else {
        throw Error(ErrorKind::kArgument, "token_budget must be a non-negative integer");
      }
    }
    if (auto it = j.find("server"); it != j.end()) {
      read_if(*it, "host", config.host);
      read_if(*it, "port", config.port);
      if (auto d = it->find("journal_dir"); d != it->end() && !d->is_null()) {
        config.journal_dir = d->get<std::string>();
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kArgument, std::string("bad config value: ") + e.what());
  }
}

AppConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
  AppConfig config;
  apply_config_json(config, j);
  return config;
}

EnvLookup process_environment() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

void apply_environment(AppConfig& config, const EnvLookup& lookup) {
  auto get = [&](std::string_view name) -> std::optional<std::string> {
    auto v = lookup(std::string(name));
    if (v && v->empty()) return std::nullopt;
    return v;
  };
  if (auto key = get(kApiKeyEnv)) {
    config.backend.api_key = *key;
    if (config.fallback) config.fallback->api_key = *key;
  }
  if (auto endpoint = get(kEndpointEnv)) {
    config.backend.endpoint = *endpoint;
    if (config.fallback) config.fallback->endpoint = *endpoint;
  }
  if (auto gen = get(kGenerationEndpointEnv)) config.render.generation_endpoint = *gen;
}

ServiceOptions make_service_options(const AppConfig& config) {
  ServiceOptions options;
  options.backend = config.backend;
  options.fallback = config.fallback;
  options.store = load_example_store(config.examples.empty() ? default_store_path() : config.examples);
  options.prompt.token_budget = config.token_budget;
  options.render = config.render;
  options.journal_dir = config.journal_dir;
  return options;
}

}  // namespace clicklayout
