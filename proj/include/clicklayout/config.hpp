#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "clicklayout/llm_backend.hpp"
#include "clicklayout/render.hpp"
#include "clicklayout/session.hpp"

namespace clicklayout {

/// Everything the CLI and server need. Layered as defaults < config file <
/// environment < flags; the CLI applies flags last.
struct AppConfig {
  BackendConfig backend;
  std::optional<BackendConfig> fallback;
  RenderConfig render;
  std::filesystem::path examples;  // empty: shipped default store
  std::optional<std::size_t> token_budget;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> journal_dir;
};

/// Overlays the keys present in `j` onto `config`. Unknown keys are ignored.
///
///   {"backend": {"kind", "endpoint", "model", "api_key", "temperature",
///                "regeneration_temperature", "timeout_ms", "max_retries",
///                "inflight_cap", "fixture"},
///    "fallback_backend": {...same...},
///    "generation": {"endpoint", "timeout_ms", "canvas_width", "canvas_height",
///                   "show_labels"},
///    "examples": path, "token_budget": n,
///    "server": {"host", "port", "journal_dir"}}
void apply_config_json(AppConfig& config, const nlohmann::json& j);

[[nodiscard]] AppConfig load_config_file(const std::filesystem::path& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

[[nodiscard]] EnvLookup process_environment();

/// CLICKLAYOUT_LLM_API_KEY, CLICKLAYOUT_LLM_ENDPOINT and
/// CLICKLAYOUT_GEN_ENDPOINT override file values when set and non-empty.
void apply_environment(AppConfig& config, const EnvLookup& lookup = process_environment());

/// Loads the example store and assembles the session manager options.
[[nodiscard]] ServiceOptions make_service_options(const AppConfig& config);

}  // namespace clicklayout
