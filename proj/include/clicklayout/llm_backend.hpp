#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "clicklayout/prompt_engine.hpp"

namespace clicklayout {

enum class BackendKind { kRemote, kFixture, kOracle };

[[nodiscard]] std::string_view to_string(BackendKind kind);
[[nodiscard]] std::optional<BackendKind> parse_backend_kind(std::string_view name);

inline constexpr std::string_view kApiKeyEnv = "CLICKLAYOUT_LLM_API_KEY";
inline constexpr std::string_view kEndpointEnv = "CLICKLAYOUT_LLM_ENDPOINT";

struct BackendConfig {
  BackendKind kind = BackendKind::kOracle;

  // remote
  std::string endpoint;
  std::string model;
  std::string api_key;  // falls back to CLICKLAYOUT_LLM_API_KEY when empty
  double temperature = 0.0;
  double regeneration_temperature = 0.7;
  std::chrono::milliseconds timeout{60000};
  int max_retries = 3;
  std::size_t inflight_cap = 4;

  // fixture
  std::filesystem::path fixture_path;
};

/// Throws Error(kArgument) when required fields for `kind` are missing.
void validate_backend_config(const BackendConfig& config);

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;

  /// Returns the model's continuation of `prompt`.
  virtual std::string complete(const Prompt& prompt, double temperature) = 0;
};

/// Chat-completion client. The preamble travels as the system message and
/// the prompt body, unmodified, as the user message.
class RemoteBackend final : public CompletionBackend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit RemoteBackend(BackendConfig config, Sleeper sleep = {});

  std::string complete(const Prompt& prompt, double temperature) override;

  [[nodiscard]] nlohmann::json request_body(const Prompt& prompt, double temperature) const;

  /// Delay before retry number `retry` (0-based): 0.5s, 1s, 2s, ...
  [[nodiscard]] static std::chrono::milliseconds backoff(int retry);

 private:
  BackendConfig config_;
  Sleeper sleep_;
};

/// Replays recorded completions keyed by prompt hash.
class FixtureBackend final : public CompletionBackend {
 public:
  explicit FixtureBackend(std::map<std::string, std::string> responses);
  static FixtureBackend from_file(const std::filesystem::path& path);

  std::string complete(const Prompt& prompt, double temperature) override;

  /// Hex SHA-256 of the flat prompt text. Non-zero temperatures are folded
  /// into the hashed text so regenerations get their own entries.
  [[nodiscard]] static std::string fixture_key(std::string_view prompt_text, double temperature);

 private:
  std::map<std::string, std::string> responses_;
};

/// Forwards to another backend and writes every exchange to a fixture file.
class RecordingBackend final : public CompletionBackend {
 public:
  RecordingBackend(std::unique_ptr<CompletionBackend> inner, std::filesystem::path fixture_path);

  std::string complete(const Prompt& prompt, double temperature) override;

 private:
  std::unique_ptr<CompletionBackend> inner_;
  std::filesystem::path path_;
  std::mutex mu_;
  std::map<std::string, std::string> recorded_;
};

/// Answers the prompt's open query with interpret_instruction.
class OracleBackend final : public CompletionBackend {
 public:
  std::string complete(const Prompt& prompt, double temperature) override;
};

[[nodiscard]] std::unique_ptr<CompletionBackend> make_backend(const BackendConfig& config);

/// One-shot completion at the configured temperature.
[[nodiscard]] std::string complete(const BackendConfig& config, const Prompt& prompt);

[[nodiscard]] std::string sha256_hex(std::string_view data);

}  // namespace clicklayout
