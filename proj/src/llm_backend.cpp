#include "clicklayout/llm_backend.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "clicklayout/error.hpp"
#include "clicklayout/http_client.hpp"
#include "clicklayout/instruction.hpp"
#include "clicklayout/interpreter.hpp"

namespace clicklayout {

using nlohmann::json;

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::kRemote: return "remote";
    case BackendKind::kFixture: return "fixture";
    case BackendKind::kOracle: return "oracle";
  }
  return "oracle";
}

std::optional<BackendKind> parse_backend_kind(std::string_view name) {
  if (name == "remote") return BackendKind::kRemote;
  if (name == "fixture") return BackendKind::kFixture;
  if (name == "oracle") return BackendKind::kOracle;
  return std::nullopt;
}

void validate_backend_config(const BackendConfig& config) {
  if (config.temperature < 0.0 || config.regeneration_temperature < 0.0) {
    throw Error(ErrorKind::kArgument, "temperature must be >= 0");
  }
  if (config.max_retries < 0) throw Error(ErrorKind::kArgument, "max retries must be >= 0");
  switch (config.kind) {
    case BackendKind::kRemote:
      if (config.endpoint.empty()) throw Error(ErrorKind::kArgument, "remote backend needs an endpoint");
      if (config.model.empty()) throw Error(ErrorKind::kArgument, "remote backend needs a model id");
      (void)http::parse_endpoint(config.endpoint);
      break;
    case BackendKind::kFixture:
      if (config.fixture_path.empty()) {
        throw Error(ErrorKind::kArgument, "fixture backend needs a fixture path");
      }
      break;
    case BackendKind::kOracle:
      break;
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::kArgument, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

// ---------------------------------------------------------------------------
// RemoteBackend

RemoteBackend::RemoteBackend(BackendConfig config, Sleeper sleep)
    : config_(std::move(config)), sleep_(std::move(sleep)) {
  validate_backend_config(config_);
  if (config_.api_key.empty()) {
    if (const char* key = std::getenv(std::string(kApiKeyEnv).c_str())) config_.api_key = key;
  }
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  http::InflightLimiter::instance().set_cap(config_.inflight_cap);
}

std::chrono::milliseconds RemoteBackend::backoff(int retry) {
  return std::chrono::milliseconds(500LL << retry);
}

json RemoteBackend::request_body(const Prompt& prompt, double temperature) const {
  return {{"model", config_.model},
          {"messages", json::array({{{"role", "system"}, {"content", prompt.preamble}},
                                    {{"role", "user"}, {"content", prompt.body}}})},
          {"temperature", temperature}};
}

std::string RemoteBackend::complete(const Prompt& prompt, double temperature) {
  const http::Endpoint endpoint = http::parse_endpoint(config_.endpoint);
  const std::string body = request_body(prompt, temperature).dump();
  http::PostOptions options;
  options.timeout = config_.timeout;
  if (!config_.api_key.empty()) options.headers["Authorization"] = "Bearer " + config_.api_key;

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    std::optional<http::Response> response;
    {
      auto slot = http::InflightLimiter::instance().acquire(endpoint.origin);
      response = http::post(endpoint, body, "application/json", options);
    }
    if (response && response->status >= 200 && response->status < 300) {
      json j = json::parse(response->body, nullptr, false);
      if (j.is_discarded()) throw Error(ErrorKind::kProtocol, "completion response is not JSON");
      try {
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const json::exception&) {
        throw Error(ErrorKind::kProtocol,
                    "completion response lacks choices[0].message.content");
      }
    }
    if (response && response->status < 500) {
      throw Error(ErrorKind::kTransport, "completion endpoint returned HTTP " +
                                             std::to_string(response->status) + ": " +
                                             response->body.substr(0, 200));
    }
    last_error = response ? "HTTP " + std::to_string(response->status)
                          : "no response from " + endpoint.url();
    if (attempt < config_.max_retries) sleep_(backoff(attempt));
  }
  throw Error(ErrorKind::kTransport, "completion failed after " +
                                         std::to_string(config_.max_retries + 1) +
                                         " attempts: " + last_error);
}

// ---------------------------------------------------------------------------
// FixtureBackend

namespace {

std::map<std::string, std::string> read_fixture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  json j = json::parse(buf.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorKind::kParse, "fixture file " + path.string() + " is not a JSON object");
  }
  std::map<std::string, std::string> out;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string()) {
      throw Error(ErrorKind::kParse, "fixture entry " + key + " is not a string");
    }
    out.emplace(key, value.get<std::string>());
  }
  return out;
}

}  // namespace

FixtureBackend::FixtureBackend(std::map<std::string, std::string> responses)
    : responses_(std::move(responses)) {}

FixtureBackend FixtureBackend::from_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::kIo, "fixture file not found: " + path.string());
  }
  return FixtureBackend(read_fixture(path));
}

std::string FixtureBackend::fixture_key(std::string_view prompt_text, double temperature) {
  if (temperature == 0.0) return sha256_hex(prompt_text);
  char tag[64];
  std::snprintf(tag, sizeof tag, "\n[temperature=%.2f]", temperature);
  return sha256_hex(std::string(prompt_text) + tag);
}

std::string FixtureBackend::complete(const Prompt& prompt, double temperature) {
  const std::string key = fixture_key(prompt.text(), temperature);
  auto it = responses_.find(key);
  if (it == responses_.end()) {
    throw Error(ErrorKind::kUnknownPrompt, "no recorded response for prompt " + key);
  }
  return it->second;
}

// ---------------------------------------------------------------------------
// RecordingBackend

RecordingBackend::RecordingBackend(std::unique_ptr<CompletionBackend> inner,
                                   std::filesystem::path fixture_path)
    : inner_(std::move(inner)), path_(std::move(fixture_path)), recorded_(read_fixture(path_)) {}

std::string RecordingBackend::complete(const Prompt& prompt, double temperature) {
  std::string response = inner_->complete(prompt, temperature);
  std::lock_guard lock(mu_);
  recorded_[FixtureBackend::fixture_key(prompt.text(), temperature)] = response;
  json j(recorded_);
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write fixture file " + path_.string());
  out << j.dump(2) << '\n';
  return response;
}

// ---------------------------------------------------------------------------
// OracleBackend

std::string OracleBackend::complete(const Prompt& prompt, double /*temperature*/) {
  const QuerySections query = extract_query(prompt.body);
  const SceneGraph input = parse_scene_graph(query.input_layout);
  const MultimodalInstruction instruction = parse_instruction_text(query.instruction);
  if (instruction.units() != Units::kNormalized) {
    throw Error(ErrorKind::kUnsupportedInstruction,
                "oracle needs normalized coordinates in the prompt");
  }
  const Interpretation result = interpret_instruction(input, instruction);
  return render_answer(result.chain_of_thought, result.output);
}

// ---------------------------------------------------------------------------

std::unique_ptr<CompletionBackend> make_backend(const BackendConfig& config) {
  validate_backend_config(config);
  switch (config.kind) {
    case BackendKind::kRemote: return std::make_unique<RemoteBackend>(config);
    case BackendKind::kFixture:
      return std::make_unique<FixtureBackend>(FixtureBackend::from_file(config.fixture_path));
    case BackendKind::kOracle: return std::make_unique<OracleBackend>();
  }
  return std::make_unique<OracleBackend>();
}

std::string complete(const BackendConfig& config, const Prompt& prompt) {
  return make_backend(config)->complete(prompt, config.temperature);
}

}  // namespace clicklayout
