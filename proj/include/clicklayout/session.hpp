#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "clicklayout/instruction.hpp"
#include "clicklayout/llm_backend.hpp"
#include "clicklayout/prompt_engine.hpp"
#include "clicklayout/render.hpp"
#include "clicklayout/scene_graph.hpp"

namespace clicklayout {

struct ImageSize {
  int width = 1000;
  int height = 1000;
};

struct HistoryEntry {
  std::string instruction_text;  // normalized canonical form
  std::string chain_of_thought;
  SceneGraph before;
  SceneGraph after;
  std::string timestamp;  // ISO-8601 UTC
};

struct Session {
  std::string id;
  SceneGraph initial;
  SceneGraph current;
  std::vector<HistoryEntry> history;
  ImageSize image;
};

[[nodiscard]] nlohmann::json history_entry_to_json(const HistoryEntry& entry);
[[nodiscard]] nlohmann::json session_to_json(const Session& session);

struct EditResult {
  SceneGraph after;
  std::string chain_of_thought;
  EditDiff diff;
};

struct ServiceOptions {
  BackendConfig backend;
  /// Used when the oracle rejects an instruction.
  std::optional<BackendConfig> fallback;
  ExampleStore store;
  PromptOptions prompt;
  RenderConfig render;
  /// Enables one append-only `<session id>.jsonl` journal per session.
  std::optional<std::filesystem::path> journal_dir;
  /// Timestamp source; defaults to the system clock.
  std::function<std::string()> clock;
};

/// In-memory session table. Operations on one session are serialized;
/// different sessions proceed in parallel. Every mutating call either
/// commits fully or leaves the session untouched.
class SessionManager {
 public:
  /// Backends are built from the options unless given explicitly.
  explicit SessionManager(ServiceOptions options,
                          std::unique_ptr<CompletionBackend> backend = nullptr,
                          std::unique_ptr<CompletionBackend> fallback = nullptr);

  std::string create_session(const SceneGraph& initial, ImageSize image = {});

  [[nodiscard]] SceneGraph layout(const std::string& id) const;
  [[nodiscard]] Session snapshot(const std::string& id) const;
  [[nodiscard]] std::vector<HistoryEntry> history(const std::string& id) const;
  [[nodiscard]] std::vector<std::string> session_ids() const;

  EditResult apply_instruction(const std::string& id, const MultimodalInstruction& instruction);
  /// Pixel-unit text is normalized with the session's image size.
  EditResult apply_instruction_text(const std::string& id, std::string_view text);
  EditResult reload_last(const std::string& id);
  SceneGraph undo(const std::string& id);

  [[nodiscard]] std::string preview_svg(const std::string& id) const;
  [[nodiscard]] GeneratedImage generate(const std::string& id) const;

  /// Rebuilds sessions from journal files. Returns how many were restored.
  std::size_t restore_from_journal(const std::filesystem::path& dir);

  [[nodiscard]] const ServiceOptions& options() const { return options_; }

 private:
  struct Slot {
    mutable std::mutex mu;
    Session session;
  };

  struct Outcome {
    SceneGraph after;
    std::string chain_of_thought;
  };

  [[nodiscard]] std::shared_ptr<Slot> find(const std::string& id) const;
  Outcome run(const SceneGraph& current, const std::string& instruction_text, double temperature);
  Outcome run_prompt(CompletionBackend& backend, const SceneGraph& current,
                     const std::string& instruction_text, double temperature);
  void journal(const std::string& id, const nlohmann::json& event) const;
  [[nodiscard]] std::string now() const;
  std::string fresh_id();

  ServiceOptions options_;
  std::unique_ptr<CompletionBackend> backend_;
  std::unique_ptr<CompletionBackend> fallback_;

  mutable std::shared_mutex table_mu_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  mutable std::mutex journal_mu_;
  std::mutex id_mu_;
};

}  // namespace clicklayout
