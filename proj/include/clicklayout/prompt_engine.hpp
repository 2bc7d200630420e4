#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clicklayout/scene_graph.hpp"

namespace clicklayout {

namespace markers {
inline constexpr std::string_view kInputLayout = "INPUT LAYOUT:";
inline constexpr std::string_view kInstruction = "INSTRUCTION:";
inline constexpr std::string_view kReasoning = "REASONING:";
inline constexpr std::string_view kOutputLayout = "OUTPUT LAYOUT:";
}  // namespace markers

struct FewShotExample {
  std::string kind;  // modality tag: "text", "text+box", "text+box+point", ...
  std::string instruction;
  std::string chain_of_thought;
  SceneGraph input_scene_graph;
  SceneGraph output_scene_graph;

  friend bool operator==(const FewShotExample&, const FewShotExample&) = default;
};

struct ExampleStore {
  std::string preamble;
  std::vector<FewShotExample> examples;
};

[[nodiscard]] const std::string& default_preamble();

/// Path of the example store shipped with the repository.
[[nodiscard]] std::filesystem::path default_store_path();

/// Reads a JSON array of examples. Every example is validated; errors name
/// the example index and the offending field. Order is preserved.
[[nodiscard]] ExampleStore load_example_store(const std::filesystem::path& path,
                                              std::optional<std::string> preamble = {});
[[nodiscard]] ExampleStore parse_example_store(std::string_view json_text,
                                               std::optional<std::string> preamble = {});

/// Answers to the fixed question set each reasoning block walks through.
struct ChainOfThought {
  std::string operation;
  std::string moved;
  std::string not_moved;
  std::string destination;
  std::string size_change;
  std::string appearance_change;
};

/// Renders the question set. The question wording is kept byte-for-byte
/// from the hand-annotated examples, typos included, so fixtures stay stable.
[[nodiscard]] std::string render_chain_of_thought(const ChainOfThought& answers);

inline constexpr std::string_view kOperationQuestion = "Which operation is being performed?";

[[nodiscard]] std::size_t estimate_tokens(std::string_view text);

struct PromptOptions {
  /// Upper bound on estimate_tokens(text()). Examples are dropped from the
  /// front of the store until the prompt fits.
  std::optional<std::size_t> token_budget;
};

struct Prompt {
  std::string preamble;
  std::string body;  // examples followed by the open query
  std::size_t examples_used = 0;
  std::size_t token_estimate = 0;

  /// Flat prompt: preamble, blank line, body.
  [[nodiscard]] std::string text() const;
};

[[nodiscard]] Prompt build_prompt(const ExampleStore& store, const SceneGraph& input,
                                  std::string_view instruction_text,
                                  const PromptOptions& options = {});

/// REASONING and OUTPUT LAYOUT sections as a completion would contain them.
[[nodiscard]] std::string render_answer(std::string_view chain_of_thought,
                                        const SceneGraph& output);

struct LlmTurn {
  std::string chain_of_thought;
  SceneGraph output_graph;
  std::string raw;
};

/// Extracts the reasoning and the output layout from a model reply.
/// Throws ExtractionError (kExtraction when no usable JSON block exists,
/// kValidation when the block is not a valid layout).
[[nodiscard]] LlmTurn parse_llm_response(std::string_view raw);

/// Byte ranges [begin, end) of top-level balanced `{...}` blocks. Braces
/// inside JSON string literals do not count.
struct TextRange {
  std::size_t begin;
  std::size_t end;
  friend bool operator==(const TextRange&, const TextRange&) = default;
};
[[nodiscard]] std::vector<TextRange> find_balanced_blocks(std::string_view text);

struct QuerySections {
  std::string input_layout;
  std::string instruction;
};

/// The last INPUT LAYOUT / INSTRUCTION pair of a prompt body, i.e. the
/// open query. Throws kExtraction if the prompt has none.
[[nodiscard]] QuerySections extract_query(std::string_view prompt_text);

}  // namespace clicklayout
