#include "clicklayout/prompt_engine.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "clicklayout/error.hpp"
#include "clicklayout/json_io.hpp"

#ifndef CLICKLAYOUT_DATA_DIR
#define CLICKLAYOUT_DATA_DIR "data"
#endif

namespace clicklayout {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kAllMarkers = {
    markers::kInputLayout, markers::kInstruction, markers::kReasoning, markers::kOutputLayout};

std::string trim(std::string_view s) {
  auto is_ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
  return std::string(s);
}

// Marker occurrences at the start of a line, which is the only place the
// prompt builder ever writes them.
bool has_line_marker(std::string_view text) {
  std::size_t line = 0;
  while (line <= text.size()) {
    std::string_view rest = text.substr(line);
    for (auto m : kAllMarkers) {
      if (rest.starts_with(m)) return true;
    }
    const std::size_t nl = text.find('\n', line);
    if (nl == std::string_view::npos) break;
    line = nl + 1;
  }
  return false;
}

std::string string_field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorKind::kValidation, where + ": missing field '" + key + "'");
  if (!it->is_string()) {
    throw Error(ErrorKind::kValidation, where + ": field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

SceneGraph graph_field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorKind::kValidation, where + ": missing field '" + key + "'");
  try {
    return layout_from_json(*it);
  } catch (const Error& e) {
    throw Error(ErrorKind::kValidation, where + ": " + key + ": " + e.what());
  }
}

FewShotExample decode_example(const json& j, std::size_t index) {
  const std::string where = "example " + std::to_string(index);
  if (!j.is_object()) throw Error(ErrorKind::kValidation, where + ": must be an object");
  FewShotExample ex;
  ex.kind = string_field(j, "type", where);
  ex.instruction = string_field(j, "instruction", where);
  ex.chain_of_thought = string_field(j, "chain_of_thought", where);
  ex.input_scene_graph = graph_field(j, "input_scene_graph", where);
  ex.output_scene_graph = graph_field(j, "output_scene_graph", where);

  if (trim(ex.kind).empty()) throw Error(ErrorKind::kValidation, where + ": type: empty");
  if (trim(ex.instruction).empty()) {
    throw Error(ErrorKind::kValidation, where + ": instruction: empty");
  }
  if (ex.chain_of_thought.find(kOperationQuestion) == std::string::npos) {
    throw Error(ErrorKind::kValidation,
                where + ": chain_of_thought: missing the operation question");
  }
  for (const auto* field : {&ex.instruction, &ex.chain_of_thought}) {
    if (has_line_marker(*field)) {
      throw Error(ErrorKind::kValidation, where + ": text starts a line with a section marker");
    }
  }
  return ex;
}

void append_section(std::string& out, std::string_view marker, std::string_view content) {
  out += marker;
  out += '\n';
  out += content;
  out += '\n';
}

std::string render_body(const std::vector<FewShotExample>& examples, std::size_t first,
                        const std::string& query_layout, std::string_view instruction) {
  std::string body;
  for (std::size_t i = first; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    append_section(body, markers::kInputLayout, serialize_scene_graph(ex.input_scene_graph));
    append_section(body, markers::kInstruction, ex.instruction);
    body += render_answer(ex.chain_of_thought, ex.output_scene_graph);
    body += "\n\n";
  }
  append_section(body, markers::kInputLayout, query_layout);
  append_section(body, markers::kInstruction, instruction);
  body += markers::kReasoning;
  return body;
}

// Scans one block starting at text[start] == '{'. Returns one past the
// matching '}' or npos when the block never closes.
std::size_t match_block(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

bool looks_like_layout(std::string_view block) {
  json j = json::parse(block.begin(), block.end(), nullptr, false);
  return !j.is_discarded() && j.is_object() && j.contains("boxes");
}

std::size_t find_line_marker(std::string_view text, std::string_view marker,
                             std::size_t from = 0) {
  for (std::size_t pos = text.find(marker, from); pos != std::string_view::npos;
       pos = text.find(marker, pos + 1)) {
    if (pos == 0 || text[pos - 1] == '\n') return pos;
  }
  return std::string_view::npos;
}

std::size_t rfind_line_marker(std::string_view text, std::string_view marker) {
  for (std::size_t pos = text.rfind(marker); pos != std::string_view::npos;
       pos = pos == 0 ? std::string_view::npos : text.rfind(marker, pos - 1)) {
    if (pos == 0 || text[pos - 1] == '\n') return pos;
  }
  return std::string_view::npos;
}

}  // namespace

const std::string& default_preamble() {
  static const std::string preamble =
      "You edit image layouts. A layout is a JSON object with a scene \"prompt\" and a list of "
      "\"boxes\"; each box has a \"unique_id\", a short \"name\" and a \"box\" whose x, y, width "
      "and height are fractions of the image size measured from the top-left corner.\n"
      "Instructions mix words with geometry drawn by the user: {x: X, y: Y, width: W, height: "
      "H} is a box the user drew, usually around an existing object, and {x: X, y: Y} is a "
      "point the user clicked, usually a destination.\n"
      "For every request, answer the reasoning questions first, then give the complete edited "
      "layout as JSON. Keep the unique_id of every object that survives the edit, leave objects "
      "the instruction does not mention exactly as they are, and give new objects a fresh "
      "unique_id.\n"
      "Worked examples follow, then the request to complete.";
  return preamble;
}

std::filesystem::path default_store_path() {
  return std::filesystem::path(CLICKLAYOUT_DATA_DIR) / "examples" / "default_store.json";
}

ExampleStore parse_example_store(std::string_view json_text, std::optional<std::string> preamble) {
  json j;
  try {
    j = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed example store: ") + e.what(), e.byte);
  }
  if (!j.is_array()) throw Error(ErrorKind::kValidation, "example store must be a JSON array");
  if (j.empty()) throw Error(ErrorKind::kValidation, "store must contain ≥1 example");

  ExampleStore store;
  store.preamble = preamble ? std::move(*preamble) : default_preamble();
  if (has_line_marker(store.preamble)) {
    throw Error(ErrorKind::kValidation, "preamble starts a line with a section marker");
  }
  store.examples.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) store.examples.push_back(decode_example(j[i], i));
  return store;
}

ExampleStore load_example_store(const std::filesystem::path& path,
                                std::optional<std::string> preamble) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open example store " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_example_store(buf.str(), std::move(preamble));
}

std::string render_chain_of_thought(const ChainOfThought& a) {
  std::string out;
  out += "Q: Which operation is being performed? A: " + a.operation + ".\n";
  out += "Q: Which objects are being moved? A: " + a.moved + ".\n";
  out += "Q:Which objects are not being moved? A: " + a.not_moved + ".\n";
  out += "Q: Where are they being moved to? A: " + a.destination + ".\n";
  out += "Q: Does the size need to change? A: " + a.size_change +
         ". Is an objects apperance changing? " + a.appearance_change + ".";
  return out;
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

std::string Prompt::text() const { return preamble + "\n\n" + body; }

Prompt build_prompt(const ExampleStore& store, const SceneGraph& input,
                    std::string_view instruction_text, const PromptOptions& options) {
  const std::string query_layout = serialize_scene_graph(input);
  Prompt prompt;
  prompt.preamble = store.preamble;
  for (std::size_t first = 0; first <= store.examples.size(); ++first) {
    prompt.body = render_body(store.examples, first, query_layout, instruction_text);
    prompt.examples_used = store.examples.size() - first;
    prompt.token_estimate = estimate_tokens(prompt.text());
    if (!options.token_budget || prompt.token_estimate <= *options.token_budget) break;
  }
  return prompt;
}

std::string render_answer(std::string_view chain_of_thought, const SceneGraph& output) {
  std::string out;
  append_section(out, markers::kReasoning, chain_of_thought);
  out += markers::kOutputLayout;
  out += '\n';
  out += serialize_scene_graph(output);
  return out;
}

std::vector<TextRange> find_balanced_blocks(std::string_view text) {
  std::vector<TextRange> blocks;
  std::size_t pos = text.find('{');
  while (pos != std::string_view::npos) {
    const std::size_t end = match_block(text, pos);
    if (end == std::string_view::npos) {
      pos = text.find('{', pos + 1);
      continue;
    }
    blocks.push_back({pos, end});
    pos = text.find('{', end);
  }
  return blocks;
}

LlmTurn parse_llm_response(std::string_view raw) {
  LlmTurn turn;
  turn.raw = std::string(raw);

  const std::size_t output_at = raw.find(markers::kOutputLayout);
  const std::size_t reasoning_at =
      output_at == std::string_view::npos ? raw.find(markers::kReasoning)
                                          : raw.substr(0, output_at).find(markers::kReasoning);

  if (output_at != std::string_view::npos) {
    const std::size_t from =
        reasoning_at == std::string_view::npos ? 0 : reasoning_at + markers::kReasoning.size();
    turn.chain_of_thought = trim(raw.substr(from, output_at - from));
  } else {
    const std::size_t brace = raw.find('{');
    std::string_view head = raw.substr(0, brace);
    if (reasoning_at != std::string_view::npos && reasoning_at < head.size()) {
      head.remove_prefix(reasoning_at + markers::kReasoning.size());
    }
    turn.chain_of_thought = trim(head);
  }

  const auto blocks = find_balanced_blocks(raw);
  const TextRange* chosen = nullptr;
  if (output_at != std::string_view::npos) {
    for (const auto& b : blocks) {
      if (b.begin >= output_at) {
        chosen = &b;
        break;
      }
    }
  } else {
    for (auto it = blocks.rbegin(); it != blocks.rend() && !chosen; ++it) {
      if (looks_like_layout(raw.substr(it->begin, it->end - it->begin))) chosen = &*it;
    }
    if (!chosen && !blocks.empty()) chosen = &blocks.back();
  }
  if (!chosen) {
    throw ExtractionError(ErrorKind::kExtraction, "no balanced JSON block in model response",
                          turn.raw);
  }

  const std::string_view block = raw.substr(chosen->begin, chosen->end - chosen->begin);
  try {
    turn.output_graph = parse_scene_graph(block);
  } catch (const ParseError& e) {
    throw ExtractionError(ErrorKind::kExtraction, e.what(), turn.raw);
  } catch (const ValidationError& e) {
    throw ExtractionError(ErrorKind::kValidation, e.what(), turn.raw);
  }
  return turn;
}

QuerySections extract_query(std::string_view prompt_text) {
  const std::size_t input_at = rfind_line_marker(prompt_text, markers::kInputLayout);
  if (input_at == std::string_view::npos) {
    throw ExtractionError(ErrorKind::kExtraction, "prompt has no query layout",
                          std::string(prompt_text));
  }
  const std::size_t instr_at = find_line_marker(prompt_text, markers::kInstruction, input_at);
  if (instr_at == std::string_view::npos) {
    throw ExtractionError(ErrorKind::kExtraction, "prompt has no query instruction",
                          std::string(prompt_text));
  }
  std::size_t instr_end = find_line_marker(prompt_text, markers::kReasoning, instr_at);
  if (instr_end == std::string_view::npos) instr_end = prompt_text.size();

  const std::size_t layout_from = input_at + markers::kInputLayout.size();
  const std::size_t instr_from = instr_at + markers::kInstruction.size();
  return {trim(prompt_text.substr(layout_from, instr_at - layout_from)),
          trim(prompt_text.substr(instr_from, instr_end - instr_from))};
}

}  // namespace clicklayout
