#include "clicklayout/interpreter.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <sstream>

#include "clicklayout/error.hpp"
#include "clicklayout/prompt_engine.hpp"

namespace clicklayout {

namespace {

struct Lexeme {
  enum class Kind { kWord, kBox, kPoint } kind;
  std::string word;
  NormRect rect{};
  NormPoint point{};

  [[nodiscard]] bool is(std::string_view w) const { return kind == Kind::kWord && word == w; }
};

using Clause = std::vector<Lexeme>;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string strip_punct(std::string_view w) {
  static constexpr std::string_view kPunct = ".,!?;:\"'()";
  while (!w.empty() && kPunct.find(w.front()) != std::string_view::npos) w.remove_prefix(1);
  while (!w.empty() && kPunct.find(w.back()) != std::string_view::npos) w.remove_suffix(1);
  return std::string(w);
}

std::vector<Lexeme> lex(const MultimodalInstruction& instr) {
  std::vector<Lexeme> out;
  for (const auto& token : instr.tokens()) {
    if (const auto* t = std::get_if<TextSpan>(&token)) {
      std::istringstream words(t->text);
      std::string w;
      while (words >> w) {
        std::string clean = lower(strip_punct(w));
        if (!clean.empty()) out.push_back({Lexeme::Kind::kWord, std::move(clean)});
      }
    } else if (const auto* b = std::get_if<BoxRef>(&token)) {
      out.push_back({Lexeme::Kind::kBox, {}, b->rect});
    } else {
      out.push_back({Lexeme::Kind::kPoint, {}, {}, std::get<PointRef>(token).point});
    }
  }
  return out;
}

std::vector<Clause> split_clauses(const std::vector<Lexeme>& lexemes) {
  std::vector<Clause> clauses(1);
  for (const auto& l : lexemes) {
    if (l.is("and")) {
      clauses.emplace_back();
    } else {
      clauses.back().push_back(l);
    }
  }
  return clauses;
}

[[noreturn]] void unsupported(const std::string& why) {
  throw Error(ErrorKind::kUnsupportedInstruction, "instruction not understood: " + why);
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string render_point(const NormPoint& p) {
  return serialize_instruction(MultimodalInstruction({PointRef{p, {}}}));
}

std::string render_rect(const NormRect& r) {
  return serialize_instruction(MultimodalInstruction({BoxRef{r, {}}}));
}

// One decoded clause plus what the reasoning block should say about it.
struct Step {
  EditOp op;
  std::string operation;
  std::optional<std::string> destination;
};

class ClauseDecoder {
 public:
  explicit ClauseDecoder(const SceneGraph& input) : input_(input) {}

  // Id the next added box will receive, taken from the graph as edited so far.
  void set_next_new_id(ObjectId id) { next_new_id_ = id; }

  Step decode(const Clause& c) {
    if (c.empty()) unsupported("empty clause");
    const std::string& verb = c[0].word;
    if (c[0].is("move")) return move(c);
    if (c[0].is("add")) return add(c);
    if (c[0].is("delete") || c[0].is("remove")) return remove(c);
    if (c[0].is("make")) return make(c);
    if (c[0].is("change")) return change(c);
    if (c[0].is("resize")) return resize(c);
    unsupported(c[0].kind == Lexeme::Kind::kWord ? "unknown verb '" + verb + "'"
                                                 : "clause must start with a verb");
  }

 private:
  ObjectId ref(const Lexeme& l) {
    if (l.kind == Lexeme::Kind::kBox) {
      subject_ = resolve_reference(input_, l.rect);
      return *subject_;
    }
    if (l.is("it")) {
      if (!subject_) unsupported("'it' has nothing to refer to");
      return *subject_;
    }
    unsupported("expected a drawn box or 'it'");
  }

  static std::string name_after_article(const Clause& c, std::size_t from) {
    if (from >= c.size() || !(c[from].is("a") || c[from].is("an"))) {
      unsupported("expected 'a' or 'an' before the object name");
    }
    std::vector<std::string> words;
    for (std::size_t i = from + 1; i < c.size(); ++i) {
      if (c[i].kind != Lexeme::Kind::kWord) unsupported("object name may not contain geometry");
      words.push_back(c[i].word);
    }
    if (words.empty()) unsupported("missing object name");
    return join(words, " ");
  }

  Step move(const Clause& c) {
    if (c.size() != 4 || !c[2].is("to")) unsupported("expected 'move <box> to <point|box>'");
    const ObjectId id = ref(c[1]);
    if (c[3].kind == Lexeme::Kind::kPoint) {
      return {edit::MoveToPoint{id, c[3].point}, "Move", "To " + render_point(c[3].point)};
    }
    if (c[3].kind == Lexeme::Kind::kBox) {
      return {edit::MoveToRect{id, c[3].rect}, "Move", "To " + render_rect(c[3].rect)};
    }
    unsupported("move target must be a point or a box");
  }

  Step add(const Clause& c) {
    if (c.size() < 5 || !c[c.size() - 2].is("at") || c.back().kind != Lexeme::Kind::kBox) {
      unsupported("expected 'add a <name> at <box>'");
    }
    Clause head(c.begin(), c.end() - 2);
    std::string name = name_after_article(head, 1);
    subject_ = next_new_id_;
    return {edit::Add{std::move(name), c.back().rect}, "Add", std::nullopt};
  }

  Step remove(const Clause& c) {
    if (c.size() != 2) unsupported("expected 'delete <box>'");
    return {edit::Delete{ref(c[1])}, "Delete", std::nullopt};
  }

  Step make(const Clause& c) {
    if (c.size() < 4) unsupported("expected 'make <box> a <name>'");
    const ObjectId id = ref(c[1]);
    return {edit::ChangeAppearance{id, name_after_article(c, 2)}, "Change appearance",
            std::nullopt};
  }

  Step change(const Clause& c) {
    if (c.size() < 5 || !c[2].is("to")) unsupported("expected 'change <box> to a <name>'");
    const ObjectId id = ref(c[1]);
    return {edit::ChangeAppearance{id, name_after_article(c, 3)}, "Change appearance",
            std::nullopt};
  }

  Step resize(const Clause& c) {
    if (c.size() != 4 || !c[2].is("to") || c[3].kind != Lexeme::Kind::kBox) {
      unsupported("expected 'resize <box> to <box>'");
    }
    const ObjectId id = ref(c[1]);
    return {edit::Resize{id, c[3].rect.width, c[3].rect.height}, "Resize", std::nullopt};
  }

  const SceneGraph& input_;
  ObjectId next_new_id_ = 0;
  std::optional<ObjectId> subject_;
};

std::multiset<std::string> names_of(const SceneGraph& g) {
  std::multiset<std::string> out;
  for (const auto& b : g.boxes) out.insert(b.name);
  return out;
}

}  // namespace

std::string describe_scene(const SceneGraph& graph) {
  if (graph.boxes.empty()) return "An empty scene";
  std::vector<std::string> names;
  for (const auto& b : graph.boxes) names.push_back(b.name);
  return "A scene with " + join(names, ", ");
}

Interpretation interpret_instruction(const SceneGraph& graph,
                                     const MultimodalInstruction& instruction) {
  require_valid(graph, "input layout");
  if (instruction.units() != Units::kNormalized) {
    throw Error(ErrorKind::kArgument, "instruction must be normalized before interpretation");
  }

  ClauseDecoder decoder(graph);
  std::vector<Step> steps;
  Interpretation result;
  result.output = graph;
  for (const auto& clause : split_clauses(lex(instruction))) {
    decoder.set_next_new_id(result.output.next_id());
    steps.push_back(decoder.decode(clause));
    result.output = apply_edit(result.output, steps.back().op);
    result.ops.push_back(steps.back().op);
  }
  if (names_of(graph) != names_of(result.output)) result.output.prompt = describe_scene(result.output);

  std::vector<std::string> operations;
  std::vector<std::string> destinations;
  std::set<ObjectId> moved_ids;
  bool resized = false;
  std::vector<std::string> appearance;
  for (const auto& step : steps) {
    if (std::find(operations.begin(), operations.end(), step.operation) == operations.end()) {
      operations.push_back(step.operation);
    }
    if (step.destination) destinations.push_back(*step.destination);
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, edit::MoveToPoint> ||
                        std::is_same_v<T, edit::MoveToRect>) {
            moved_ids.insert(e.id);
          } else if constexpr (std::is_same_v<T, edit::Resize>) {
            resized = true;
          } else if constexpr (std::is_same_v<T, edit::ChangeAppearance>) {
            const ObjectBox* b = graph.find(e.id);
            appearance.push_back((b ? b->name : std::string("object")) + " becomes " + e.new_name);
          }
        },
        step.op);
  }

  std::vector<std::string> moved;
  std::vector<std::string> still;
  for (const auto& b : graph.boxes) {
    (moved_ids.contains(b.unique_id) ? moved : still).push_back(capitalize(b.name));
  }

  std::string operation = join(operations, " and ");
  std::transform(operation.begin() + 1, operation.end(), operation.begin() + 1,
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  ChainOfThought cot;
  cot.operation = operation;
  cot.moved = moved.empty() ? "None" : join(moved, ", ");
  cot.not_moved = still.empty() ? "None" : join(still, ", ");
  cot.destination = destinations.empty() ? "Nowhere" : join(destinations, ", ");
  cot.size_change = resized ? "Yes" : "No";
  cot.appearance_change = appearance.empty() ? "No" : "Yes, " + join(appearance, ", ");
  result.chain_of_thought = render_chain_of_thought(cot);
  return result;
}

}  // namespace clicklayout
