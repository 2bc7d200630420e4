#include "clicklayout/json_io.hpp"

#include "clicklayout/error.hpp"

namespace clicklayout {

using nlohmann::json;

json layout_to_json(const SceneGraph& graph) {
  return json::parse(serialize_scene_graph(graph));
}

SceneGraph layout_from_json(const json& j) {
  return parse_scene_graph(j.dump(-1, ' ', false, json::error_handler_t::replace));
}

namespace {

json rect_json(const NormRect& r) {
  return {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
}

double number_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    throw Error(ErrorKind::kArgument, std::string("token field '") + key + "' must be a number");
  }
  return it->get<double>();
}

}  // namespace

json diff_to_json(const EditDiff& diff) {
  json moved = json::array();
  for (const auto& m : diff.moved) {
    moved.push_back({{"unique_id", m.unique_id}, {"before", rect_json(m.before)},
                     {"after", rect_json(m.after)}});
  }
  json added = json::array();
  for (const auto& a : diff.added) {
    added.push_back({{"unique_id", a.unique_id}, {"name", a.name}, {"box", rect_json(a.box)}});
  }
  json relabeled = json::array();
  for (const auto& r : diff.relabeled) {
    relabeled.push_back({{"unique_id", r.unique_id}, {"before", r.before}, {"after", r.after}});
  }
  return {{"moved", moved},
          {"added", added},
          {"removed", diff.removed},
          {"relabeled", relabeled},
          {"prompt_changed", diff.prompt_changed}};
}

json instruction_to_json(const MultimodalInstruction& instr) {
  json tokens = json::array();
  for (const auto& token : instr.tokens()) {
    if (const auto* t = std::get_if<TextSpan>(&token)) {
      tokens.push_back({{"type", "text"}, {"text", t->text}});
    } else if (const auto* b = std::get_if<BoxRef>(&token)) {
      json j = rect_json(b->rect);
      j["type"] = "box";
      j["symbol"] = b->symbol;
      tokens.push_back(std::move(j));
    } else {
      const auto& p = std::get<PointRef>(token);
      tokens.push_back({{"type", "point"}, {"x", p.point.x}, {"y", p.point.y}, {"symbol", p.symbol}});
    }
  }
  return {{"units", instr.units() == Units::kPixels ? "pixels" : "normalized"},
          {"tokens", tokens}};
}

MultimodalInstruction instruction_from_json(const json& j) {
  const json* list = &j;
  Units units = Units::kNormalized;
  if (j.is_object()) {
    const std::string u = j.value("units", "normalized");
    if (u == "pixels") {
      units = Units::kPixels;
    } else if (u != "normalized") {
      throw Error(ErrorKind::kArgument, "units must be 'pixels' or 'normalized'");
    }
    auto it = j.find("tokens");
    if (it == j.end()) throw Error(ErrorKind::kArgument, "missing 'tokens'");
    list = &*it;
  }
  if (!list->is_array()) throw Error(ErrorKind::kArgument, "'tokens' must be an array");

  std::vector<InstructionToken> tokens;
  for (const auto& t : *list) {
    if (!t.is_object()) throw Error(ErrorKind::kArgument, "token must be an object");
    const std::string type = t.value("type", "");
    const std::string symbol = t.value("symbol", "");
    if (type == "text") {
      auto text = t.find("text");
      if (text == t.end() || !text->is_string()) {
        throw Error(ErrorKind::kArgument, "text token needs a string 'text'");
      }
      tokens.emplace_back(TextSpan{text->get<std::string>()});
    } else if (type == "box") {
      tokens.emplace_back(BoxRef{{number_field(t, "x"), number_field(t, "y"),
                                  number_field(t, "width"), number_field(t, "height")},
                                 symbol});
    } else if (type == "point") {
      tokens.emplace_back(PointRef{{number_field(t, "x"), number_field(t, "y")}, symbol});
    } else {
      throw Error(ErrorKind::kArgument, "unknown token type '" + type + "'");
    }
  }
  return MultimodalInstruction(std::move(tokens), units);
}

}  // namespace clicklayout
