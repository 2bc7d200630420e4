#include "clicklayout/instruction.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>

#include "clicklayout/error.hpp"

namespace clicklayout {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_text(const InstructionToken& t) { return std::holds_alternative<TextSpan>(t); }

void check_geometry(const InstructionToken& token, Units units) {
  const bool normalized = units == Units::kNormalized;
  auto check_coord = [&](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0 || (normalized && v > 1.0 + kExtentEpsilon)) {
      throw Error(ErrorKind::kArgument,
                  std::string("reference coordinate ") + name + " out of range");
    }
  };
  auto check_extent = [&](double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0 || (normalized && v > 1.0 + kExtentEpsilon)) {
      throw Error(ErrorKind::kArgument, std::string("reference ") + name + " must be positive");
    }
  };
  if (const auto* b = std::get_if<BoxRef>(&token)) {
    check_coord(b->rect.x, "x");
    check_coord(b->rect.y, "y");
    check_extent(b->rect.width, "width");
    check_extent(b->rect.height, "height");
  } else if (const auto* p = std::get_if<PointRef>(&token)) {
    check_coord(p->point.x, "x");
    check_coord(p->point.y, "y");
  }
}

std::string render_number(double v, Units units) {
  char buf[64];
  if (units == Units::kPixels) {
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(std::llround(v)));
  } else {
    std::snprintf(buf, sizeof buf, "%.2f", v);
  }
  return buf;
}

std::string render_token(const InstructionToken& token, Units units) {
  if (const auto* t = std::get_if<TextSpan>(&token)) return t->text;
  if (const auto* b = std::get_if<BoxRef>(&token)) {
    return "{x: " + render_number(b->rect.x, units) + ", y: " + render_number(b->rect.y, units) +
           ", width: " + render_number(b->rect.width, units) +
           ", height: " + render_number(b->rect.height, units) + "}";
  }
  const auto& p = std::get<PointRef>(token);
  return "{x: " + render_number(p.point.x, units) + ", y: " + render_number(p.point.y, units) +
         "}";
}

// Parsing of one `{key: number, ...}` group starting at text[pos] == '{'.
struct BraceGroup {
  std::map<std::string, double> values;
  bool has_fraction = false;
  std::size_t end = 0;  // one past the closing brace
};

BraceGroup read_group(std::string_view text, std::size_t pos) {
  const std::size_t start = pos;
  BraceGroup group;
  ++pos;
  auto skip_ws = [&] {
    while (pos < text.size() && is_space(text[pos])) ++pos;
  };
  auto expect = [&](char c, const char* what) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c) {
      throw ParseError(std::string("expected ") + what + " in reference group", pos);
    }
    ++pos;
  };
  std::vector<std::string> unknown;
  for (;;) {
    skip_ws();
    if (pos >= text.size()) throw ParseError("unterminated reference group", start);
    bool quoted = text[pos] == '"';
    if (quoted) ++pos;
    const std::size_t key_start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      ++pos;
    }
    std::string key(text.substr(key_start, pos - key_start));
    if (key.empty()) throw ParseError("expected a key in reference group", pos);
    if (quoted) expect('"', "closing quote");
    expect(':', "':'");
    skip_ws();
    const std::size_t num_start = pos;
    while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) ||
                                 text[pos] == '.' || text[pos] == '-' || text[pos] == '+' ||
                                 text[pos] == 'e' || text[pos] == 'E')) {
      ++pos;
    }
    const std::string number(text.substr(num_start, pos - num_start));
    char* parse_end = nullptr;
    const double value = std::strtod(number.c_str(), &parse_end);
    if (number.empty() || parse_end != number.c_str() + number.size()) {
      throw ParseError("invalid number for key " + key, num_start);
    }
    if (number.find_first_of(".eE") != std::string::npos) group.has_fraction = true;
    if (key != "x" && key != "y" && key != "width" && key != "height") {
      unknown.push_back(key);
    } else if (!group.values.emplace(key, value).second) {
      throw ParseError("duplicate key " + key, key_start);
    }
    skip_ws();
    if (pos < text.size() && text[pos] == ',') {
      ++pos;
      continue;
    }
    expect('}', "',' or '}'");
    break;
  }
  if (!unknown.empty()) {
    std::string msg = unknown.size() == 1 ? "unknown key " : "unknown keys ";
    for (std::size_t i = 0; i < unknown.size(); ++i) msg += (i ? ", " : "") + unknown[i];
    throw ParseError(msg, start);
  }
  group.end = pos;
  return group;
}

}  // namespace

MultimodalInstruction::MultimodalInstruction(std::vector<InstructionToken> tokens, Units units)
    : units_(units) {
  std::vector<InstructionToken> merged;
  for (auto& token : tokens) {
    if (auto* t = std::get_if<TextSpan>(&token)) {
      if (t->text.find_first_of("{}") != std::string::npos) {
        throw Error(ErrorKind::kArgument, "instruction text may not contain braces");
      }
      if (t->text.empty()) continue;
      if (!merged.empty() && is_text(merged.back())) {
        std::get<TextSpan>(merged.back()).text += t->text;
        continue;
      }
    } else {
      check_geometry(token, units);
      if (!merged.empty() && !is_text(merged.back())) merged.push_back(TextSpan{" "});
    }
    merged.push_back(std::move(token));
  }
  if (merged.empty()) throw Error(ErrorKind::kArgument, "instruction has no tokens");
  if (std::all_of(merged.begin(), merged.end(), is_text)) units_ = Units::kNormalized;

  for (std::size_t i = 0; i < merged.size(); ++i) {
    auto* t = std::get_if<TextSpan>(&merged[i]);
    if (!t) continue;
    if (i > 0 && !is_space(t->text.front())) t->text.insert(t->text.begin(), ' ');
    if (i + 1 < merged.size() && !is_space(t->text.back())) t->text.push_back(' ');
  }

  std::set<std::string> used;
  for (const auto& token : merged) {
    const std::string* symbol = nullptr;
    if (const auto* b = std::get_if<BoxRef>(&token)) symbol = &b->symbol;
    if (const auto* p = std::get_if<PointRef>(&token)) symbol = &p->symbol;
    if (symbol && !symbol->empty() && !used.insert(*symbol).second) {
      throw Error(ErrorKind::kArgument, "duplicate reference symbol " + *symbol);
    }
  }
  int next_box = 1;
  int next_point = 1;
  auto fresh = [&](char prefix, int& counter) {
    std::string s;
    do {
      s = prefix + std::to_string(counter++);
    } while (used.contains(s));
    used.insert(s);
    return s;
  };
  for (auto& token : merged) {
    if (auto* b = std::get_if<BoxRef>(&token); b && b->symbol.empty()) {
      b->symbol = fresh('B', next_box);
    } else if (auto* p = std::get_if<PointRef>(&token); p && p->symbol.empty()) {
      p->symbol = fresh('P', next_point);
    }
  }
  tokens_ = std::move(merged);
}

std::string serialize_instruction(const MultimodalInstruction& instr) {
  std::string out;
  for (const auto& token : instr.tokens()) out += render_token(token, instr.units());
  return out;
}

MultimodalInstruction normalize_instruction(const MultimodalInstruction& instr,
                                            double image_width, double image_height) {
  if (!(image_width > 0.0) || !(image_height > 0.0)) {
    throw Error(ErrorKind::kArgument, "image dimensions must be positive");
  }
  if (instr.units() == Units::kNormalized) return instr;
  std::vector<InstructionToken> tokens = instr.tokens();
  for (auto& token : tokens) {
    if (auto* b = std::get_if<BoxRef>(&token)) {
      b->rect = {b->rect.x / image_width, b->rect.y / image_height, b->rect.width / image_width,
                 b->rect.height / image_height};
    } else if (auto* p = std::get_if<PointRef>(&token)) {
      p->point = {p->point.x / image_width, p->point.y / image_height};
    }
  }
  return MultimodalInstruction(std::move(tokens), Units::kNormalized);
}

MultimodalInstruction parse_instruction_text(std::string_view text) {
  struct Piece {
    std::string text;
    std::optional<BraceGroup> group;
    std::size_t offset;
  };
  std::vector<Piece> pieces;
  bool any_fraction = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t brace = text.find_first_of("{}", pos);
    if (brace == std::string_view::npos) {
      pieces.push_back({std::string(text.substr(pos)), std::nullopt, pos});
      break;
    }
    if (text[brace] == '}') throw ParseError("unmatched '}'", brace);
    if (brace > pos) pieces.push_back({std::string(text.substr(pos, brace - pos)), std::nullopt, pos});
    BraceGroup group = read_group(text, brace);
    any_fraction = any_fraction || group.has_fraction;
    pos = group.end;
    pieces.push_back({{}, std::move(group), brace});
  }

  const Units units = any_fraction ? Units::kNormalized : Units::kPixels;
  bool has_geometry = false;
  std::vector<InstructionToken> tokens;
  for (auto& piece : pieces) {
    if (!piece.group) {
      tokens.emplace_back(TextSpan{std::move(piece.text)});
      continue;
    }
    has_geometry = true;
    const auto& v = piece.group->values;
    auto has = [&](const char* k) { return v.contains(k); };
    if (v.size() == 4) {
      tokens.emplace_back(BoxRef{{v.at("x"), v.at("y"), v.at("width"), v.at("height")}, {}});
    } else if (v.size() == 2 && has("x") && has("y")) {
      tokens.emplace_back(PointRef{{v.at("x"), v.at("y")}, {}});
    } else {
      std::string keys;
      for (const auto& [k, _] : v) keys += (keys.empty() ? "" : ", ") + k;
      throw ParseError("incomplete reference keys {" + keys + "}", piece.offset);
    }
  }
  try {
    return MultimodalInstruction(std::move(tokens),
                                 has_geometry ? units : Units::kNormalized);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), 0);
  }
}

}  // namespace clicklayout
