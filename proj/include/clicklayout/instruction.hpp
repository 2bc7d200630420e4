#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "clicklayout/geometry.hpp"

namespace clicklayout {

/// Coordinate space of an instruction's geometric tokens.
enum class Units { kNormalized, kPixels };

struct TextSpan {
  std::string text;
  friend bool operator==(const TextSpan&, const TextSpan&) = default;
};

/// A drawn box. `rect` is expressed in the owning instruction's units.
struct BoxRef {
  NormRect rect;
  std::string symbol;
  friend bool operator==(const BoxRef&, const BoxRef&) = default;
};

/// A clicked star point, in the owning instruction's units.
struct PointRef {
  NormPoint point;
  std::string symbol;
  friend bool operator==(const PointRef&, const PointRef&) = default;
};

using InstructionToken = std::variant<TextSpan, BoxRef, PointRef>;

/// Text interleaved with geometric references, in drawing order.
///
/// Construction canonicalizes the stream: adjacent text spans merge, empty
/// spans are dropped, a single space is placed at every text/geometry
/// boundary that lacks whitespace, and missing reference symbols are filled
/// in as B1, B2, ... and P1, P2, .... After that, serialization is plain
/// concatenation, which makes parse and serialize exact inverses.
///
/// Throws Error(kArgument) on an empty stream, text containing braces,
/// duplicate symbols, or geometry outside its coordinate space.
class MultimodalInstruction {
 public:
  explicit MultimodalInstruction(std::vector<InstructionToken> tokens,
                                 Units units = Units::kNormalized);

  [[nodiscard]] const std::vector<InstructionToken>& tokens() const { return tokens_; }
  [[nodiscard]] Units units() const { return units_; }

  friend bool operator==(const MultimodalInstruction&, const MultimodalInstruction&) = default;

 private:
  std::vector<InstructionToken> tokens_;
  Units units_;
};

[[nodiscard]] std::string serialize_instruction(const MultimodalInstruction& instr);

/// Converts pixel geometry to normalized fractions. Normalized input is
/// returned unchanged.
[[nodiscard]] MultimodalInstruction normalize_instruction(const MultimodalInstruction& instr,
                                                          double image_width,
                                                          double image_height);

/// Inverse of serialize_instruction. Brace groups with keys x, y, width,
/// height become boxes and groups with x, y become points. Units are
/// inferred: all-integer geometry means pixels, anything with a decimal
/// point means normalized. Throws ParseError on malformed groups.
[[nodiscard]] MultimodalInstruction parse_instruction_text(std::string_view text);

}  // namespace clicklayout
