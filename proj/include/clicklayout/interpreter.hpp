#pragma once

#include <string>
#include <vector>

#include "clicklayout/instruction.hpp"
#include "clicklayout/scene_graph.hpp"

namespace clicklayout {

struct Interpretation {
  std::string chain_of_thought;
  SceneGraph output;
  std::vector<EditOp> ops;
};

/// Rule-based stand-in for the language model. Understands a small,
/// case-insensitive clause grammar over normalized instructions:
///
///   move   <ref> to <point|box>
///   add    a|an <name> at <box>
///   delete <ref>            remove <ref>
///   make   <ref> a|an <name>
///   change <ref> to a|an <name>
///   resize <ref> to <box>   (takes the box's width and height)
///
/// where <ref> is a drawn box or "it". Clauses are joined with "and" and
/// applied left to right. A drawn box is resolved by IoU against the input
/// layout; "it" is the object the previous clause acted on.
///
/// Throws kUnsupportedInstruction outside the grammar, kNoMatch when a box
/// overlaps nothing, and kArgument for pixel-unit instructions.
[[nodiscard]] Interpretation interpret_instruction(const SceneGraph& graph,
                                                   const MultimodalInstruction& instruction);

/// Scene prompt written after edits that change the set of names.
[[nodiscard]] std::string describe_scene(const SceneGraph& graph);

}  // namespace clicklayout
