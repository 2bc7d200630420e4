#pragma once

// nlohmann/json conversions for the domain types that cross process
// boundaries: HTTP bodies, journals, fixture and vector files.

#include <json.hpp>

#include "clicklayout/instruction.hpp"
#include "clicklayout/scene_graph.hpp"

namespace clicklayout {

/// Canonical layout as a JSON value (same content as serialize_scene_graph).
[[nodiscard]] nlohmann::json layout_to_json(const SceneGraph& graph);

/// Validating decode of an already-parsed JSON value.
[[nodiscard]] SceneGraph layout_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json diff_to_json(const EditDiff& diff);

/// Token-list form:
///   {"units": "pixels"|"normalized",
///    "tokens": [{"type": "text", "text": ...},
///               {"type": "box", "x":, "y":, "width":, "height":, "symbol"?},
///               {"type": "point", "x":, "y":, "symbol"?}]}
[[nodiscard]] nlohmann::json instruction_to_json(const MultimodalInstruction& instr);
[[nodiscard]] MultimodalInstruction instruction_from_json(const nlohmann::json& j);

}  // namespace clicklayout
