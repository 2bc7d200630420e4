#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "clicklayout/geometry.hpp"

namespace clicklayout {

using ObjectId = std::int64_t;

struct ObjectBox {
  ObjectId unique_id = 0;
  std::string name;
  NormRect box;

  friend bool operator==(const ObjectBox&, const ObjectBox&) = default;
};

/// Layout representation of an image: a scene prompt plus labeled boxes.
/// Box order carries no meaning.
struct SceneGraph {
  std::string prompt;
  std::vector<ObjectBox> boxes;

  friend bool operator==(const SceneGraph&, const SceneGraph&) = default;

  [[nodiscard]] const ObjectBox* find(ObjectId id) const;
  [[nodiscard]] ObjectId next_id() const;
};

struct Violation {
  std::string field;
  std::optional<ObjectId> unique_id;
  std::string message;

  [[nodiscard]] std::string to_string() const;
};

struct ValidationReport {
  std::vector<Violation> violations;

  [[nodiscard]] bool ok() const { return violations.empty(); }
  [[nodiscard]] std::vector<std::string> messages() const;
};

[[nodiscard]] ValidationReport validate_scene_graph(const SceneGraph& graph);

/// Throws ValidationError when the graph does not validate.
void require_valid(const SceneGraph& graph, std::string_view context = {});

/// Canonical number rendering: at most 4 decimals, at least one.
[[nodiscard]] std::string format_coordinate(double value);

/// Canonical single-line JSON. Key order is fixed, so equal graphs always
/// produce identical bytes.
[[nodiscard]] std::string serialize_scene_graph(const SceneGraph& graph);

/// parse(serialize(graph)): rounds coordinates to their canonical precision.
[[nodiscard]] SceneGraph canonicalize(const SceneGraph& graph);

/// Accepts canonical output and tolerant variants (any key order, any
/// whitespace, unknown keys ignored). Malformed JSON raises ParseError with a
/// byte offset; schema problems raise ValidationError.
[[nodiscard]] SceneGraph parse_scene_graph(std::string_view text);

namespace edit {

struct MoveToPoint {
  ObjectId id;
  NormPoint target;
};
struct MoveToRect {
  ObjectId id;
  NormRect target;
};
struct Add {
  std::string name;
  NormRect rect;
};
struct Delete {
  ObjectId id;
};
struct ChangeAppearance {
  ObjectId id;
  std::string new_name;
};
struct Resize {
  ObjectId id;
  double width;
  double height;
};

}  // namespace edit

using EditOp = std::variant<edit::MoveToPoint, edit::MoveToRect, edit::Add, edit::Delete,
                            edit::ChangeAppearance, edit::Resize>;

/// Applies one primitive edit. Untouched boxes are copied unchanged and the
/// edited rect is clamped into the unit square.
[[nodiscard]] SceneGraph apply_edit(const SceneGraph& graph, const EditOp& op);

struct MovedBox {
  ObjectId unique_id;
  NormRect before;
  NormRect after;
  friend bool operator==(const MovedBox&, const MovedBox&) = default;
};

struct RelabeledBox {
  ObjectId unique_id;
  std::string before;
  std::string after;
  friend bool operator==(const RelabeledBox&, const RelabeledBox&) = default;
};

struct EditDiff {
  std::vector<MovedBox> moved;
  std::vector<ObjectBox> added;
  std::vector<ObjectId> removed;
  std::vector<RelabeledBox> relabeled;
  bool prompt_changed = false;

  [[nodiscard]] bool empty() const {
    return moved.empty() && added.empty() && removed.empty() && relabeled.empty() &&
           !prompt_changed;
  }
  /// Every id mentioned by any list, sorted and unique.
  [[nodiscard]] std::vector<ObjectId> touched_ids() const;
};

inline constexpr double kMoveTolerance = 1e-9;

/// Matches boxes by unique_id. Output lists are sorted by id.
[[nodiscard]] EditDiff diff_scene_graphs(const SceneGraph& before, const SceneGraph& after);

/// Id of the box that best overlaps `ref`. Ranking is by IoU, then center
/// distance, then smaller id, so the answer never depends on box order.
/// Throws kNoMatch when nothing overlaps.
[[nodiscard]] ObjectId resolve_reference(const SceneGraph& graph, const NormRect& ref);

}  // namespace clicklayout
