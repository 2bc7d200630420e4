#include "clicklayout/scene_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

#include "clicklayout/error.hpp"

namespace clicklayout {

using nlohmann::json;

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string quote(const std::string& s) {
  return json(s).dump(-1, ' ', false, json::error_handler_t::replace);
}

void check_rect(const NormRect& r, ObjectId id, std::vector<Violation>& out) {
  auto report = [&](std::string field, std::string what) {
    out.push_back({std::move(field), id, "box " + std::to_string(id) + ": " + std::move(what)});
  };
  const std::pair<const char*, double> fields[] = {
      {"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
  bool finite = true;
  for (const auto& [name, value] : fields) {
    if (!std::isfinite(value)) {
      report(name, std::string("non-finite ") + name);
      finite = false;
    }
  }
  if (!finite) return;
  if (r.x < 0.0 || r.x > 1.0) report("x", "x out of range [0,1]");
  if (r.y < 0.0 || r.y > 1.0) report("y", "y out of range [0,1]");
  if (r.width <= 0.0) report("width", "non-positive width");
  else if (r.width > 1.0) report("width", "width exceeds 1");
  if (r.height <= 0.0) report("height", "non-positive height");
  else if (r.height > 1.0) report("height", "height exceeds 1");
  if (r.x + r.width > 1.0 + kExtentEpsilon) report("width", "box extends past the right edge");
  if (r.y + r.height > 1.0 + kExtentEpsilon) report("height", "box extends past the bottom edge");
}

std::size_t index_of(const SceneGraph& graph, ObjectId id) {
  for (std::size_t i = 0; i < graph.boxes.size(); ++i) {
    if (graph.boxes[i].unique_id == id) return i;
  }
  throw Error(ErrorKind::kNotFound, "unknown unique_id " + std::to_string(id));
}

NormRect centered_at(NormPoint c, double width, double height) {
  return {c.x - width / 2.0, c.y - height / 2.0, width, height};
}

// Schema decoding. Problems are collected rather than thrown one at a time.
struct Decoder {
  std::vector<std::string> problems;

  void fail(const std::string& path, const std::string& what) {
    problems.push_back(path + ": " + what);
  }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      fail(path + "." + key, "missing field");
      return std::nullopt;
    }
    if (!it->is_number()) {
      fail(path + "." + key, "must be a number");
      return std::nullopt;
    }
    return it->get<double>();
  }

  std::optional<ObjectBox> box(const json& j, const std::string& path) {
    if (!j.is_object()) {
      fail(path, "must be an object");
      return std::nullopt;
    }
    ObjectBox out;
    bool good = true;

    auto id = j.find("unique_id");
    if (id == j.end()) {
      fail(path + ".unique_id", "missing field");
      good = false;
    } else if (id->is_number_unsigned()) {
      const auto v = id->get<std::uint64_t>();
      if (v > static_cast<std::uint64_t>(std::numeric_limits<ObjectId>::max())) {
        fail(path + ".unique_id", "out of range");
        good = false;
      } else {
        out.unique_id = static_cast<ObjectId>(v);
      }
    } else {
      fail(path + ".unique_id", "must be a non-negative integer, got " + id->dump());
      good = false;
    }

    auto name = j.find("name");
    if (name == j.end()) {
      fail(path + ".name", "missing field");
      good = false;
    } else if (!name->is_string()) {
      fail(path + ".name", "must be a string");
      good = false;
    } else {
      out.name = name->get<std::string>();
    }

    auto rect = j.find("box");
    if (rect == j.end()) {
      fail(path + ".box", "missing field");
      return std::nullopt;
    }
    if (!rect->is_object()) {
      fail(path + ".box", "must be an object");
      return std::nullopt;
    }
    const std::string rpath = path + ".box";
    auto x = number(*rect, "x", rpath);
    auto y = number(*rect, "y", rpath);
    auto w = number(*rect, "width", rpath);
    auto h = number(*rect, "height", rpath);
    if (!x || !y || !w || !h || !good) return std::nullopt;
    out.box = {*x, *y, *w, *h};
    return out;
  }
};

// Extent overflow is repaired on ingest; every other range problem is left
// for validation to report.
NormRect ingest(const NormRect& r) {
  const bool fields_in_range = r.x >= 0.0 && r.x <= 1.0 && r.y >= 0.0 && r.y <= 1.0 &&
                               r.width > 0.0 && r.width <= 1.0 && r.height > 0.0 &&
                               r.height <= 1.0;
  if (!fields_in_range) return r;
  return clamp_to_unit(r);
}

}  // namespace

const ObjectBox* SceneGraph::find(ObjectId id) const {
  for (const auto& b : boxes) {
    if (b.unique_id == id) return &b;
  }
  return nullptr;
}

ObjectId SceneGraph::next_id() const {
  ObjectId next = 0;
  for (const auto& b : boxes) next = std::max(next, b.unique_id + 1);
  return next;
}

std::string Violation::to_string() const { return message; }

std::vector<std::string> ValidationReport::messages() const {
  std::vector<std::string> out;
  out.reserve(violations.size());
  for (const auto& v : violations) out.push_back(v.to_string());
  return out;
}

ValidationReport validate_scene_graph(const SceneGraph& graph) {
  ValidationReport report;
  std::set<ObjectId> seen;
  std::set<ObjectId> duplicated;
  for (const auto& b : graph.boxes) {
    if (b.unique_id < 0) {
      report.violations.push_back(
          {"unique_id", b.unique_id, "negative unique_id " + std::to_string(b.unique_id)});
    }
    if (!seen.insert(b.unique_id).second && duplicated.insert(b.unique_id).second) {
      report.violations.push_back(
          {"unique_id", b.unique_id, "duplicate unique_id " + std::to_string(b.unique_id)});
    }
    if (is_blank(b.name)) {
      report.violations.push_back(
          {"name", b.unique_id, "box " + std::to_string(b.unique_id) + ": empty name"});
    }
    check_rect(b.box, b.unique_id, report.violations);
  }
  return report;
}

void require_valid(const SceneGraph& graph, std::string_view context) {
  auto report = validate_scene_graph(graph);
  if (report.ok()) return;
  if (context.empty()) throw ValidationError(report.messages());
  throw ValidationError(std::string(context), report.messages());
}

std::string format_coordinate(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  std::string s(buf);
  if (s == "-0.0000") s = "0.0000";
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

std::string serialize_scene_graph(const SceneGraph& graph) {
  require_valid(graph, "cannot serialize layout");
  std::string out = "{\"prompt\": " + quote(graph.prompt) + ", \"boxes\": [";
  bool first = true;
  for (const auto& b : graph.boxes) {
    if (!first) out += ", ";
    first = false;
    out += "{\"unique_id\": " + std::to_string(b.unique_id) + ", \"name\": " + quote(b.name) +
           ", \"box\": {\"x\": " + format_coordinate(b.box.x) +
           ", \"y\": " + format_coordinate(b.box.y) +
           ", \"width\": " + format_coordinate(b.box.width) +
           ", \"height\": " + format_coordinate(b.box.height) + "}}";
  }
  out += "]}";
  return out;
}

SceneGraph parse_scene_graph(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed layout JSON: ") + e.what(), e.byte);
  }

  Decoder decoder;
  SceneGraph graph;
  if (!j.is_object()) {
    throw ValidationError("layout", {"top level must be an object"});
  }
  if (auto p = j.find("prompt"); p != j.end()) {
    if (p->is_string()) {
      graph.prompt = p->get<std::string>();
    } else {
      decoder.fail("prompt", "must be a string");
    }
  }
  auto boxes = j.find("boxes");
  if (boxes == j.end()) {
    decoder.fail("boxes", "missing field");
  } else if (!boxes->is_array()) {
    decoder.fail("boxes", "must be an array");
  } else {
    for (std::size_t i = 0; i < boxes->size(); ++i) {
      if (auto b = decoder.box((*boxes)[i], "boxes[" + std::to_string(i) + "]")) {
        b->box = ingest(b->box);
        graph.boxes.push_back(std::move(*b));
      }
    }
  }
  if (!decoder.problems.empty()) throw ValidationError("layout", decoder.problems);
  require_valid(graph, "layout");
  return graph;
}

SceneGraph canonicalize(const SceneGraph& graph) {
  return parse_scene_graph(serialize_scene_graph(graph));
}

SceneGraph apply_edit(const SceneGraph& graph, const EditOp& op) {
  SceneGraph out = graph;
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, edit::MoveToPoint>) {
          auto& b = out.boxes[index_of(out, e.id)];
          b.box = clamp_to_unit(centered_at(e.target, b.box.width, b.box.height));
        } else if constexpr (std::is_same_v<T, edit::MoveToRect>) {
          out.boxes[index_of(out, e.id)].box = clamp_to_unit(e.target);
        } else if constexpr (std::is_same_v<T, edit::Add>) {
          out.boxes.push_back({graph.next_id(), e.name, clamp_to_unit(e.rect)});
        } else if constexpr (std::is_same_v<T, edit::Delete>) {
          out.boxes.erase(out.boxes.begin() + static_cast<std::ptrdiff_t>(index_of(out, e.id)));
        } else if constexpr (std::is_same_v<T, edit::ChangeAppearance>) {
          out.boxes[index_of(out, e.id)].name = e.new_name;
        } else if constexpr (std::is_same_v<T, edit::Resize>) {
          auto& b = out.boxes[index_of(out, e.id)];
          b.box = clamp_to_unit(centered_at(center(b.box), e.width, e.height));
        }
      },
      op);
  require_valid(out, "edit produced an invalid layout");
  return out;
}

std::vector<ObjectId> EditDiff::touched_ids() const {
  std::set<ObjectId> ids;
  for (const auto& m : moved) ids.insert(m.unique_id);
  for (const auto& a : added) ids.insert(a.unique_id);
  ids.insert(removed.begin(), removed.end());
  for (const auto& r : relabeled) ids.insert(r.unique_id);
  return {ids.begin(), ids.end()};
}

EditDiff diff_scene_graphs(const SceneGraph& before, const SceneGraph& after) {
  std::map<ObjectId, const ObjectBox*> old_boxes;
  std::map<ObjectId, const ObjectBox*> new_boxes;
  for (const auto& b : before.boxes) old_boxes.emplace(b.unique_id, &b);
  for (const auto& b : after.boxes) new_boxes.emplace(b.unique_id, &b);

  EditDiff diff;
  for (const auto& [id, old_box] : old_boxes) {
    auto it = new_boxes.find(id);
    if (it == new_boxes.end()) {
      diff.removed.push_back(id);
      continue;
    }
    const ObjectBox& new_box = *it->second;
    if (max_field_delta(old_box->box, new_box.box) > kMoveTolerance) {
      diff.moved.push_back({id, old_box->box, new_box.box});
    }
    if (old_box->name != new_box.name) {
      diff.relabeled.push_back({id, old_box->name, new_box.name});
    }
  }
  for (const auto& [id, new_box] : new_boxes) {
    if (!old_boxes.contains(id)) diff.added.push_back(*new_box);
  }
  diff.prompt_changed = before.prompt != after.prompt;
  return diff;
}

ObjectId resolve_reference(const SceneGraph& graph, const NormRect& ref) {
  if (graph.boxes.empty()) {
    throw Error(ErrorKind::kNoMatch, "layout has no objects to refer to");
  }
  // Key sorts best-first: larger IoU, then closer center, then smaller id.
  using Rank = std::tuple<double, double, ObjectId>;
  std::optional<Rank> best;
  for (const auto& b : graph.boxes) {
    const double overlap = iou(b.box, ref);
    if (overlap <= 0.0) continue;
    Rank rank{-overlap, center_distance(b.box, ref), b.unique_id};
    if (!best || rank < *best) best = rank;
  }
  if (!best) {
    throw Error(ErrorKind::kNoMatch, "box does not overlap any object; redraw the selection");
  }
  return std::get<2>(*best);
}

}  // namespace clicklayout
