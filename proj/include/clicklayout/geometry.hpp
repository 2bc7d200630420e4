#pragma once

namespace clicklayout {

/// Slack allowed on `x + width` and `y + height` before a rect counts as
/// leaving the unit square.
inline constexpr double kExtentEpsilon = 1e-9;

/// Axis-aligned rectangle in normalized image coordinates. Origin is the
/// top-left corner; all fields are fractions of the image dimensions.
struct NormRect {
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const NormRect&, const NormRect&) = default;
};

struct NormPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const NormPoint&, const NormPoint&) = default;
};

[[nodiscard]] NormPoint center(const NormRect& r);

[[nodiscard]] double area(const NormRect& r);

/// Intersection over union. Returns 0 when either rect has no area.
[[nodiscard]] double iou(const NormRect& a, const NormRect& b);

[[nodiscard]] double center_distance(const NormRect& a, const NormRect& b);

/// Largest absolute per-field difference.
[[nodiscard]] double max_field_delta(const NormRect& a, const NormRect& b);

/// Brings a rect inside [0,1]^2: translate first, then shrink any side
/// still longer than 1. Size is preserved whenever it fits.
[[nodiscard]] NormRect clamp_to_unit(NormRect r);

}  // namespace clicklayout
