#include "clicklayout/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace clicklayout {

NormPoint center(const NormRect& r) {
  return {r.x + r.width / 2.0, r.y + r.height / 2.0};
}

double area(const NormRect& r) {
  return std::max(0.0, r.width) * std::max(0.0, r.height);
}

double iou(const NormRect& a, const NormRect& b) {
  const double ix = std::min(a.x + a.width, b.x + b.width) - std::max(a.x, b.x);
  const double iy = std::min(a.y + a.height, b.y + b.height) - std::max(a.y, b.y);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = area(a) + area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double center_distance(const NormRect& a, const NormRect& b) {
  const NormPoint ca = center(a);
  const NormPoint cb = center(b);
  return std::hypot(ca.x - cb.x, ca.y - cb.y);
}

double max_field_delta(const NormRect& a, const NormRect& b) {
  return std::max({std::fabs(a.x - b.x), std::fabs(a.y - b.y),
                   std::fabs(a.width - b.width), std::fabs(a.height - b.height)});
}

namespace {

void clamp_axis(double& origin, double& extent) {
  if (extent > 1.0) extent = 1.0;
  if (origin < 0.0) origin = 0.0;
  if (origin + extent > 1.0 + kExtentEpsilon) origin = 1.0 - extent;
  if (origin < 0.0) origin = 0.0;
}

}  // namespace

NormRect clamp_to_unit(NormRect r) {
  clamp_axis(r.x, r.width);
  clamp_axis(r.y, r.height);
  return r;
}

}  // namespace clicklayout
