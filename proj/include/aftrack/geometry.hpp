#pragma once

namespace aftrack {

/// Axis-aligned box stored by its center. Coordinates are continuous image
/// coordinates (see Frame).
struct BoundingBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  double left() const { return cx - 0.5 * w; }
  double top() const { return cy - 0.5 * h; }
  double right() const { return cx + 0.5 * w; }
  double bottom() const { return cy + 0.5 * h; }
  double area() const { return w * h; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Corner box in the 1-based pixel convention of OTB ground-truth files:
/// (x, y) is the top-left pixel, counting from 1.
struct CornerBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  friend bool operator==(const CornerBox&, const CornerBox&) = default;
};

inline BoundingBox to_center(const CornerBox& b) {
  return {b.x - 1.0 + 0.5 * b.w, b.y - 1.0 + 0.5 * b.h, b.w, b.h};
}

inline CornerBox to_corner(const BoundingBox& b) {
  return {b.cx - 0.5 * b.w + 1.0, b.cy - 0.5 * b.h + 1.0, b.w, b.h};
}

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

}  // namespace aftrack
