#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace aftrack {

/// Dense row-major real grid.
struct RealGrid {
  int cols = 0;
  int rows = 0;
  std::vector<double> values;

  RealGrid() = default;
  RealGrid(int c, int r, double fill = 0.0)
      : cols(c), rows(r), values(static_cast<std::size_t>(c) * r, fill) {}

  std::size_t size() const { return values.size(); }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * cols + x]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * cols + x]; }

  friend bool operator==(const RealGrid&, const RealGrid&) = default;
};

/// A score grid together with the mapping from cells to image coordinates:
/// cell (i, j) is centered at (origin_x + i * cell_size, origin_y + j * cell_size).
struct ResponseMap : RealGrid {
  double cell_size = 1.0;
  double origin_x = 0.0;
  double origin_y = 0.0;

  ResponseMap() = default;
  ResponseMap(int c, int r, double fill = 0.0) : RealGrid(c, r, fill) {}
  explicit ResponseMap(RealGrid g) : RealGrid(std::move(g)) {}
};

}  // namespace aftrack
