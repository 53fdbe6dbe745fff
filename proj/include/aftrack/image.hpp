#pragma once

#include <cstdint>
#include <vector>

namespace aftrack {

/// 8-bit interleaved image. `channels` is 3 (RGB) or 1 (gray).
///
/// Pixel (x, y) covers the continuous square [x, x+1) x [y, y+1); its center
/// sits at (x + 0.5, y + 0.5). Every box and position in the library uses
/// this coordinate system.
struct Frame {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> pixels;

  Frame() = default;
  Frame(int w, int h, int c = 3);

  bool is_gray() const { return channels == 1; }
  bool empty() const { return pixels.empty(); }

  std::uint8_t& at(int x, int y, int c = 0) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Single-channel float image, intensities on the 0..255 scale.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  Plane() = default;
  Plane(int w, int h, float fill = 0.0f);

  float& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Luma conversion 0.299 R + 0.587 G + 0.114 B. Gray frames pass through.
Plane to_gray(const Frame& frame);

/// Horizontal mirror, used by the symmetry tests and the python bindings.
Frame mirror_horizontal(const Frame& frame);

}  // namespace aftrack
