#include "aftrack/image.hpp"

#include <stdexcept>
#include <string>

namespace aftrack {

Frame::Frame(int w, int h, int c) : width(w), height(h), channels(c) {
  if (w < 1 || h < 1) {
    throw std::invalid_argument("Frame: dimensions must be >= 1, got " + std::to_string(w) + "x" +
                                std::to_string(h));
  }
  if (c != 1 && c != 3) {
    throw std::invalid_argument("Frame: channels must be 1 or 3");
  }
  pixels.assign(static_cast<std::size_t>(w) * h * c, 0);
}

Plane::Plane(int w, int h, float fill) : width(w), height(h) {
  if (w < 1 || h < 1) {
    throw std::invalid_argument("Plane: dimensions must be >= 1");
  }
  values.assign(static_cast<std::size_t>(w) * h, fill);
}

Plane to_gray(const Frame& frame) {
  Plane out(frame.width, frame.height);
  const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
  if (frame.is_gray()) {
    for (std::size_t i = 0; i < n; ++i) out.values[i] = frame.pixels[i];
    return out;
  }
  const std::uint8_t* p = frame.pixels.data();
  for (std::size_t i = 0; i < n; ++i, p += 3) {
    out.values[i] = 0.299f * p[0] + 0.587f * p[1] + 0.114f * p[2];
  }
  return out;
}

Frame mirror_horizontal(const Frame& frame) {
  Frame out = frame;
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      for (int c = 0; c < frame.channels; ++c) {
        out.at(x, y, c) = frame.at(frame.width - 1 - x, y, c);
      }
    }
  }
  return out;
}

}  // namespace aftrack
