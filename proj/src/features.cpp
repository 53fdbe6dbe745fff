#include "aftrack/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace aftrack {

FeatureMap::FeatureMap(int c, int r, int ch, double fill) : cols(c), rows(r), channels(ch) {
  if (c < 1 || r < 1 || ch < 1) {
    throw std::invalid_argument("FeatureMap: dimensions must be >= 1");
  }
  data.assign(static_cast<std::size_t>(c) * r * ch, fill);
}

namespace {

struct Tap {
  int i0;
  int i1;
  double w1;
};

// Bilinear taps for `out` samples spanning [start, start + extent) of a
// `size`-pixel axis, clamped to the axis (border replication).
std::vector<Tap> axis_taps(double start, double extent, int out, int size) {
  std::vector<Tap> taps(out);
  const double step = extent / out;
  for (int k = 0; k < out; ++k) {
    const double s = start + (k + 0.5) * step - 0.5;
    const double f = std::floor(s);
    const int i = static_cast<int>(f);
    taps[k] = {std::clamp(i, 0, size - 1), std::clamp(i + 1, 0, size - 1), s - f};
  }
  return taps;
}

// atan2 via octant reduction and a minimax polynomial for atan on [0, 1];
// absolute error about 1e-5 rad.
double fast_atan2(double y, double x) {
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  const double a = std::min(ax, ay) / std::max(ax, ay);
  const double s = a * a;
  double r = ((((0.0208351 * s - 0.085133) * s + 0.180141) * s - 0.3302995) * s + 0.999866) * a;
  if (ay > ax) r = 0.5 * std::numbers::pi - r;
  if (x < 0.0) r = std::numbers::pi - r;
  return y < 0.0 ? -r : r;
}

void check_divisible(const Plane& gray, int cell_size, const char* who) {
  if (cell_size < 1 || gray.width % cell_size != 0 || gray.height % cell_size != 0) {
    throw std::invalid_argument(std::string(who) + ": patch " + std::to_string(gray.width) + "x" +
                                std::to_string(gray.height) + " is not divisible by cell size " +
                                std::to_string(cell_size));
  }
}

}  // namespace

Frame extract_patch(const Frame& frame, const BoundingBox& box, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) {
    throw std::invalid_argument("extract_patch: output size must be >= 1");
  }
  const double w = std::max(box.w, 1.0);
  const double h = std::max(box.h, 1.0);
  const auto xs = axis_taps(box.cx - 0.5 * w, w, out_w, frame.width);
  const auto ys = axis_taps(box.cy - 0.5 * h, h, out_h, frame.height);

  Frame out(out_w, out_h, frame.channels);
  const int nc = frame.channels;
  for (int y = 0; y < out_h; ++y) {
    const Tap& ty = ys[y];
    const std::uint8_t* r0 = frame.pixels.data() + static_cast<std::size_t>(ty.i0) * frame.width * nc;
    const std::uint8_t* r1 = frame.pixels.data() + static_cast<std::size_t>(ty.i1) * frame.width * nc;
    std::uint8_t* dst = out.pixels.data() + static_cast<std::size_t>(y) * out_w * nc;
    for (int x = 0; x < out_w; ++x) {
      const Tap& tx = xs[x];
      for (int c = 0; c < nc; ++c) {
        const double top = r0[tx.i0 * nc + c] + tx.w1 * (r0[tx.i1 * nc + c] - r0[tx.i0 * nc + c]);
        const double bot = r1[tx.i0 * nc + c] + tx.w1 * (r1[tx.i1 * nc + c] - r1[tx.i0 * nc + c]);
        const double v = top + ty.w1 * (bot - top);
        dst[x * nc + c] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0) + 0.5);
      }
    }
  }
  return out;
}

FeatureMap hog_features(const Plane& gray, int cell_size, int orientations) {
  check_divisible(gray, cell_size, "hog_features");
  if (orientations < 1) throw std::invalid_argument("hog_features: orientations must be >= 1");

  const int width = gray.width;
  const int height = gray.height;
  const int cols = width / cell_size;
  const int rows = height / cell_size;
  const int n_signed = 2 * orientations;
  const std::size_t n_cells = static_cast<std::size_t>(cols) * rows;

  // Signed orientation histograms, one n_signed block per cell.
  std::vector<double> hist(n_cells * n_signed, 0.0);

  // Spatial bilinear weights are separable and identical for every row/column
  // with the same offset inside a cell, so precompute them per axis.
  auto spatial = [&](int size, int cells) {
    std::vector<Tap> taps(size);
    for (int p = 0; p < size; ++p) {
      const double f = (p + 0.5) / cell_size - 0.5;
      const double fl = std::floor(f);
      const int i = static_cast<int>(fl);
      taps[p] = {std::clamp(i, 0, cells - 1), std::clamp(i + 1, 0, cells - 1), f - fl};
    }
    return taps;
  };
  const auto tx = spatial(width, cols);
  const auto ty = spatial(height, rows);

  constexpr double inv255 = 1.0 / 255.0;
  const double bins_per_radian = n_signed / (2.0 * std::numbers::pi);
  for (int y = 0; y < height; ++y) {
    const int yu = std::max(y - 1, 0);
    const int yd = std::min(y + 1, height - 1);
    for (int x = 0; x < width; ++x) {
      const int xl = std::max(x - 1, 0);
      const int xr = std::min(x + 1, width - 1);
      const double gx = (static_cast<double>(gray.at(xr, y)) - gray.at(xl, y)) * inv255;
      const double gy = (static_cast<double>(gray.at(x, yd)) - gray.at(x, yu)) * inv255;
      const double mag = std::sqrt(gx * gx + gy * gy);
      if (mag == 0.0) continue;

      double angle = fast_atan2(gy, gx);
      if (angle < 0.0) angle += 2.0 * std::numbers::pi;
      const double pos = angle * bins_per_radian;
      const double fl = std::floor(pos);
      const double w1 = pos - fl;
      const int o0 = static_cast<int>(fl) % n_signed;
      const int o1 = (o0 + 1) % n_signed;

      const Tap& sx = tx[x];
      const Tap& sy = ty[y];
      const double wx[2] = {1.0 - sx.w1, sx.w1};
      const double wy[2] = {1.0 - sy.w1, sy.w1};
      const int cx[2] = {sx.i0, sx.i1};
      const int cy[2] = {sy.i0, sy.i1};
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const double w = mag * wy[a] * wx[b];
          if (w == 0.0) continue;
          double* h = hist.data() + (static_cast<std::size_t>(cy[a]) * cols + cx[b]) * n_signed;
          h[o0] += w * (1.0 - w1);
          h[o1] += w * w1;
        }
      }
    }
  }

  std::vector<double> energy(n_cells, 0.0);
  for (std::size_t c = 0; c < n_cells; ++c) {
    const double* h = hist.data() + c * n_signed;
    double e = 0.0;
    for (int o = 0; o < orientations; ++o) {
      const double u = h[o] + h[o + orientations];
      e += u * u;
    }
    energy[c] = e;
  }

  constexpr double kEps = 1e-4;
  constexpr double kClip = 0.2;
  constexpr double kTextureScale = 0.2357;
  const int dims = hog_channel_count(orientations);
  FeatureMap out(cols, rows, dims);
  out.cell_size = cell_size;
  out.origin_x = 0.5 * cell_size;
  out.origin_y = 0.5 * cell_size;

  auto e_at = [&](int x, int y) {
    x = std::clamp(x, 0, cols - 1);
    y = std::clamp(y, 0, rows - 1);
    return energy[static_cast<std::size_t>(y) * cols + x];
  };

  // Block order: (-1,-1), (+1,-1), (-1,+1), (+1,+1).
  constexpr int kDx[4] = {-1, 1, -1, 1};
  constexpr int kDy[4] = {-1, -1, 1, 1};
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      double norm[4];
      for (int b = 0; b < 4; ++b) {
        const double s = e_at(x, y) + e_at(x + kDx[b], y) + e_at(x, y + kDy[b]) +
                         e_at(x + kDx[b], y + kDy[b]);
        norm[b] = 1.0 / std::sqrt(s + kEps);
      }
      const double* h = hist.data() + (static_cast<std::size_t>(y) * cols + x) * n_signed;
      double texture[4] = {0.0, 0.0, 0.0, 0.0};
      for (int o = 0; o < n_signed; ++o) {
        double sum = 0.0;
        for (int b = 0; b < 4; ++b) {
          const double t = std::min(h[o] * norm[b], kClip);
          sum += t;
          texture[b] += t;
        }
        out.at(o, x, y) = 0.5 * sum;
      }
      for (int o = 0; o < orientations; ++o) {
        const double u = h[o] + h[o + orientations];
        double sum = 0.0;
        for (int b = 0; b < 4; ++b) sum += std::min(u * norm[b], kClip);
        out.at(n_signed + o, x, y) = 0.5 * sum;
      }
      for (int b = 0; b < 4; ++b) {
        out.at(n_signed + orientations + b, x, y) = std::min(kTextureScale * texture[b], 1.0);
      }
    }
  }
  return out;
}

FeatureMap gray_features(const Plane& gray, int cell_size) {
  check_divisible(gray, cell_size, "gray_features");
  const int cols = gray.width / cell_size;
  const int rows = gray.height / cell_size;
  FeatureMap out(cols, rows, 1);
  out.cell_size = cell_size;
  out.origin_x = 0.5 * cell_size;
  out.origin_y = 0.5 * cell_size;

  const double inv = 1.0 / (255.0 * cell_size * cell_size);
  double total = 0.0;
  for (int cy = 0; cy < rows; ++cy) {
    for (int cx = 0; cx < cols; ++cx) {
      double s = 0.0;
      for (int y = cy * cell_size; y < (cy + 1) * cell_size; ++y) {
        for (int x = cx * cell_size; x < (cx + 1) * cell_size; ++x) s += gray.at(x, y);
      }
      out.at(0, cx, cy) = s * inv;
      total += s * inv;
    }
  }
  const double mean = total / (static_cast<double>(cols) * rows);
  for (double& v : out.data) v = 0.5 * (v - mean);
  return out;
}

int color_bin_index(int r, int g, int b, int bins_per_channel) {
  const int br = r * bins_per_channel / 256;
  const int bg = g * bins_per_channel / 256;
  const int bb = b * bins_per_channel / 256;
  return (br * bins_per_channel + bg) * bins_per_channel + bb;
}

int gray_bin_index(int v, int bins) { return v * bins / 256; }

RealGrid hann_window(int cols, int rows) {
  if (cols < 1 || rows < 1) throw std::invalid_argument("hann_window: size must be >= 1");
  auto profile = [](int n) {
    std::vector<double> w(n, 1.0);
    if (n > 1) {
      for (int i = 0; i < n; ++i) {
        w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
      }
    }
    return w;
  };
  const auto wx = profile(cols);
  const auto wy = profile(rows);
  RealGrid out(cols, rows);
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) out.at(x, y) = wy[y] * wx[x];
  }
  return out;
}

FeatureMap feature_stack(const Frame& patch, int cell_size, int orientations) {
  const Plane gray = to_gray(patch);
  FeatureMap hog = hog_features(gray, cell_size, orientations);
  const FeatureMap intensity = gray_features(gray, cell_size);

  FeatureMap out(hog.cols, hog.rows, hog.channels + 1);
  out.cell_size = hog.cell_size;
  out.origin_x = hog.origin_x;
  out.origin_y = hog.origin_y;
  std::copy(hog.data.begin(), hog.data.end(), out.data.begin());
  std::copy(intensity.data.begin(), intensity.data.end(),
            out.data.begin() + static_cast<std::ptrdiff_t>(hog.data.size()));
  return out;
}

void apply_window(FeatureMap& features, const RealGrid& window) {
  if (window.cols != features.cols || window.rows != features.rows) {
    throw std::invalid_argument("apply_window: window grid does not match features");
  }
  for (int c = 0; c < features.channels; ++c) {
    auto plane = features.channel(c);
    for (std::size_t i = 0; i < plane.size(); ++i) plane[i] *= window.values[i];
  }
}

}  // namespace aftrack
