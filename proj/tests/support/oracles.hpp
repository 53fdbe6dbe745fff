#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the FFT code paths under test.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "aftrack/features.hpp"
#include "aftrack/fft.hpp"
#include "aftrack/grid.hpp"
#include "aftrack/image.hpp"

namespace oracle {

using aftrack::Complex;
using aftrack::FeatureMap;
using aftrack::RealGrid;

inline FeatureMap random_features(int cols, int rows, int channels, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  FeatureMap f(cols, rows, channels);
  for (double& v : f.data) v = g(rng);
  return f;
}

inline RealGrid random_grid(int cols, int rows, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  RealGrid r(cols, rows);
  for (double& v : r.values) v = g(rng);
  return r;
}

inline aftrack::Frame random_frame(int w, int h, int channels, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(0, 255);
  aftrack::Frame f(w, h, channels);
  for (auto& p : f.pixels) p = static_cast<std::uint8_t>(u(rng));
  return f;
}

/// O(N^2) 2-D DFT; sign -1 forward, +1 inverse (unscaled).
inline std::vector<Complex> naive_dft(const std::vector<Complex>& in, int cols, int rows, int sign) {
  std::vector<Complex> out(in.size());
  for (int v = 0; v < rows; ++v) {
    for (int u = 0; u < cols; ++u) {
      Complex acc{};
      for (int y = 0; y < rows; ++y) {
        for (int x = 0; x < cols; ++x) {
          const double ph = sign * 2.0 * std::numbers::pi * (static_cast<double>(u * x) / cols +
                                                             static_cast<double>(v * y) / rows);
          acc += in[static_cast<std::size_t>(y) * cols + x] * Complex(std::cos(ph), std::sin(ph));
        }
      }
      out[static_cast<std::size_t>(v) * cols + u] = acc;
    }
  }
  return out;
}

inline std::vector<Complex> naive_dft(std::span<const double> in, int cols, int rows) {
  return naive_dft(std::vector<Complex>(in.begin(), in.end()), cols, rows, -1);
}

/// r(tau) = sum_c sum_n t_c(n) z_c((n + tau) mod size), computed directly.
inline RealGrid cyclic_correlation(const FeatureMap& t, const FeatureMap& z) {
  RealGrid r(z.cols, z.rows);
  for (int ty = 0; ty < z.rows; ++ty) {
    for (int tx = 0; tx < z.cols; ++tx) {
      double acc = 0.0;
      for (int c = 0; c < z.channels; ++c) {
        for (int ny = 0; ny < z.rows; ++ny) {
          for (int nx = 0; nx < z.cols; ++nx) {
            acc += t.at(c, nx, ny) * z.at(c, (nx + tx) % z.cols, (ny + ty) % z.rows);
          }
        }
      }
      r.at(tx, ty) = acc;
    }
  }
  return r;
}

/// Spatial template t minimizing sum_tau (corr(t, x)(tau) - y(tau))^2 + lambda ||t||^2,
/// solved with a dense normal-equation solve.
inline FeatureMap dense_ridge_template(const FeatureMap& x, const RealGrid& y, double lambda) {
  const int n = x.cols * x.rows;
  const int unknowns = n * x.channels;
  Eigen::MatrixXd a(n, unknowns);
  for (int ty = 0; ty < x.rows; ++ty) {
    for (int tx = 0; tx < x.cols; ++tx) {
      const int row = ty * x.cols + tx;
      for (int c = 0; c < x.channels; ++c) {
        for (int ny = 0; ny < x.rows; ++ny) {
          for (int nx = 0; nx < x.cols; ++nx) {
            a(row, c * n + ny * x.cols + nx) = x.at(c, (nx + tx) % x.cols, (ny + ty) % x.rows);
          }
        }
      }
    }
  }
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(y.values.data(), n);
  Eigen::MatrixXd normal = a.transpose() * a + lambda * Eigen::MatrixXd::Identity(unknowns, unknowns);
  Eigen::VectorXd t = normal.ldlt().solve(a.transpose() * b);
  FeatureMap out(x.cols, x.rows, x.channels);
  for (int i = 0; i < unknowns; ++i) out.data[i] = t[i];
  return out;
}

/// Golden-section search for the minimum of a unimodal f on [lo, hi].
inline double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Keys cubic kernel with a = -0.5, written out piecewise.
inline double keys(double t) {
  t = std::abs(t);
  if (t < 1.0) return 1.5 * t * t * t - 2.5 * t * t + 1.0;
  if (t < 2.0) return -0.5 * t * t * t + 2.5 * t * t - 4.0 * t + 2.0;
  return 0.0;
}

/// Continuous interpolant of samples s (linearly extended beyond the ends)
/// evaluated at position p in sample-index units.
inline double interpolate(const std::vector<double>& s, double p) {
  const long n = static_cast<long>(s.size());
  auto ext = [&](long i) {
    if (i < 0) return s[0] + i * (s[1] - s[0]);
    if (i >= n) return s[n - 1] + (i - n + 1) * (s[n - 1] - s[n - 2]);
    return s[i];
  };
  double v = 0.0;
  for (long i = static_cast<long>(std::floor(p)) - 4; i <= static_cast<long>(std::floor(p)) + 4; ++i) {
    v += ext(i) * keys(p - static_cast<double>(i));
  }
  return v;
}

/// Bilinear value of a single-channel frame at continuous pixel position
/// (x, y), pixel centers at integer + 0.5, border replicated.
inline double bilinear(const aftrack::Frame& f, double x, double y, int channel = 0) {
  const double sx = x - 0.5, sy = y - 0.5;
  const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
  const double wx = sx - x0, wy = sy - y0;
  auto px = [&](int xi, int yi) {
    xi = std::clamp(xi, 0, f.width - 1);
    yi = std::clamp(yi, 0, f.height - 1);
    return static_cast<double>(f.at(xi, yi, channel));
  };
  return (1 - wy) * ((1 - wx) * px(x0, y0) + wx * px(x0 + 1, y0)) +
         wy * ((1 - wx) * px(x0, y0 + 1) + wx * px(x0 + 1, y0 + 1));
}

/// Mean of `map` over the clipped box [x0, x1] x [y0, y1] by direct summation.
inline double direct_box_mean(const RealGrid& map, int x0, int y0, int x1, int y1) {
  double s = 0.0;
  int count = 0;
  for (int y = std::max(y0, 0); y <= std::min(y1, map.rows - 1); ++y) {
    for (int x = std::max(x0, 0); x <= std::min(x1, map.cols - 1); ++x) {
      s += map.at(x, y);
      ++count;
    }
  }
  return s / count;
}

}  // namespace oracle
