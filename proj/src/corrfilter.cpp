#include "aftrack/corrfilter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace aftrack {

namespace {

// Solves (A + lambda I) x = b for Hermitian positive semi-definite A in place
// via Cholesky. `a` is C x C row-major and is overwritten. Returns false if a
// pivot vanishes.
bool hermitian_solve(std::span<Complex> a, double lambda, std::span<Complex> b, int n) {
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    a[i * n + i] += lambda;
    scale = std::max(scale, a[i * n + i].real());
  }
  const double tiny = std::max(scale, 1.0) * 1e-14;
  // Lower-triangular factor L stored in the lower part of `a`.
  for (int j = 0; j < n; ++j) {
    double d = a[j * n + j].real();
    for (int k = 0; k < j; ++k) d -= std::norm(a[j * n + k]);
    if (!(d > tiny)) return false;
    const double ljj = std::sqrt(d);
    a[j * n + j] = ljj;
    for (int i = j + 1; i < n; ++i) {
      Complex s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= a[i * n + k] * std::conj(a[j * n + k]);
      a[i * n + j] = s / ljj;
    }
  }
  for (int i = 0; i < n; ++i) {
    Complex s = b[i];
    for (int k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i].real();
  }
  for (int i = n - 1; i >= 0; --i) {
    Complex s = b[i];
    for (int k = i + 1; k < n; ++k) s -= std::conj(a[k * n + i]) * b[k];
    b[i] = s / a[i * n + i].real();
  }
  return true;
}

}  // namespace

RealGrid gaussian_label(int cols, int rows, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_label: sigma must be > 0");
  RealGrid out(cols, rows);
  const double k = -0.5 / (sigma * sigma);
  for (int y = 0; y < rows; ++y) {
    const int dy = y <= rows / 2 ? y : y - rows;
    for (int x = 0; x < cols; ++x) {
      const int dx = x <= cols / 2 ? x : x - cols;
      out.at(x, y) = std::exp(k * (dx * dx + dy * dy));
    }
  }
  return out;
}

FilterModel train_filter(const Spectrum& features, const Spectrum& label, double lambda,
                         SolveMode mode) {
  if (features.cols != label.cols || features.rows != label.rows || label.channels != 1) {
    throw std::invalid_argument("train_filter: label grid does not match features");
  }
  if (lambda < 0.0) throw std::invalid_argument("train_filter: lambda must be >= 0");

  FilterModel m;
  m.cols = features.cols;
  m.rows = features.rows;
  m.channels = features.channels;
  m.lambda = lambda;
  m.mode = mode;
  const std::size_t n = m.frequencies();
  const int nc = m.channels;
  m.numerator.resize(n * nc);
  m.denominator.assign(mode == SolveMode::Exact ? n * nc * nc : n, Complex{});

  const auto y = label.channel(0);
  std::vector<Complex> xu(nc);
  for (std::size_t u = 0; u < n; ++u) {
    for (int c = 0; c < nc; ++c) xu[c] = features.data[c * n + u];
    for (int c = 0; c < nc; ++c) m.numerator[u * nc + c] = std::conj(xu[c]) * y[u];
    if (mode == SolveMode::Exact) {
      Complex* s = m.denominator.data() + u * nc * nc;
      for (int i = 0; i < nc; ++i) {
        s[i * nc + i] = std::norm(xu[i]);
        for (int j = i + 1; j < nc; ++j) {
          s[i * nc + j] = std::conj(xu[i]) * xu[j];
          s[j * nc + i] = std::conj(s[i * nc + j]);
        }
      }
    } else {
      double e = 0.0;
      for (int c = 0; c < nc; ++c) e += std::norm(xu[c]);
      m.denominator[u] = e;
    }
  }
  return m;
}

FilterModel train_filter(const FeatureMap& features, const RealGrid& label, double lambda,
                         SolveMode mode) {
  return train_filter(fft2(features), fft2(label), lambda, mode);
}

Spectrum solve_filter(const FilterModel& model) {
  const std::size_t n = model.frequencies();
  const int nc = model.channels;
  Spectrum h(model.cols, model.rows, nc);
  if (model.mode == SolveMode::Diagonal) {
    for (std::size_t u = 0; u < n; ++u) {
      const double d = model.denominator[u].real() + model.lambda;
      for (int c = 0; c < nc; ++c) {
        h.data[c * n + u] = d > 0.0 ? model.numerator[u * nc + c] / d : Complex{};
      }
    }
    return h;
  }
  std::vector<Complex> a(static_cast<std::size_t>(nc) * nc);
  std::vector<Complex> b(nc);
  for (std::size_t u = 0; u < n; ++u) {
    std::copy_n(model.denominator.begin() + static_cast<std::ptrdiff_t>(u * nc * nc), nc * nc,
                a.begin());
    std::copy_n(model.numerator.begin() + static_cast<std::ptrdiff_t>(u * nc), nc, b.begin());
    if (!hermitian_solve(a, model.lambda, b, nc)) std::fill(b.begin(), b.end(), Complex{});
    for (int c = 0; c < nc; ++c) h.data[c * n + u] = b[c];
  }
  return h;
}

ResponseMap detect(const Spectrum& filter, const Spectrum& features) {
  if (filter.cols != features.cols || filter.rows != features.rows ||
      filter.channels != features.channels) {
    throw std::invalid_argument("detect: feature dimensions do not match the filter");
  }
  const std::size_t n = filter.plane_size();
  std::vector<Complex> acc(n, Complex{});
  for (int c = 0; c < filter.channels; ++c) {
    const auto h = filter.channel(c);
    const auto z = features.channel(c);
    for (std::size_t u = 0; u < n; ++u) acc[u] += h[u] * z[u];
  }
  ResponseMap out(filter.cols, filter.rows);
  ifft2_real(acc, filter.cols, filter.rows, out.values);
  return out;
}

ResponseMap detect(const FilterModel& model, const FeatureMap& features) {
  return detect(solve_filter(model), fft2(features));
}

FilterModel update_filter(const FilterModel& model, const FilterModel& sample, double eta) {
  if (model.cols != sample.cols || model.rows != sample.rows || model.channels != sample.channels ||
      model.mode != sample.mode) {
    throw std::invalid_argument("update_filter: sample statistics do not match the model");
  }
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("update_filter: eta must be in [0, 1]");
  FilterModel out = model;
  const double keep = 1.0 - eta;
  for (std::size_t i = 0; i < out.numerator.size(); ++i) {
    out.numerator[i] = keep * model.numerator[i] + eta * sample.numerator[i];
  }
  for (std::size_t i = 0; i < out.denominator.size(); ++i) {
    out.denominator[i] = keep * model.denominator[i] + eta * sample.denominator[i];
  }
  return out;
}

ResponseMap center_response(const ResponseMap& cyclic) {
  ResponseMap out = cyclic;
  const int cx = cyclic.cols / 2;
  const int cy = cyclic.rows / 2;
  for (int y = 0; y < cyclic.rows; ++y) {
    const int sy = (y - cy + cyclic.rows) % cyclic.rows;
    for (int x = 0; x < cyclic.cols; ++x) {
      const int sx = (x - cx + cyclic.cols) % cyclic.cols;
      out.at(x, y) = cyclic.at(sx, sy);
    }
  }
  return out;
}

ScalePyramid make_scale_pyramid(int count, double step, double penalty) {
  if (count < 1 || !(step > 0.0) || !(penalty > 0.0)) {
    throw std::invalid_argument("make_scale_pyramid: invalid parameters");
  }
  ScalePyramid p;
  const double mid = 0.5 * (count - 1);
  for (int i = 0; i < count; ++i) {
    const double k = i - mid;
    p.factors.push_back(std::pow(step, k));
    p.weights.push_back(std::pow(penalty, -std::abs(k)));
  }
  return p;
}

ScaleSearchResult scale_search(const Spectrum& filter, const Frame& frame, const BoundingBox& region,
                               const ScalePyramid& pyramid, const SampleExtractor& extract) {
  const auto& factors = pyramid.factors;
  if (factors.empty() || pyramid.weights.size() != factors.size()) {
    throw std::invalid_argument("scale_search: empty or inconsistent scale pyramid");
  }
  for (double s : factors) {
    if (!(s > 0.0)) throw std::invalid_argument("scale_search: scale factors must be > 0");
  }

  // Visit factors nearest to 1 first so that strict improvement breaks ties
  // toward the unscaled window.
  std::vector<std::size_t> order(factors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(std::log(factors[a])) < std::abs(std::log(factors[b]));
  });

  ScaleSearchResult result;
  result.peaks.assign(factors.size(), 0.0);
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i : order) {
    BoundingBox scaled = region;
    scaled.w *= factors[i];
    scaled.h *= factors[i];
    ResponseMap response = detect(filter, extract(frame, scaled));
    const double peak = *std::max_element(response.values.begin(), response.values.end());
    result.peaks[i] = peak;
    const double w = pyramid.weights[i];
    const double score = peak >= 0.0 ? peak * w : peak / w;
    if (score > best_score) {
      best_score = score;
      result.best_index = i;
      result.best_scale = factors[i];
      result.best_peak = peak;
      result.response = std::move(response);
    }
  }
  return result;
}

}  // namespace aftrack
