#pragma once

#include <functional>
#include <span>
#include <vector>

#include "aftrack/features.hpp"
#include "aftrack/fft.hpp"
#include "aftrack/geometry.hpp"
#include "aftrack/grid.hpp"
#include "aftrack/image.hpp"

namespace aftrack {

enum class SolveMode {
  Exact,     // per-frequency C x C regularized solve
  Diagonal,  // shared denominator sum_c |x_c|^2, KCF/Staple style
};

/// Frequency-domain ridge-regression statistics.
///
/// numerator[u * C + c] = conj(x_c[u]) y[u]
/// denominator, Exact:    [u * C * C + i * C + j] = conj(x_i[u]) x_j[u]
/// denominator, Diagonal: [u] = sum_c |x_c[u]|^2
///
/// The filter implied by the statistics solves (S[u] + lambda I) h[u] = r[u].
struct FilterModel {
  int cols = 0;
  int rows = 0;
  int channels = 0;
  double lambda = 1e-3;
  SolveMode mode = SolveMode::Exact;
  std::vector<Complex> numerator;
  std::vector<Complex> denominator;

  std::size_t frequencies() const { return static_cast<std::size_t>(cols) * rows; }

  friend bool operator==(const FilterModel&, const FilterModel&) = default;
};

/// exp(-(dx^2 + dy^2) / (2 sigma^2)) with dx, dy the cyclic distances to
/// cell (0, 0), the zero-shift bin.
RealGrid gaussian_label(int cols, int rows, double sigma);

FilterModel train_filter(const Spectrum& features, const Spectrum& label, double lambda,
                         SolveMode mode = SolveMode::Exact);
FilterModel train_filter(const FeatureMap& features, const RealGrid& label, double lambda,
                         SolveMode mode = SolveMode::Exact);

/// Solves for the filter spectrum h (C channels). Frequencies whose system is
/// numerically singular (possible only with lambda == 0) get h = 0.
Spectrum solve_filter(const FilterModel& model);

/// Response over all cyclic shifts: real(IDFT(sum_c h_c z_c)). Cell (0, 0)
/// holds the zero-shift score.
ResponseMap detect(const Spectrum& filter, const Spectrum& features);
ResponseMap detect(const FilterModel& model, const FeatureMap& features);

/// Exponential moving average of both statistics toward `sample`.
FilterModel update_filter(const FilterModel& model, const FilterModel& sample, double eta);

/// Circularly shifts a cyclic response so the zero-shift cell lands at
/// (cols / 2, rows / 2).
ResponseMap center_response(const ResponseMap& cyclic);

struct ScalePyramid {
  std::vector<double> factors;
  std::vector<double> weights;  // multiplicative penalty applied to each peak
};

/// `count` factors step^k, k = -(count-1)/2 .. (count-1)/2, weighted by
/// penalty^-|k|.
ScalePyramid make_scale_pyramid(int count, double step, double penalty);

/// Produces the feature spectrum of the search region `region` of `frame`.
using SampleExtractor = std::function<Spectrum(const Frame& frame, const BoundingBox& region)>;

struct ScaleSearchResult {
  ResponseMap response;  // cyclic layout, from the winning scale
  std::size_t best_index = 0;
  double best_scale = 1.0;
  double best_peak = 0.0;  // unpenalized
  std::vector<double> peaks;
};

/// Runs detect on the search region resized by every pyramid factor and
/// keeps the scale with the largest penalized peak; ties go to the factor
/// closest to 1.
ScaleSearchResult scale_search(const Spectrum& filter, const Frame& frame, const BoundingBox& region,
                               const ScalePyramid& pyramid, const SampleExtractor& extract);

}  // namespace aftrack
