#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "aftrack/features.hpp"
#include "aftrack/fft.hpp"
#include "aftrack/grid.hpp"

namespace aftrack {

/// D x C channel-reduction matrix, row-major (row d, column c).
struct ProjectionMatrix {
  int rows = 0;  // input channels D
  int cols = 0;  // output channels C
  std::vector<double> data;

  ProjectionMatrix() = default;
  ProjectionMatrix(int d, int c, double fill = 0.0);

  static ProjectionMatrix identity(int d);

  double& at(int d, int c) { return data[static_cast<std::size_t>(d) * cols + c]; }
  double at(int d, int c) const { return data[static_cast<std::size_t>(d) * cols + c]; }

  friend bool operator==(const ProjectionMatrix&, const ProjectionMatrix&) = default;
};

/// Cubic convolution kernel (Keys, a = -0.5), support of four cells. Its
/// integer translates sum to one at every offset.
struct InterpolationKernel {
  double a = -0.5;
  double support = 4.0;

  double operator()(double t) const;
};

/// Samples of channel d extended beyond the grid edges by linear
/// extrapolation of the two nearest samples, so that constant and linear
/// fields are reproduced exactly by the cubic kernel.
double extended_sample(std::span<const double> samples, long index);

/// Evaluates the kernel-interpolated continuous channel at the centers of a
/// target_cols x target_rows grid covering the same extent. Input must be
/// single-channel.
FeatureMap resample_channel(const FeatureMap& channel, int target_cols, int target_rows,
                            const InterpolationKernel& kernel = {});

/// out_c = sum_d p[d, c] * in_d at every cell.
FeatureMap apply_projection(const FeatureMap& features, const ProjectionMatrix& p);

/// Same map applied to spectra (the projection commutes with the DFT).
Spectrum apply_projection(const Spectrum& features, const ProjectionMatrix& p);

/// Top-c principal directions of the per-channel sample vectors (channels
/// mean-centered across all cells of all samples). Columns are orthonormal.
ProjectionMatrix pca_projection(std::span<const FeatureMap> samples, int c_dim);

using LinearOperator = std::function<void(std::span<const double> x, std::span<double> out)>;

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Conjugate gradient from x = 0 for a symmetric positive (semi-)definite
/// operator. Stops when ||r|| <= tol * ||b|| or after `max_iters` steps.
/// Throws std::runtime_error on a non-finite intermediate.
CgResult cg_solve(const LinearOperator& apply_a, std::span<const double> b, int max_iters,
                  double tol);

struct ProjectionOptions {
  int c_dim = 12;
  double filter_reg = 1e-3;      // penalty on the projected filter
  double projection_reg = 1e-2;  // penalty on ||P||^2
  int gn_iters = 5;
  int cg_iters = 20;
  double cg_tol = 1e-6;
  std::optional<ProjectionMatrix> initial;  // replaces the PCA initialization
};

struct ProjectionResult {
  ProjectionMatrix projection;
  Spectrum filter;                 // C-channel filter spectrum
  std::vector<double> objective;   // value at the start and after every Gauss-Newton step
};

/// Factorized objective
///   sum_j w_j ||sum_c (P^T x_j)_c * f_c - y_j||^2 + filter_reg ||f||^2 + projection_reg ||P||^2
/// with uniform sample weights w_j = 1/M, evaluated in the Fourier domain.
/// `samples` are D-channel spectra, `labels` single-channel spectra.
double factorized_objective(std::span<const Spectrum> samples, std::span<const Spectrum> labels,
                            const ProjectionMatrix& p, const Spectrum& filter,
                            const ProjectionOptions& options);

/// Best filter for a fixed projection: per-frequency closed form of the
/// ridge problem on projected samples.
Spectrum fit_projected_filter(std::span<const Spectrum> samples, std::span<const Spectrum> labels,
                              const ProjectionMatrix& p, double filter_reg);

/// Learns P (PCA start) and the filter jointly by Gauss-Newton on the
/// factorized objective, each step solved by conjugate gradient and
/// accepted with backtracking so the objective never increases.
ProjectionResult learn_projection(std::span<const FeatureMap> samples,
                                  std::span<const RealGrid> labels,
                                  const ProjectionOptions& options = {});

}  // namespace aftrack
