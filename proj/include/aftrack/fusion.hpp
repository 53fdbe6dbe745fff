#pragma once

#include <vector>

#include "aftrack/grid.hpp"

namespace aftrack {

/// Append-only per-frame APCE record with a running mean.
class ConfidenceHistory {
 public:
  void append(double apce);

  bool empty() const { return values_.empty(); }
  std::size_t size() const { return values_.size(); }
  double mean() const;
  double sum() const { return sum_; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const ConfidenceHistory&, const ConfidenceHistory&) = default;

 private:
  std::vector<double> values_;
  double sum_ = 0.0;
};

struct FusionParams {
  double alpha = 0.25;  // base coefficient, 0 <= alpha <= 0.5
  double rho = 1.0;     // confidence influence, >= 0
  /// Flips the exponent sign so that high confidence favours the
  /// correlation filter instead of the color model.
  bool invert_confidence = false;
};

/// Average peak-to-correlation energy:
///   (F_max - F_min)^2 / mean((F - F_min)^2)
/// A constant map yields 0.
double apce(const RealGrid& response);

/// apce_t divided by the mean of the history extended with apce_t. Returns 1
/// for an empty or all-zero history.
double relative_confidence(double apce_t, const ConfidenceHistory& history);

/// alpha_t = 2 alpha / (1 + exp(rho (1 - r_t))), or exp(rho (r_t - 1)) with
/// invert_confidence.
double adaptive_alpha(double r_t, const FusionParams& params);

/// (1 - alpha_t) cf + alpha_t hist, cellwise. Keeps cf's geometry.
ResponseMap fuse_responses(const ResponseMap& cf, const ResponseMap& hist, double alpha_t);

/// True iff apce_t >= margin * mean(history); the history must not contain
/// the current frame yet. An empty history always passes.
bool update_gate(double apce_t, const ConfidenceHistory& history, double margin = 1.0);

}  // namespace aftrack
