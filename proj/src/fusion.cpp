#include "aftrack/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aftrack {

void ConfidenceHistory::append(double apce) {
  values_.push_back(apce);
  sum_ += apce;
}

double ConfidenceHistory::mean() const {
  return values_.empty() ? 0.0 : sum_ / static_cast<double>(values_.size());
}

double apce(const RealGrid& response) {
  if (response.values.empty()) throw std::invalid_argument("apce: empty response");
  const auto [lo, hi] = std::minmax_element(response.values.begin(), response.values.end());
  const double f_min = *lo;
  const double range = *hi - f_min;
  double energy = 0.0;
  for (double v : response.values) energy += (v - f_min) * (v - f_min);
  energy /= static_cast<double>(response.values.size());
  if (energy == 0.0) return 0.0;
  return range * range / energy;
}

double relative_confidence(double apce_t, const ConfidenceHistory& history) {
  if (apce_t < 0.0) throw std::invalid_argument("relative_confidence: apce must be >= 0");
  const double total = history.sum() + apce_t;
  if (total <= 0.0) return 1.0;
  return apce_t * static_cast<double>(history.size() + 1) / total;
}

double adaptive_alpha(double r_t, const FusionParams& params) {
  const double exponent = params.invert_confidence ? params.rho * (r_t - 1.0) : params.rho * (1.0 - r_t);
  return 2.0 * params.alpha / (1.0 + std::exp(exponent));
}

ResponseMap fuse_responses(const ResponseMap& cf, const ResponseMap& hist, double alpha_t) {
  if (cf.cols != hist.cols || cf.rows != hist.rows) {
    throw std::invalid_argument("fuse_responses: response grids differ");
  }
  if (alpha_t < 0.0 || alpha_t > 1.0) throw std::invalid_argument("fuse_responses: alpha_t out of [0, 1]");
  ResponseMap out = cf;
  if (alpha_t == 0.0) return out;
  if (alpha_t == 1.0) {
    out.values = hist.values;
    return out;
  }
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = (1.0 - alpha_t) * cf.values[i] + alpha_t * hist.values[i];
  }
  return out;
}

bool update_gate(double apce_t, const ConfidenceHistory& history, double margin) {
  if (!(margin > 0.0)) throw std::invalid_argument("update_gate: margin must be > 0");
  if (history.empty()) return true;
  return apce_t >= margin * history.mean();
}

}  // namespace aftrack
