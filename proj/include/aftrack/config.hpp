#pragma once

#include <iosfwd>
#include <string>

#include "aftrack/corrfilter.hpp"

namespace aftrack {

struct TrackerConfig {
  // correlation filter
  double lambda = 1e-3;
  double eta = 0.01;
  double output_sigma_factor = 1.0 / 16.0;
  SolveMode solve_mode = SolveMode::Exact;

  // color model
  double theta_color = 0.04;
  int bins = 32;
  double lambda_hist = 1e-3;

  // fusion
  double alpha = 0.25;
  double rho = 1.0;
  bool adaptive_fusion = true;  // false keeps alpha_t = alpha
  bool invert_confidence = false;
  double gate_margin = 1.0;

  // projection
  int c_dim = 12;
  double projection_reg = 1e-2;
  int gn_iters = 5;
  int cg_iters = 20;
  double cg_tol = 1e-6;

  // search
  double padding = 2.0;
  int cell_size = 4;
  int orientations = 9;
  double template_size = 150.0;  // side of the normalized search patch area
  int scales = 5;
  double scale_step = 1.02;
  double scale_penalty = 1.015;

  friend bool operator==(const TrackerConfig&, const TrackerConfig&) = default;
};

/// Throws std::invalid_argument naming the first offending field.
void validate_config(const TrackerConfig& config);

/// Parses flat `key = value` lines; `#` starts a comment. Unset keys keep
/// their defaults. Unknown keys and malformed values throw
/// std::invalid_argument with the line number.
TrackerConfig parse_config(std::istream& in);
TrackerConfig load_config(const std::string& path);

/// Writes every key in the format accepted by parse_config.
void write_config(std::ostream& out, const TrackerConfig& config);

}  // namespace aftrack
