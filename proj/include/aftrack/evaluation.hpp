#pragma once

#include <string>
#include <vector>

#include "aftrack/config.hpp"
#include "aftrack/geometry.hpp"
#include "aftrack/sequence.hpp"
#include "aftrack/tracker.hpp"

namespace aftrack {

/// Euclidean distance between box centers.
double center_error(const CornerBox& a, const CornerBox& b);

/// Intersection over union of the continuous box areas; 0 for empty unions.
double iou(const CornerBox& a, const CornerBox& b);

struct Curve {
  std::vector<double> thresholds;
  std::vector<double> values;
};

struct PrecisionCurve : Curve {
  double at20 = 0.0;
};

struct SuccessCurve : Curve {
  double auc = 0.0;
  double at50 = 0.0;
};

/// Fraction of frames with center error <= tau for tau = 0, 1, ..., max_threshold.
PrecisionCurve precision_curve(const std::vector<CornerBox>& traj, const std::vector<CornerBox>& gt,
                               int max_threshold = 50);

/// Fraction of frames with overlap >= tau for tau = 0, 0.02, ..., 1; AUC is
/// the mean over the 51 samples.
SuccessCurve success_curve(const std::vector<CornerBox>& traj, const std::vector<CornerBox>& gt);

struct OpeResult {
  std::vector<CornerBox> trajectory;      // one per frame, frame 0 is the init box
  std::vector<Diagnostics> diagnostics;   // one per frame; frame 0 is default-initialized
  double step_seconds = 0.0;
  std::size_t steps = 0;

  double fps() const { return step_seconds > 0.0 ? static_cast<double>(steps) / step_seconds : 0.0; }
};

/// One-pass evaluation: initialize on the first ground-truth box and step
/// through every remaining frame. Only step calls are timed. Errors are
/// rethrown as std::runtime_error carrying the frame index.
OpeResult run_ope(const TrackerConfig& config, const Sequence& seq);

struct EvalReport {
  std::string name;
  std::vector<std::string> attributes;
  std::vector<CornerBox> trajectory;
  std::vector<CornerBox> groundtruth;
  std::vector<bool> valid;
  std::vector<Diagnostics> diagnostics;
  std::vector<double> cpe;      // NaN where the ground truth is invalid
  std::vector<double> overlap;  // NaN where the ground truth is invalid
  PrecisionCurve precision;
  SuccessCurve success;
  double fps = 0.0;
};

/// Scores a trajectory over the frames with valid ground truth.
EvalReport evaluate(const std::string& name, const std::vector<CornerBox>& trajectory,
                    const std::vector<CornerBox>& groundtruth, const std::vector<bool>& valid);

/// run_ope followed by evaluate.
EvalReport evaluate_sequence(const TrackerConfig& config, const Sequence& seq);

/// Sequence folders under `dataset_root` (those holding a
/// groundtruth_rect.txt), sorted by name, optionally restricted to `names`.
std::vector<std::string> discover_sequences(const std::string& dataset_root,
                                            const std::vector<std::string>& names = {});

/// Evaluates the listed sequence folders on `jobs` threads, one tracker per
/// sequence. Attribute tags come from `dataset_root/attributes.txt` when present.
std::vector<EvalReport> run_benchmark(const std::string& dataset_root, const std::vector<std::string>& sequence_dirs,
                                      const TrackerConfig& config, int jobs = 1);

/// Writes `out/summary.json`, aggregate `precision.csv` and `success.csv`,
/// and per sequence `out/<name>/{trajectory.txt, groundtruth.txt,
/// precision.csv, success.csv, frames.csv, meta.json}`.
void emit_report(const std::vector<EvalReport>& reports, const std::string& out_dir);

/// Rebuilds reports from a directory written by emit_report, rescoring the
/// stored trajectories.
std::vector<EvalReport> load_reports(const std::string& results_dir);

/// Reads a curve CSV written by emit_report.
Curve read_curve_csv(const std::string& path);

}  // namespace aftrack
