#pragma once

#include "aftrack/colormodel.hpp"
#include "aftrack/config.hpp"
#include "aftrack/corrfilter.hpp"
#include "aftrack/fusion.hpp"
#include "aftrack/geometry.hpp"
#include "aftrack/image.hpp"
#include "aftrack/projection.hpp"

namespace aftrack {

/// Fixed per-sequence sampling geometry chosen at initialization.
struct SearchGeometry {
  int patch_w = 0;  // normalized search patch, pixels
  int patch_h = 0;
  int cols = 0;  // feature grid, odd
  int rows = 0;
  double window_w = 0.0;  // search window in the image at scale 1
  double window_h = 0.0;
  double target_w = 0.0;  // target in the image at scale 1
  double target_h = 0.0;
  double min_scale = 0.0;
  double max_scale = 0.0;
};

struct TrackerState {
  Point2 position;  // sub-pixel target center, image pixels
  double scale = 1.0;
  SearchGeometry geometry;
  FilterModel filter;
  ColorModel color;
  ProjectionMatrix projection;
  ConfidenceHistory history;
  TrackerConfig config;

  // Derived from the fields above and rebuilt on model updates.
  Spectrum filter_solution;
  RealGrid window;
  ScalePyramid pyramid;

  double target_w() const { return geometry.target_w * scale; }
  double target_h() const { return geometry.target_h * scale; }
  BoundingBox box() const { return {position.x, position.y, target_w(), target_h()}; }
};

struct Diagnostics {
  double apce = 0.0;
  double relative_confidence = 1.0;
  double alpha = 0.0;
  bool gate = true;
  double scale_change = 1.0;  // factor chosen by the scale search this frame
  double cf_peak = 0.0;
  double peak = 0.0;  // fused response maximum
  bool clamped = false;  // search window larger than the frame, or the center was clamped
};

struct StepResult {
  BoundingBox box;
  Diagnostics diagnostics;
};

/// Throws std::invalid_argument for an invalid config, an empty frame, a box
/// with area below 16 px^2 or a box whose center lies outside the frame.
TrackerState init_tracker(const Frame& frame, const BoundingBox& box, const TrackerConfig& config = {});

/// Advances the tracker by one frame, updating `state` in place.
StepResult step(TrackerState& state, const Frame& frame);

/// Argmax of the map refined by a least-squares quadratic over its 3 x 3
/// neighbourhood, in the map's coordinates (origin + index * cell_size).
/// Exact ties go to the cell nearest the grid center.
Point2 locate_peak(const ResponseMap& response);

/// Correlation response of the current model on `frame` at the state's
/// position and scale, centered (zero shift in the middle cell), with cell
/// geometry in search-patch pixels.
ResponseMap filter_response(const TrackerState& state, const Frame& frame);

}  // namespace aftrack
