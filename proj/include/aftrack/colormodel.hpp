#pragma once

#include <cstdint>
#include <vector>

#include "aftrack/geometry.hpp"
#include "aftrack/grid.hpp"
#include "aftrack/image.hpp"

namespace aftrack {

/// Per-bin foreground weights of the pixel-wise color classifier.
///
/// RGB patches use a joint histogram of bins_per_channel^3 bins; gray patches
/// fall back to a 1-D histogram of bins_per_channel bins.
struct ColorModel {
  int bins_per_channel = 32;
  bool gray = false;
  double lambda_hist = 1e-3;
  std::vector<double> beta;
  std::vector<double> fg_prop;
  std::vector<double> bg_prop;

  std::size_t bin_count() const { return beta.size(); }

  friend bool operator==(const ColorModel&, const ColorModel&) = default;
};

/// Pixels inside `outer` but not inside `inner` (pixel centers tested).
struct Annulus {
  BoundingBox outer;
  BoundingBox inner;
};

/// beta = rho_fg / (rho_fg + rho_bg + lambda); zero when the denominator is zero.
double color_weight(double rho_fg, double rho_bg, double lambda_hist);

/// Bin of pixel (x, y) under the model's histogram layout.
int pixel_bin(const Frame& patch, int x, int y, int bins_per_channel);

/// Fits per-bin weights from the foreground box and the background annulus.
/// Throws std::invalid_argument if either region holds no pixel.
ColorModel fit_color_weights(const Frame& patch, const BoundingBox& fg, const Annulus& bg,
                             int bins_per_channel, double lambda_hist);

/// Moves the proportions toward `fresh` at rate theta and recomputes beta.
ColorModel update_color_weights(const ColorModel& model, const ColorModel& fresh, double theta);

/// Per-pixel likelihood beta[bin(pixel)].
RealGrid likelihood_map(const Frame& patch, const ColorModel& model);

/// Summed-area table with an extra zero row/column.
class IntegralImage {
 public:
  explicit IntegralImage(const RealGrid& grid);

  /// Sum over the inclusive cell range [x0, x1] x [y0, y1], clipped to the grid.
  double box_sum(int x0, int y0, int x1, int y1) const;

 private:
  int cols_;
  int rows_;
  std::vector<double> table_;
};

/// Mean of `map` over a box_w x box_h box centered on every pixel. The box
/// covers pixels [x - box_w/2, x - box_w/2 + box_w - 1] (integer division),
/// clipped to the map; the mean is taken over the clipped part.
RealGrid box_mean(const RealGrid& map, int box_w, int box_h);

/// Color score of a target-sized box at each candidate center, sampled at
/// the cell centers of `grid` (geometry in patch pixel coordinates). The box
/// extent becomes the odd pixel count 2 * floor(w / 2) + 1.
ResponseMap color_response(const Frame& patch, const ColorModel& model, double target_w,
                           double target_h, const ResponseMap& grid);

/// Same, on an out_cols x out_rows grid spanning the whole patch.
ResponseMap color_response(const Frame& patch, const ColorModel& model, double target_w,
                           double target_h, int out_cols, int out_rows);

}  // namespace aftrack
