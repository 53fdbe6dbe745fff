#pragma once

#include <span>
#include <vector>

#include "aftrack/geometry.hpp"
#include "aftrack/grid.hpp"
#include "aftrack/image.hpp"

namespace aftrack {

/// cols x rows x channels feature grid, stored channel-planar: each channel
/// is a contiguous row-major plane. Cell (0, 0) is centered at
/// (origin_x, origin_y) in the coordinates of the patch it was computed from.
struct FeatureMap {
  int cols = 0;
  int rows = 0;
  int channels = 0;
  double cell_size = 1.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<double> data;

  FeatureMap() = default;
  FeatureMap(int c, int r, int ch, double fill = 0.0);

  std::size_t plane_size() const { return static_cast<std::size_t>(cols) * rows; }

  std::span<double> channel(int c) {
    return {data.data() + c * plane_size(), plane_size()};
  }
  std::span<const double> channel(int c) const {
    return {data.data() + c * plane_size(), plane_size()};
  }

  double& at(int c, int x, int y) { return data[c * plane_size() + static_cast<std::size_t>(y) * cols + x]; }
  double at(int c, int x, int y) const { return data[c * plane_size() + static_cast<std::size_t>(y) * cols + x]; }
};

/// Felzenszwalb HOG layout: 2*orientations signed bins, orientations
/// unsigned bins and four gradient-energy (texture) channels.
constexpr int hog_channel_count(int orientations) { return 3 * orientations + 4; }

/// Resamples the part of `frame` covered by `box` to out_w x out_h pixels with
/// bilinear interpolation. Samples falling outside the frame replicate the
/// nearest border pixel.
Frame extract_patch(const Frame& frame, const BoundingBox& box, int out_w, int out_h);

/// Felzenszwalb-style HOG: soft orientation binning, bilinear spatial
/// binning, four-block normalization with truncation at 0.2. Throws
/// std::invalid_argument if the patch dimensions are not multiples of
/// cell_size.
FeatureMap hog_features(const Plane& gray, int cell_size, int orientations = 9);

/// Mean intensity per cell, centered on the patch mean and halved, so that
/// values lie in [-0.5, 0.5].
FeatureMap gray_features(const Plane& gray, int cell_size);

/// Joint RGB bin br*B^2 + bg*B + bb with bc = floor(c*B/256).
int color_bin_index(int r, int g, int b, int bins_per_channel);

/// 1-D intensity bin used for gray frames.
int gray_bin_index(int v, int bins);

/// Separable raised-cosine window, zero at the borders and one at the center.
RealGrid hann_window(int cols, int rows);

/// HOG channels followed by the gray channel, all on the HOG cell grid.
FeatureMap feature_stack(const Frame& patch, int cell_size, int orientations = 9);

/// Multiplies every channel by `window` (same grid).
void apply_window(FeatureMap& features, const RealGrid& window);

}  // namespace aftrack
