#include "aftrack/colormodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aftrack/features.hpp"

namespace aftrack {

namespace {

bool contains(const BoundingBox& box, double px, double py) {
  return px >= box.left() && px < box.right() && py >= box.top() && py < box.bottom();
}

std::size_t bins_for(const Frame& patch, int bins_per_channel) {
  const auto b = static_cast<std::size_t>(bins_per_channel);
  return patch.is_gray() ? b : b * b * b;
}

void recompute_beta(ColorModel& m) {
  m.beta.resize(m.fg_prop.size());
  for (std::size_t j = 0; j < m.beta.size(); ++j) {
    m.beta[j] = color_weight(m.fg_prop[j], m.bg_prop[j], m.lambda_hist);
  }
}

}  // namespace

double color_weight(double rho_fg, double rho_bg, double lambda_hist) {
  const double den = rho_fg + rho_bg + lambda_hist;
  return den > 0.0 ? rho_fg / den : 0.0;
}

int pixel_bin(const Frame& patch, int x, int y, int bins_per_channel) {
  if (patch.is_gray()) return gray_bin_index(patch.at(x, y), bins_per_channel);
  return color_bin_index(patch.at(x, y, 0), patch.at(x, y, 1), patch.at(x, y, 2), bins_per_channel);
}

ColorModel fit_color_weights(const Frame& patch, const BoundingBox& fg, const Annulus& bg,
                             int bins_per_channel, double lambda_hist) {
  if (bins_per_channel != 8 && bins_per_channel != 16 && bins_per_channel != 32) {
    throw std::invalid_argument("fit_color_weights: bins_per_channel must be 8, 16 or 32");
  }
  if (lambda_hist < 0.0) throw std::invalid_argument("fit_color_weights: lambda_hist must be >= 0");

  ColorModel m;
  m.bins_per_channel = bins_per_channel;
  m.gray = patch.is_gray();
  m.lambda_hist = lambda_hist;
  const std::size_t nb = bins_for(patch, bins_per_channel);
  m.fg_prop.assign(nb, 0.0);
  m.bg_prop.assign(nb, 0.0);

  double n_fg = 0.0;
  double n_bg = 0.0;
  for (int y = 0; y < patch.height; ++y) {
    const double py = y + 0.5;
    for (int x = 0; x < patch.width; ++x) {
      const double px = x + 0.5;
      const bool in_fg = contains(fg, px, py);
      const bool in_bg = contains(bg.outer, px, py) && !contains(bg.inner, px, py);
      if (!in_fg && !in_bg) continue;
      const int bin = pixel_bin(patch, x, y, bins_per_channel);
      if (in_fg) {
        m.fg_prop[bin] += 1.0;
        n_fg += 1.0;
      }
      if (in_bg) {
        m.bg_prop[bin] += 1.0;
        n_bg += 1.0;
      }
    }
  }
  if (n_fg == 0.0) throw std::invalid_argument("fit_color_weights: empty foreground region");
  if (n_bg == 0.0) throw std::invalid_argument("fit_color_weights: empty background region");
  for (double& v : m.fg_prop) v /= n_fg;
  for (double& v : m.bg_prop) v /= n_bg;
  recompute_beta(m);
  return m;
}

ColorModel update_color_weights(const ColorModel& model, const ColorModel& fresh, double theta) {
  if (model.bin_count() != fresh.bin_count() || model.gray != fresh.gray) {
    throw std::invalid_argument("update_color_weights: histogram layouts differ");
  }
  if (theta < 0.0 || theta > 1.0) {
    throw std::invalid_argument("update_color_weights: theta must be in [0, 1]");
  }
  ColorModel out = model;
  for (std::size_t j = 0; j < out.fg_prop.size(); ++j) {
    out.fg_prop[j] = (1.0 - theta) * model.fg_prop[j] + theta * fresh.fg_prop[j];
    out.bg_prop[j] = (1.0 - theta) * model.bg_prop[j] + theta * fresh.bg_prop[j];
  }
  recompute_beta(out);
  return out;
}

RealGrid likelihood_map(const Frame& patch, const ColorModel& model) {
  if (patch.is_gray() != model.gray) {
    throw std::invalid_argument("likelihood_map: patch color layout does not match the model");
  }
  RealGrid out(patch.width, patch.height);
  for (int y = 0; y < patch.height; ++y) {
    for (int x = 0; x < patch.width; ++x) {
      out.at(x, y) = model.beta[pixel_bin(patch, x, y, model.bins_per_channel)];
    }
  }
  return out;
}

IntegralImage::IntegralImage(const RealGrid& grid)
    : cols_(grid.cols), rows_(grid.rows),
      table_(static_cast<std::size_t>(grid.cols + 1) * (grid.rows + 1), 0.0) {
  const int stride = cols_ + 1;
  for (int y = 0; y < rows_; ++y) {
    double row = 0.0;
    for (int x = 0; x < cols_; ++x) {
      row += grid.at(x, y);
      table_[static_cast<std::size_t>(y + 1) * stride + x + 1] =
          table_[static_cast<std::size_t>(y) * stride + x + 1] + row;
    }
  }
}

double IntegralImage::box_sum(int x0, int y0, int x1, int y1) const {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, cols_ - 1);
  y1 = std::min(y1, rows_ - 1);
  if (x0 > x1 || y0 > y1) return 0.0;
  const int stride = cols_ + 1;
  auto t = [&](int x, int y) { return table_[static_cast<std::size_t>(y) * stride + x]; };
  return t(x1 + 1, y1 + 1) - t(x0, y1 + 1) - t(x1 + 1, y0) + t(x0, y0);
}

RealGrid box_mean(const RealGrid& map, int box_w, int box_h) {
  box_w = std::max(box_w, 1);
  box_h = std::max(box_h, 1);
  const IntegralImage integral(map);
  RealGrid out(map.cols, map.rows);
  for (int y = 0; y < map.rows; ++y) {
    const int y0 = y - box_h / 2;
    const int y1 = y0 + box_h - 1;
    const int cy0 = std::max(y0, 0);
    const int cy1 = std::min(y1, map.rows - 1);
    for (int x = 0; x < map.cols; ++x) {
      const int x0 = x - box_w / 2;
      const int x1 = x0 + box_w - 1;
      const int cx0 = std::max(x0, 0);
      const int cx1 = std::min(x1, map.cols - 1);
      const double area = static_cast<double>(cx1 - cx0 + 1) * (cy1 - cy0 + 1);
      out.at(x, y) = integral.box_sum(x0, y0, x1, y1) / area;
    }
  }
  return out;
}

namespace {

// Bilinear samples of `map` at pixel positions origin + i * step (per axis),
// clamped to the map.
ResponseMap sample_grid(const RealGrid& map, int cols, int rows, double origin_x, double origin_y,
                        double step_x, double step_y) {
  ResponseMap out(cols, rows);
  out.cell_size = step_x;
  out.origin_x = origin_x;
  out.origin_y = origin_y;
  for (int j = 0; j < rows; ++j) {
    const double sy = origin_y + j * step_y - 0.5;
    const double fy = std::floor(sy);
    const double wy = sy - fy;
    const int y0 = std::clamp(static_cast<int>(fy), 0, map.rows - 1);
    const int y1 = std::clamp(static_cast<int>(fy) + 1, 0, map.rows - 1);
    for (int i = 0; i < cols; ++i) {
      const double sx = origin_x + i * step_x - 0.5;
      const double fx = std::floor(sx);
      const double wx = sx - fx;
      const int x0 = std::clamp(static_cast<int>(fx), 0, map.cols - 1);
      const int x1 = std::clamp(static_cast<int>(fx) + 1, 0, map.cols - 1);
      const double top = map.at(x0, y0) + wx * (map.at(x1, y0) - map.at(x0, y0));
      const double bot = map.at(x0, y1) + wx * (map.at(x1, y1) - map.at(x0, y1));
      out.at(i, j) = top + wy * (bot - top);
    }
  }
  return out;
}

RealGrid target_box_mean(const Frame& patch, const ColorModel& model, double target_w,
                         double target_h) {
  // Odd box sizes keep the box centered on the pixel it scores.
  auto odd = [](double v) { return 2 * static_cast<int>(std::floor(0.5 * std::max(v, 1.0))) + 1; };
  return box_mean(likelihood_map(patch, model), odd(target_w), odd(target_h));
}

}  // namespace

ResponseMap color_response(const Frame& patch, const ColorModel& model, double target_w,
                           double target_h, const ResponseMap& grid) {
  return sample_grid(target_box_mean(patch, model, target_w, target_h), grid.cols, grid.rows,
                     grid.origin_x, grid.origin_y, grid.cell_size, grid.cell_size);
}

ResponseMap color_response(const Frame& patch, const ColorModel& model, double target_w,
                           double target_h, int out_cols, int out_rows) {
  if (out_cols < 1 || out_rows < 1) {
    throw std::invalid_argument("color_response: output grid must be nonempty");
  }
  const double step_x = static_cast<double>(patch.width) / out_cols;
  const double step_y = static_cast<double>(patch.height) / out_rows;
  return sample_grid(target_box_mean(patch, model, target_w, target_h), out_cols, out_rows,
                     0.5 * step_x, 0.5 * step_y, step_x, step_y);
}

}  // namespace aftrack
