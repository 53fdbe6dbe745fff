#include "aftrack/tracker.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "aftrack/features.hpp"

namespace aftrack {

namespace {

int odd_cells(double extent, int cell) {
  const int n = std::max(3, static_cast<int>(std::lround(extent / cell)));
  return n % 2 == 1 ? n : n + 1;
}

BoundingBox search_region(const TrackerState& s, Point2 center, double scale) {
  return {center.x, center.y, s.geometry.window_w * scale, s.geometry.window_h * scale};
}

Frame search_patch(const TrackerState& s, const Frame& frame, const BoundingBox& region) {
  return extract_patch(frame, region, s.geometry.patch_w, s.geometry.patch_h);
}

// Windowed features of a search patch, before projection.
FeatureMap raw_sample(const TrackerState& s, const Frame& patch) {
  FeatureMap f = feature_stack(patch, s.config.cell_size, s.config.orientations);
  if (f.cols != s.geometry.cols || f.rows != s.geometry.rows) {
    FeatureMap out(s.geometry.cols, s.geometry.rows, f.channels);
    for (int c = 0; c < f.channels; ++c) {
      FeatureMap one(f.cols, f.rows, 1);
      std::copy(f.channel(c).begin(), f.channel(c).end(), one.data.begin());
      const FeatureMap r = resample_channel(one, s.geometry.cols, s.geometry.rows);
      std::copy(r.data.begin(), r.data.end(), out.channel(c).begin());
      out.cell_size = r.cell_size;
      out.origin_x = r.origin_x;
      out.origin_y = r.origin_y;
    }
    f = std::move(out);
  }
  apply_window(f, s.window);
  return f;
}

FeatureMap projected_sample(const TrackerState& s, const Frame& patch) {
  return apply_projection(raw_sample(s, patch), s.projection);
}

// Places a response on the search-patch cell grid with zero shift at the
// patch center.
ResponseMap on_patch_grid(const TrackerState& s, const ResponseMap& cyclic) {
  ResponseMap out = center_response(cyclic);
  out.cell_size = s.config.cell_size;
  out.origin_x = 0.5 * s.config.cell_size;
  out.origin_y = 0.5 * s.config.cell_size;
  return out;
}

RealGrid make_label(const TrackerState& s) {
  const double factor = s.geometry.patch_w / s.geometry.window_w;
  const double tw = s.geometry.target_w * factor / s.config.cell_size;
  const double th = s.geometry.target_h * factor / s.config.cell_size;
  return gaussian_label(s.geometry.cols, s.geometry.rows, std::sqrt(tw * th) * s.config.output_sigma_factor);
}

BoundingBox patch_target_box(const TrackerState& s) {
  const double factor = s.geometry.patch_w / s.geometry.window_w;
  return {0.5 * s.geometry.patch_w, 0.5 * s.geometry.patch_h, s.geometry.target_w * factor,
          s.geometry.target_h * factor};
}

ColorModel fit_color(const TrackerState& s, const Frame& patch) {
  const BoundingBox fg = patch_target_box(s);
  const BoundingBox whole{0.5 * patch.width, 0.5 * patch.height, static_cast<double>(patch.width),
                          static_cast<double>(patch.height)};
  return fit_color_weights(patch, fg, Annulus{whole, fg}, s.config.bins, s.config.lambda_hist);
}

}  // namespace

TrackerState init_tracker(const Frame& frame, const BoundingBox& box, const TrackerConfig& config) {
  validate_config(config);
  if (frame.empty()) throw std::invalid_argument("init_tracker: empty frame");
  if (!(box.w > 0.0) || !(box.h > 0.0) || box.area() < 16.0) {
    throw std::invalid_argument("init_tracker: degenerate box (area must be >= 16 px^2)");
  }
  if (box.cx < 0.0 || box.cy < 0.0 || box.cx > frame.width || box.cy > frame.height) {
    throw std::invalid_argument("init_tracker: box center outside the frame");
  }

  TrackerState s;
  s.config = config;
  s.position = {box.cx, box.cy};

  SearchGeometry& g = s.geometry;
  const double pad = 1.0 + config.padding;
  const double factor = config.template_size / std::sqrt(box.w * pad * box.h * pad);
  g.cols = odd_cells(box.w * pad * factor, config.cell_size);
  g.rows = odd_cells(box.h * pad * factor, config.cell_size);
  g.patch_w = g.cols * config.cell_size;
  g.patch_h = g.rows * config.cell_size;
  g.window_w = g.patch_w / factor;
  g.window_h = g.patch_h / factor;
  g.target_w = box.w;
  g.target_h = box.h;
  g.min_scale = std::min(1.0, 4.0 / std::min(box.w, box.h));
  g.max_scale = std::max(1.0, std::min(frame.width / box.w, frame.height / box.h));

  s.window = hann_window(g.cols, g.rows);
  s.pyramid = make_scale_pyramid(config.scales, config.scale_step, config.scale_penalty);

  const Frame patch = search_patch(s, frame, search_region(s, s.position, 1.0));
  const FeatureMap sample = raw_sample(s, patch);
  const RealGrid label = make_label(s);

  if (config.c_dim > sample.channels) {
    throw std::invalid_argument("init_tracker: projection.c_dim exceeds the feature dimension");
  }
  if (config.c_dim == sample.channels) {
    s.projection = ProjectionMatrix::identity(sample.channels);
  } else {
    ProjectionOptions opts;
    opts.c_dim = config.c_dim;
    opts.filter_reg = config.lambda;
    opts.projection_reg = config.projection_reg;
    opts.gn_iters = config.gn_iters;
    opts.cg_iters = config.cg_iters;
    opts.cg_tol = config.cg_tol;
    s.projection = learn_projection(std::span(&sample, 1), std::span(&label, 1), opts).projection;
  }

  s.filter = train_filter(apply_projection(sample, s.projection), label, config.lambda, config.solve_mode);
  s.filter_solution = solve_filter(s.filter);
  s.color = fit_color(s, patch);
  return s;
}

ResponseMap filter_response(const TrackerState& s, const Frame& frame) {
  const Frame patch = search_patch(s, frame, search_region(s, s.position, s.scale));
  return on_patch_grid(s, detect(s.filter_solution, fft2(projected_sample(s, patch))));
}

StepResult step(TrackerState& s, const Frame& frame) {
  if (frame.empty()) throw std::invalid_argument("step: empty frame");
  if (s.filter.numerator.empty()) throw std::invalid_argument("step: tracker not initialized");
  const TrackerConfig& cfg = s.config;
  Diagnostics diag;

  // Correlation response over the scale pyramid.
  const BoundingBox region = search_region(s, s.position, s.scale);
  const SampleExtractor extract = [&s](const Frame& f, const BoundingBox& r) {
    return fft2(projected_sample(s, search_patch(s, f, r)));
  };
  const ScaleSearchResult search = scale_search(s.filter_solution, frame, region, s.pyramid, extract);
  const ResponseMap cf = on_patch_grid(s, search.response);
  diag.scale_change = search.best_scale;
  diag.cf_peak = search.best_peak;

  // Color response on the same grid, from the winning scale's patch.
  BoundingBox best_region = region;
  best_region.w *= search.best_scale;
  best_region.h *= search.best_scale;
  const Frame patch = search_patch(s, frame, best_region);
  const BoundingBox target = patch_target_box(s);
  const ResponseMap hist = color_response(patch, s.color, target.w, target.h, cf);

  // Confidence-weighted fusion.
  diag.apce = apce(cf);
  diag.relative_confidence = relative_confidence(diag.apce, s.history);
  diag.alpha = cfg.adaptive_fusion
                   ? adaptive_alpha(diag.relative_confidence, {cfg.alpha, cfg.rho, cfg.invert_confidence})
                   : cfg.alpha;
  const ResponseMap fused = fuse_responses(cf, hist, diag.alpha);
  diag.peak = *std::max_element(fused.values.begin(), fused.values.end());

  // New position and scale.
  const Point2 peak = locate_peak(fused);
  const double to_image = best_region.w / s.geometry.patch_w;
  Point2 next{s.position.x + (peak.x - 0.5 * s.geometry.patch_w) * to_image,
              s.position.y + (peak.y - 0.5 * s.geometry.patch_h) * to_image};
  const double cx = std::clamp(next.x, 0.0, static_cast<double>(frame.width));
  const double cy = std::clamp(next.y, 0.0, static_cast<double>(frame.height));
  diag.clamped = cx != next.x || cy != next.y || best_region.w > frame.width || best_region.h > frame.height;
  s.position = {cx, cy};
  s.scale = std::clamp(s.scale * search.best_scale, s.geometry.min_scale, s.geometry.max_scale);

  // Model update, gated on confidence relative to the past.
  diag.gate = update_gate(diag.apce, s.history, cfg.gate_margin);
  s.history.append(diag.apce);
  if (diag.gate) {
    const Frame fresh = search_patch(s, frame, search_region(s, s.position, s.scale));
    const FilterModel sample =
        train_filter(projected_sample(s, fresh), make_label(s), cfg.lambda, cfg.solve_mode);
    s.filter = update_filter(s.filter, sample, cfg.eta);
    s.filter_solution = solve_filter(s.filter);
    s.color = update_color_weights(s.color, fit_color(s, fresh), cfg.theta_color);
  }

  return {s.box(), diag};
}

Point2 locate_peak(const ResponseMap& r) {
  if (r.values.empty()) throw std::invalid_argument("locate_peak: empty response");
  const double mid_x = 0.5 * (r.cols - 1);
  const double mid_y = 0.5 * (r.rows - 1);
  int bx = 0;
  int by = 0;
  double best = r.at(0, 0);
  double best_dist = (bx - mid_x) * (bx - mid_x) + (by - mid_y) * (by - mid_y);
  for (int y = 0; y < r.rows; ++y) {
    for (int x = 0; x < r.cols; ++x) {
      const double v = r.at(x, y);
      const double dist = (x - mid_x) * (x - mid_x) + (y - mid_y) * (y - mid_y);
      if (v > best || (v == best && dist < best_dist)) {
        best = v;
        best_dist = dist;
        bx = x;
        by = y;
      }
    }
  }

  // Fit f = a + b x + c y + d x^2 + e x y + g y^2 on the 3 x 3 neighbourhood
  // (x, y in {-1, 0, 1}); axes without both neighbours stay unrefined.
  const bool fit_x = bx > 0 && bx < r.cols - 1;
  const bool fit_y = by > 0 && by < r.rows - 1;
  double dx = 0.0;
  double dy = 0.0;
  if (fit_x && fit_y) {
    double b = 0.0, c = 0.0, d = 0.0, e = 0.0, g = 0.0;
    for (int j = -1; j <= 1; ++j) {
      for (int i = -1; i <= 1; ++i) {
        const double f = r.at(bx + i, by + j);
        b += i * f;
        c += j * f;
        d += (i * i - 2.0 / 3.0) * f;
        e += i * j * f;
        g += (j * j - 2.0 / 3.0) * f;
      }
    }
    b /= 6.0;
    c /= 6.0;
    d /= 2.0;
    e /= 4.0;
    g /= 2.0;
    const double det = 4.0 * d * g - e * e;
    if (d < 0.0 && det > 0.0) {
      dx = (e * c - 2.0 * g * b) / det;
      dy = (e * b - 2.0 * d * c) / det;
    } else {
      if (d < 0.0) dx = -b / (2.0 * d);
      if (g < 0.0) dy = -c / (2.0 * g);
    }
  } else {
    auto parabola = [](double fm, double f0, double fp) {
      const double curv = fm - 2.0 * f0 + fp;
      return curv < 0.0 ? 0.5 * (fm - fp) / curv : 0.0;
    };
    if (fit_x) dx = parabola(r.at(bx - 1, by), r.at(bx, by), r.at(bx + 1, by));
    if (fit_y) dy = parabola(r.at(bx, by - 1), r.at(bx, by), r.at(bx, by + 1));
  }
  dx = std::clamp(dx, -1.0, 1.0);
  dy = std::clamp(dy, -1.0, 1.0);
  return {r.origin_x + (bx + dx) * r.cell_size, r.origin_y + (by + dy) * r.cell_size};
}

}  // namespace aftrack
