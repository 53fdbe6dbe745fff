#include "aftrack/synth.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "aftrack/image_io.hpp"

namespace aftrack {

namespace {

using json = nlohmann::json;

// Uniform draws built directly on the engine output so that sequences do not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::array<double, 3>> px;
  Image(int w, int h) : width(w), height(h), px(static_cast<std::size_t>(w) * h) {}
  std::array<double, 3>& at(int x, int y) { return px[static_cast<std::size_t>(y) * width + x]; }
  const std::array<double, 3>& at(int x, int y) const { return px[static_cast<std::size_t>(y) * width + x]; }
};

// Smooth, muted background: a coarse random color lattice, bilinearly
// interpolated, plus fixed fine-grained grain.
Image make_background(int w, int h, Rng& rng) {
  constexpr int step = 24;
  const int gw = w / step + 2;
  const int gh = h / step + 2;
  std::vector<std::array<double, 3>> lattice(static_cast<std::size_t>(gw) * gh);
  for (auto& c : lattice) {
    const double base = rng.uniform(70.0, 150.0);
    c = {base + rng.uniform(-15.0, 15.0), base + rng.uniform(0.0, 25.0), base + rng.uniform(-15.0, 15.0)};
  }
  Image img(w, h);
  for (int y = 0; y < h; ++y) {
    const double fy = static_cast<double>(y) / step;
    const int y0 = static_cast<int>(fy);
    const double wy = fy - y0;
    for (int x = 0; x < w; ++x) {
      const double fx = static_cast<double>(x) / step;
      const int x0 = static_cast<int>(fx);
      const double wx = fx - x0;
      const double grain = rng.uniform(-12.0, 12.0);
      for (int c = 0; c < 3; ++c) {
        auto l = [&](int i, int j) { return lattice[static_cast<std::size_t>(j) * gw + i][c]; };
        const double top = l(x0, y0) + wx * (l(x0 + 1, y0) - l(x0, y0));
        const double bot = l(x0, y0 + 1) + wx * (l(x0 + 1, y0 + 1) - l(x0, y0 + 1));
        img.at(x, y)[c] = top + wy * (bot - top) + grain;
      }
    }
  }
  return img;
}

// Saturated blocky texture with strong edges.
Image make_target(int w, int h, Rng& rng) {
  static constexpr std::array<std::array<double, 3>, 4> palette = {{
      {230.0, 40.0, 30.0}, {250.0, 210.0, 20.0}, {30.0, 40.0, 200.0}, {20.0, 20.0, 20.0}}};
  constexpr int block = 5;
  const int bw = (w + block - 1) / block;
  const int bh = (h + block - 1) / block;
  std::vector<int> pick(static_cast<std::size_t>(bw) * bh);
  for (int& p : pick) p = std::min(static_cast<int>(rng.uniform() * palette.size()), 3);
  Image img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img.at(x, y) = palette[pick[static_cast<std::size_t>(y / block) * bw + x / block]];
  }
  return img;
}

// Draws `tex` stretched over `box` (pixel centers inside the box).
void paint(Image& canvas, const Image& tex, const BoundingBox& box) {
  const int x0 = std::max(0, static_cast<int>(std::floor(box.left())));
  const int x1 = std::min(canvas.width - 1, static_cast<int>(std::ceil(box.right())));
  const int y0 = std::max(0, static_cast<int>(std::floor(box.top())));
  const int y1 = std::min(canvas.height - 1, static_cast<int>(std::ceil(box.bottom())));
  for (int y = y0; y <= y1; ++y) {
    const double py = y + 0.5;
    if (py < box.top() || py >= box.bottom()) continue;
    const int ty = std::clamp(static_cast<int>((py - box.top()) / box.h * tex.height), 0, tex.height - 1);
    for (int x = x0; x <= x1; ++x) {
      const double px = x + 0.5;
      if (px < box.left() || px >= box.right()) continue;
      const int tx = std::clamp(static_cast<int>((px - box.left()) / box.w * tex.width), 0, tex.width - 1);
      canvas.at(x, y) = tex.at(tx, ty);
    }
  }
}

void restore(Image& canvas, const Image& background, const BoundingBox& box) {
  const int x0 = std::max(0, static_cast<int>(std::floor(box.left())));
  const int x1 = std::min(canvas.width - 1, static_cast<int>(std::ceil(box.right())));
  const int y0 = std::max(0, static_cast<int>(std::floor(box.top())));
  const int y1 = std::min(canvas.height - 1, static_cast<int>(std::ceil(box.bottom())));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) canvas.at(x, y) = background.at(x, y);
  }
}

bool active(const SynthEvent& e, int t, int frames) {
  const int end = e.end < 0 ? frames : e.end;
  return t >= e.start && t < end;
}

EventType event_type(const std::string& s) {
  if (s == "translate") return EventType::Translate;
  if (s == "scale") return EventType::Scale;
  if (s == "gain") return EventType::Gain;
  if (s == "occlude") return EventType::Occlude;
  if (s == "clutter") return EventType::Clutter;
  throw std::runtime_error("synth spec: unknown event type '" + s + "'");
}

}  // namespace

SynthSpec parse_synth_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("synth spec: ") + e.what());
  }
  SynthSpec s;
  try {
    s.name = j.value("name", s.name);
    s.width = j.value("width", s.width);
    s.height = j.value("height", s.height);
    s.frames = j.value("frames", s.frames);
    s.seed = j.value("seed", s.seed);
    s.color = j.value("color", s.color);
    s.noise = j.value("noise", s.noise);
    if (j.contains("target")) {
      const json& t = j.at("target");
      s.target_cx = t.value("cx", s.target_cx);
      s.target_cy = t.value("cy", s.target_cy);
      s.target_w = t.value("w", s.target_w);
      s.target_h = t.value("h", s.target_h);
    }
    for (const json& ej : j.value("events", json::array())) {
      SynthEvent e;
      e.type = event_type(ej.at("type").get<std::string>());
      e.start = ej.value("start", e.start);
      e.end = ej.value("end", e.end);
      if (ej.contains("duration")) e.end = e.start + ej.at("duration").get<int>();
      e.dx = ej.value("dx", e.dx);
      e.dy = ej.value("dy", e.dy);
      e.factor = ej.value("factor", e.factor);
      e.fraction = ej.value("fraction", e.fraction);
      e.count = ej.value("count", e.count);
      s.events.push_back(e);
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("synth spec: ") + e.what());
  }
  if (s.width < 8 || s.height < 8 || s.frames < 1 || !(s.target_w >= 4.0) || !(s.target_h >= 4.0) ||
      s.noise < 0.0) {
    throw std::runtime_error("synth spec: invalid canvas, frame count, target size or noise");
  }
  return s;
}

SynthSpec load_synth_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_synth_spec(buf.str());
}

Sequence synth_sequence(const SynthSpec& spec) {
  Rng rng(spec.seed);
  const Image background = make_background(spec.width, spec.height, rng);
  const int tex_w = std::max(4, static_cast<int>(std::lround(spec.target_w)));
  const int tex_h = std::max(4, static_cast<int>(std::lround(spec.target_h)));
  const Image texture = make_target(tex_w, tex_h, rng);

  // Distractor boxes are drawn once per clutter event, away from the target's
  // starting position.
  std::vector<std::vector<BoundingBox>> clutter(spec.events.size());
  for (std::size_t k = 0; k < spec.events.size(); ++k) {
    if (spec.events[k].type != EventType::Clutter) continue;
    const double dw = 0.6 * spec.target_w;
    const double dh = 0.6 * spec.target_h;
    for (int n = 0, tries = 0; n < spec.events[k].count && tries < 1000; ++tries) {
      const BoundingBox b{rng.uniform(0.5 * dw, spec.width - 0.5 * dw), rng.uniform(0.5 * dh, spec.height - 0.5 * dh),
                          dw, dh};
      if (std::abs(b.cx - spec.target_cx) < spec.target_w && std::abs(b.cy - spec.target_cy) < spec.target_h) continue;
      clutter[k].push_back(b);
      ++n;
    }
  }

  Sequence seq;
  seq.name = spec.name;
  BoundingBox box{spec.target_cx, spec.target_cy, spec.target_w, spec.target_h};
  for (int t = 0; t < spec.frames; ++t) {
    double gain = 1.0;
    double occluded = 0.0;
    for (const SynthEvent& e : spec.events) {
      if (!active(e, t, spec.frames)) continue;
      switch (e.type) {
        case EventType::Translate:
          if (t > 0) {
            box.cx += e.dx;
            box.cy += e.dy;
          }
          break;
        case EventType::Scale:
          if (t > 0) {
            box.w *= e.factor;
            box.h *= e.factor;
          }
          break;
        case EventType::Gain:
          gain *= e.factor;
          break;
        case EventType::Occlude:
          occluded = std::max(occluded, std::clamp(e.fraction, 0.0, 1.0));
          break;
        case EventType::Clutter:
          break;
      }
    }
    if (box.left() < 0.0 || box.top() < 0.0 || box.right() > spec.width || box.bottom() > spec.height) {
      throw std::runtime_error("synth: target leaves the canvas at frame " + std::to_string(t));
    }

    Image canvas = background;
    for (std::size_t k = 0; k < spec.events.size(); ++k) {
      if (spec.events[k].type != EventType::Clutter || !active(spec.events[k], t, spec.frames)) continue;
      for (const BoundingBox& b : clutter[k]) paint(canvas, texture, b);
    }
    paint(canvas, texture, box);
    if (occluded > 0.0) {
      const double cover = occluded * box.w;
      restore(canvas, background, {box.left() + 0.5 * cover - 1.0, box.cy, cover + 2.0, box.h + 2.0});
    }

    Rng noise(spec.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(t) + 1);
    Frame frame(spec.width, spec.height, spec.color ? 3 : 1);
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const auto& p = canvas.at(x, y);
        auto quantize = [&](double v) {
          v *= gain;
          if (spec.noise > 0.0) v += spec.noise * noise.normal();
          return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        };
        if (spec.color) {
          for (int c = 0; c < 3; ++c) frame.at(x, y, c) = quantize(p[c]);
        } else {
          frame.at(x, y) = quantize(0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]);
        }
      }
    }
    seq.frames.push_back(std::move(frame));
    seq.groundtruth.push_back(to_corner(box));
    seq.valid.push_back(true);
  }
  return seq;
}

void write_sequence(const Sequence& seq, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path img_dir = fs::path(dir) / "img";
  fs::create_directories(img_dir);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%04zu.png", i + 1);
    write_image((img_dir / name).string(), load_frame(seq, i));
  }
  write_groundtruth((fs::path(dir) / "groundtruth_rect.txt").string(), seq.groundtruth);
}

}  // namespace aftrack
