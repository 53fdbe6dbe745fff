#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aftrack/sequence.hpp"

namespace aftrack {

enum class EventType { Translate, Scale, Gain, Occlude, Clutter };

/// One scripted change, active on frames start <= t < end (end < 0 means the
/// end of the sequence). Motion events act between consecutive frames: the
/// target moves by (dx, dy), or grows by `factor`, on every active frame t >= 1.
struct SynthEvent {
  EventType type = EventType::Translate;
  int start = 0;
  int end = -1;
  double dx = 0.0;
  double dy = 0.0;
  double factor = 1.0;    // scale per frame, or intensity gain
  double fraction = 1.0;  // occluded share of the target width, from the left
  int count = 4;          // clutter distractors
};

struct SynthSpec {
  std::string name = "synthetic";
  int width = 320;
  int height = 240;
  int frames = 100;
  std::uint64_t seed = 1;
  bool color = true;
  double noise = 0.0;  // per-frame Gaussian noise, intensity units
  double target_cx = 160.0;
  double target_cy = 120.0;
  double target_w = 40.0;
  double target_h = 40.0;
  std::vector<SynthEvent> events;
};

/// JSON form: {"name", "width", "height", "frames", "seed", "color", "noise",
/// "target": {"cx", "cy", "w", "h"}, "events": [{"type": "translate" | "scale"
/// | "gain" | "occlude" | "clutter", "start", "end", "duration", "dx", "dy",
/// "factor", "fraction", "count"}]}. "duration" sets end = start + duration.
SynthSpec parse_synth_spec(const std::string& json_text);
SynthSpec load_synth_spec(const std::string& path);

/// Renders the scripted sequence in memory. Bit-reproducible for a fixed
/// spec. Throws std::runtime_error if the target leaves the canvas.
Sequence synth_sequence(const SynthSpec& spec);

/// Writes `dir/img/0001.png, ...` and `dir/groundtruth_rect.txt`.
void write_sequence(const Sequence& seq, const std::string& dir);

}  // namespace aftrack
