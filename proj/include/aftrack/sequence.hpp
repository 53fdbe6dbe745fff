#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aftrack/geometry.hpp"
#include "aftrack/image.hpp"

namespace aftrack {

/// A tracking sequence backed either by frame files or by in-memory frames.
struct Sequence {
  std::string name;
  std::vector<std::string> frame_paths;
  std::vector<Frame> frames;            // used when frame_paths is empty
  std::vector<CornerBox> groundtruth;   // 1-based corner boxes, one per frame
  std::vector<bool> valid;              // false where the ground truth has a non-positive extent
  std::vector<std::string> attributes;  // challenge tags such as IV, OCC, SV

  std::size_t size() const { return groundtruth.size(); }
};

/// Frame i, decoded from disk for file-backed sequences.
Frame load_frame(const Sequence& seq, std::size_t i);

/// Parses one box per line with fields separated by commas, tabs or spaces.
/// Throws std::runtime_error naming the line on malformed input.
std::vector<CornerBox> parse_groundtruth(std::istream& in);
std::vector<CornerBox> read_groundtruth(const std::string& path);
void write_groundtruth(std::ostream& out, const std::vector<CornerBox>& boxes);
void write_groundtruth(const std::string& path, const std::vector<CornerBox>& boxes);

/// Loads `dir/img/*` (sorted numerically) and `dir/groundtruth_rect.txt`.
/// The sequence name is the directory name.
Sequence load_otb_sequence(const std::string& dir);

/// Reads an attribute sidecar: one sequence per line, the name followed by
/// its tags, separated by commas, colons or whitespace.
std::vector<std::pair<std::string, std::vector<std::string>>> read_attributes(const std::string& path);

}  // namespace aftrack
