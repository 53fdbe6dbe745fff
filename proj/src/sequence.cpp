#include "aftrack/sequence.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "aftrack/image_io.hpp"

namespace aftrack {

namespace fs = std::filesystem;

namespace {

bool is_separator(char c) { return c == ',' || c == ';' || c == ':' || std::isspace(static_cast<unsigned char>(c)); }

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (is_separator(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool is_image(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp";
}

// Numeric value of the last digit run in the file stem, or -1.
long long frame_number(const fs::path& p) {
  const std::string stem = p.stem().string();
  auto end = stem.find_last_of("0123456789");
  if (end == std::string::npos) return -1;
  auto begin = stem.find_last_not_of("0123456789", end);
  begin = begin == std::string::npos ? 0 : begin + 1;
  return std::stoll(stem.substr(begin, end - begin + 1));
}

}  // namespace

Frame load_frame(const Sequence& seq, std::size_t i) {
  if (!seq.frame_paths.empty()) return read_image(seq.frame_paths.at(i));
  return seq.frames.at(i);
}

std::vector<CornerBox> parse_groundtruth(std::istream& in) {
  std::vector<CornerBox> boxes;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != 4) {
      throw std::runtime_error("groundtruth line " + std::to_string(number) + ": expected 4 fields, got " +
                               std::to_string(fields.size()));
    }
    double v[4];
    for (int k = 0; k < 4; ++k) {
      char* end = nullptr;
      v[k] = std::strtod(fields[k].c_str(), &end);
      if (end == fields[k].c_str() || *end != '\0') {
        throw std::runtime_error("groundtruth line " + std::to_string(number) + ": cannot parse '" + fields[k] +
                                 "'");
      }
    }
    boxes.push_back({v[0], v[1], v[2], v[3]});
  }
  return boxes;
}

std::vector<CornerBox> read_groundtruth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return parse_groundtruth(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_groundtruth(std::ostream& out, const std::vector<CornerBox>& boxes) {
  std::ostringstream line;
  line << std::setprecision(17);
  for (const CornerBox& b : boxes) {
    line.str({});
    line << b.x << ',' << b.y << ',' << b.w << ',' << b.h << '\n';
    out << line.str();
  }
}

void write_groundtruth(const std::string& path, const std::vector<CornerBox>& boxes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_groundtruth(out, boxes);
  if (!out) throw std::runtime_error("cannot write " + path);
}

Sequence load_otb_sequence(const std::string& dir) {
  const fs::path root(dir);
  const fs::path img_dir = root / "img";
  const fs::path gt_path = root / "groundtruth_rect.txt";
  if (!fs::is_directory(img_dir)) throw std::runtime_error("missing image folder " + img_dir.string());
  if (!fs::is_regular_file(gt_path)) throw std::runtime_error("missing " + gt_path.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(img_dir)) {
    if (entry.is_regular_file() && is_image(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    const auto na = frame_number(a);
    const auto nb = frame_number(b);
    return na != nb ? na < nb : a.filename() < b.filename();
  });
  if (files.empty()) throw std::runtime_error("no frames in " + img_dir.string());

  Sequence seq;
  seq.name = fs::absolute(root).lexically_normal().filename().string();
  if (seq.name.empty()) seq.name = fs::absolute(root).lexically_normal().parent_path().filename().string();
  for (const auto& f : files) seq.frame_paths.push_back(f.string());
  seq.groundtruth = read_groundtruth(gt_path.string());
  if (seq.groundtruth.size() != seq.frame_paths.size()) {
    throw std::runtime_error(seq.name + ": " + std::to_string(seq.frame_paths.size()) + " frames but " +
                             std::to_string(seq.groundtruth.size()) + " ground-truth boxes");
  }
  for (const CornerBox& b : seq.groundtruth) {
    seq.valid.push_back(std::isfinite(b.x) && std::isfinite(b.y) && b.w > 0.0 && b.h > 0.0);
  }
  return seq;
}

std::vector<std::pair<std::string, std::vector<std::string>>> read_attributes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    std::string name = std::move(fields.front());
    fields.erase(fields.begin());
    out.emplace_back(std::move(name), std::move(fields));
  }
  return out;
}

}  // namespace aftrack
