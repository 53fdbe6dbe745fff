#include "aftrack/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace aftrack {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void require_equal_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": trajectory has " + std::to_string(a) +
                                " boxes, ground truth " + std::to_string(b));
  }
  if (a == 0) throw std::invalid_argument(std::string(what) + ": no frames");
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << std::setprecision(17);
  return out;
}

void write_curve(const fs::path& p, const Curve& c) {
  auto out = open_out(p);
  out << "threshold,value\n";
  for (std::size_t i = 0; i < c.values.size(); ++i) out << c.thresholds[i] << ',' << c.values[i] << '\n';
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double parse_number(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Curve mean_curve(const std::vector<const Curve*>& curves) {
  Curve out;
  out.thresholds = curves.front()->thresholds;
  out.values.assign(out.thresholds.size(), 0.0);
  for (const Curve* c : curves) {
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += c->values[i];
  }
  for (double& v : out.values) v /= static_cast<double>(curves.size());
  return out;
}

json aggregate(const std::vector<const EvalReport*>& reports) {
  double p20 = 0.0, auc = 0.0, s50 = 0.0, fps = 0.0;
  for (const EvalReport* r : reports) {
    p20 += r->precision.at20;
    auc += r->success.auc;
    s50 += r->success.at50;
    fps += r->fps;
  }
  const double n = static_cast<double>(reports.size());
  return {{"count", reports.size()}, {"precision20", p20 / n}, {"auc", auc / n}, {"success50", s50 / n},
          {"fps", fps / n}};
}

}  // namespace

double center_error(const CornerBox& a, const CornerBox& b) {
  const double dx = (a.x + 0.5 * a.w) - (b.x + 0.5 * b.w);
  const double dy = (a.y + 0.5 * a.h) - (b.y + 0.5 * b.h);
  return std::hypot(dx, dy);
}

namespace {

// Length of the overlap of [a0, a0 + al) and [b0, b0 + bl). Nested intervals
// return the inner length exactly, so identical boxes give an IoU of exactly 1.
double overlap_1d(double a0, double al, double b0, double bl) {
  if (a0 >= b0 && a0 + al <= b0 + bl) return al;
  if (b0 >= a0 && b0 + bl <= a0 + al) return bl;
  return std::min(a0 + al, b0 + bl) - std::max(a0, b0);
}

}  // namespace

double iou(const CornerBox& a, const CornerBox& b) {
  const double iw = overlap_1d(a.x, a.w, b.x, b.w);
  const double ih = overlap_1d(a.y, a.h, b.y, b.h);
  const double inter = iw > 0.0 && ih > 0.0 ? iw * ih : 0.0;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

PrecisionCurve precision_curve(const std::vector<CornerBox>& traj, const std::vector<CornerBox>& gt,
                               int max_threshold) {
  require_equal_lengths(traj.size(), gt.size(), "precision_curve");
  if (max_threshold < 20) throw std::invalid_argument("precision_curve: max_threshold must be >= 20");
  std::vector<double> err(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) err[i] = center_error(traj[i], gt[i]);
  PrecisionCurve c;
  for (int t = 0; t <= max_threshold; ++t) {
    const auto hits = std::count_if(err.begin(), err.end(), [t](double e) { return e <= t; });
    c.thresholds.push_back(t);
    c.values.push_back(static_cast<double>(hits) / static_cast<double>(err.size()));
  }
  c.at20 = c.values[20];
  return c;
}

SuccessCurve success_curve(const std::vector<CornerBox>& traj, const std::vector<CornerBox>& gt) {
  require_equal_lengths(traj.size(), gt.size(), "success_curve");
  std::vector<double> ov(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) ov[i] = iou(traj[i], gt[i]);
  SuccessCurve c;
  double sum = 0.0;
  for (int k = 0; k <= 50; ++k) {
    const double tau = k / 50.0;
    const auto hits = std::count_if(ov.begin(), ov.end(), [tau](double o) { return o >= tau; });
    c.thresholds.push_back(tau);
    c.values.push_back(static_cast<double>(hits) / static_cast<double>(ov.size()));
    sum += c.values.back();
  }
  c.auc = sum / 51.0;
  c.at50 = c.values[25];
  return c;
}

OpeResult run_ope(const TrackerConfig& config, const Sequence& seq) {
  if (seq.size() == 0) throw std::invalid_argument("run_ope: empty sequence");
  OpeResult result;
  result.trajectory.reserve(seq.size());
  result.diagnostics.reserve(seq.size());

  TrackerState state;
  try {
    state = init_tracker(load_frame(seq, 0), to_center(seq.groundtruth.front()), config);
  } catch (const std::exception& e) {
    throw std::runtime_error(seq.name + " frame 1: " + e.what());
  }
  result.trajectory.push_back(seq.groundtruth.front());
  result.diagnostics.emplace_back();

  using clock = std::chrono::steady_clock;
  clock::duration elapsed{};
  for (std::size_t i = 1; i < seq.size(); ++i) {
    Frame frame;
    try {
      frame = load_frame(seq, i);
      const auto start = clock::now();
      const StepResult r = step(state, frame);
      elapsed += clock::now() - start;
      result.trajectory.push_back(to_corner(r.box));
      result.diagnostics.push_back(r.diagnostics);
    } catch (const std::exception& e) {
      throw std::runtime_error(seq.name + " frame " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  result.steps = seq.size() - 1;
  result.step_seconds = std::chrono::duration<double>(elapsed).count();
  return result;
}

EvalReport evaluate(const std::string& name, const std::vector<CornerBox>& trajectory,
                    const std::vector<CornerBox>& groundtruth, const std::vector<bool>& valid) {
  require_equal_lengths(trajectory.size(), groundtruth.size(), "evaluate");
  if (valid.size() != groundtruth.size()) throw std::invalid_argument("evaluate: validity mask length mismatch");
  EvalReport r;
  r.name = name;
  r.trajectory = trajectory;
  r.groundtruth = groundtruth;
  r.valid = valid;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<CornerBox> t, g;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    if (!valid[i]) {
      r.cpe.push_back(nan);
      r.overlap.push_back(nan);
      continue;
    }
    r.cpe.push_back(center_error(trajectory[i], groundtruth[i]));
    r.overlap.push_back(iou(trajectory[i], groundtruth[i]));
    t.push_back(trajectory[i]);
    g.push_back(groundtruth[i]);
  }
  if (t.empty()) throw std::invalid_argument("evaluate: " + name + " has no valid ground truth");
  r.precision = precision_curve(t, g);
  r.success = success_curve(t, g);
  return r;
}

EvalReport evaluate_sequence(const TrackerConfig& config, const Sequence& seq) {
  const OpeResult ope = run_ope(config, seq);
  EvalReport r = evaluate(seq.name, ope.trajectory, seq.groundtruth, seq.valid);
  r.attributes = seq.attributes;
  r.diagnostics = ope.diagnostics;
  r.fps = ope.fps();
  return r;
}

std::vector<std::string> discover_sequences(const std::string& dataset_root,
                                            const std::vector<std::string>& names) {
  const fs::path root(dataset_root);
  if (!fs::is_directory(root)) throw std::runtime_error("not a directory: " + root.string());
  std::vector<std::string> out;
  if (!names.empty()) {
    for (const auto& n : names) {
      const fs::path dir = root / n;
      if (!fs::is_regular_file(dir / "groundtruth_rect.txt")) {
        throw std::runtime_error("sequence " + n + " not found under " + root.string());
      }
      out.push_back(dir.string());
    }
    return out;
  }
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::is_regular_file(entry.path() / "groundtruth_rect.txt")) {
      out.push_back(entry.path().string());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw std::runtime_error("no sequences under " + root.string());
  return out;
}

std::vector<EvalReport> run_benchmark(const std::string& dataset_root, const std::vector<std::string>& sequence_dirs,
                                      const TrackerConfig& config, int jobs) {
  validate_config(config);
  std::map<std::string, std::vector<std::string>> tags;
  const fs::path sidecar = fs::path(dataset_root) / "attributes.txt";
  if (fs::is_regular_file(sidecar)) {
    for (auto& [name, list] : read_attributes(sidecar.string())) tags[name] = std::move(list);
  }

  std::vector<EvalReport> reports(sequence_dirs.size());
  std::vector<std::exception_ptr> errors(sequence_dirs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < sequence_dirs.size(); i = next++) {
      try {
        Sequence seq = load_otb_sequence(sequence_dirs[i]);
        if (auto it = tags.find(seq.name); it != tags.end()) seq.attributes = it->second;
        reports[i] = evaluate_sequence(config, seq);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(sequence_dirs.size(), 1)));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return reports;
}

void emit_report(const std::vector<EvalReport>& reports, const std::string& out_dir) {
  if (reports.empty()) throw std::invalid_argument("emit_report: no reports");
  const fs::path root(out_dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw std::runtime_error("cannot create " + root.string() + ": " + ec.message());

  json per_sequence = json::array();
  std::vector<const EvalReport*> all;
  std::map<std::string, std::vector<const EvalReport*>> by_attribute;
  for (const EvalReport& r : reports) {
    all.push_back(&r);
    for (const auto& a : r.attributes) by_attribute[a].push_back(&r);

    const fs::path dir = root / r.name;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    write_groundtruth((dir / "trajectory.txt").string(), r.trajectory);
    write_groundtruth((dir / "groundtruth.txt").string(), r.groundtruth);
    write_curve(dir / "precision.csv", r.precision);
    write_curve(dir / "success.csv", r.success);

    auto frames = open_out(dir / "frames.csv");
    frames << "frame,cpe,iou,apce,r_t,alpha_t,gate\n";
    for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
      frames << i + 1 << ',' << csv_number(r.cpe[i]) << ',' << csv_number(r.overlap[i]);
      if (i == 0 || i >= r.diagnostics.size()) {
        frames << ",,,,\n";
        continue;
      }
      const Diagnostics& d = r.diagnostics[i];
      frames << ',' << csv_number(d.apce) << ',' << csv_number(d.relative_confidence) << ','
             << csv_number(d.alpha) << ',' << (d.gate ? 1 : 0) << '\n';
    }
    if (!frames) throw std::runtime_error("cannot write " + (dir / "frames.csv").string());

    const json meta = {{"name", r.name}, {"fps", r.fps}, {"attributes", r.attributes},
                       {"frames", r.trajectory.size()}};
    open_out(dir / "meta.json") << meta.dump(2) << '\n';

    per_sequence.push_back({{"name", r.name},
                            {"frames", r.trajectory.size()},
                            {"precision20", r.precision.at20},
                            {"auc", r.success.auc},
                            {"success50", r.success.at50},
                            {"fps", r.fps},
                            {"attributes", r.attributes}});
  }

  json attributes = json::object();
  for (const auto& [tag, list] : by_attribute) attributes[tag] = aggregate(list);
  const json summary = {{"sequences", per_sequence}, {"aggregate", aggregate(all)}, {"attributes", attributes}};
  auto out = open_out(root / "summary.json");
  out << summary.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + (root / "summary.json").string());

  std::vector<const Curve*> precision, success;
  for (const EvalReport& r : reports) {
    precision.push_back(&r.precision);
    success.push_back(&r.success);
  }
  write_curve(root / "precision.csv", mean_curve(precision));
  write_curve(root / "success.csv", mean_curve(success));
}

std::vector<EvalReport> load_reports(const std::string& results_dir) {
  const fs::path root(results_dir);
  if (!fs::is_directory(root)) throw std::runtime_error("not a directory: " + root.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::is_regular_file(entry.path() / "trajectory.txt")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw std::runtime_error("no sequence results under " + root.string());

  std::vector<EvalReport> reports;
  for (const fs::path& dir : dirs) {
    const auto traj = read_groundtruth((dir / "trajectory.txt").string());
    const auto gt = read_groundtruth((dir / "groundtruth.txt").string());
    std::vector<bool> valid;
    for (const CornerBox& b : gt) valid.push_back(std::isfinite(b.x) && std::isfinite(b.y) && b.w > 0.0 && b.h > 0.0);
    EvalReport r = evaluate(dir.filename().string(), traj, gt, valid);

    if (std::ifstream meta_in(dir / "meta.json"); meta_in) {
      const json meta = json::parse(meta_in);
      r.name = meta.value("name", r.name);
      r.fps = meta.value("fps", 0.0);
      r.attributes = meta.value("attributes", std::vector<std::string>{});
    }
    if (std::ifstream frames_in(dir / "frames.csv"); frames_in) {
      std::string line;
      std::getline(frames_in, line);
      while (std::getline(frames_in, line)) {
        const auto cells = split_csv(line);
        Diagnostics d;
        if (cells.size() == 7 && !cells[3].empty()) {
          d.apce = parse_number(cells[3]);
          d.relative_confidence = parse_number(cells[4]);
          d.alpha = parse_number(cells[5]);
          d.gate = cells[6] == "1";
        }
        r.diagnostics.push_back(d);
      }
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

Curve read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Curve c;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 2) throw std::runtime_error(path + ": malformed row '" + line + "'");
    c.thresholds.push_back(parse_number(cells[0]));
    c.values.push_back(parse_number(cells[1]));
  }
  return c;
}

}  // namespace aftrack
