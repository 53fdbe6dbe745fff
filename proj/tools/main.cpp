#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "aftrack/config.hpp"
#include "aftrack/evaluation.hpp"
#include "aftrack/sequence.hpp"
#include "aftrack/synth.hpp"

namespace {

using namespace aftrack;

TrackerConfig config_from(const std::string& path) { return path.empty() ? TrackerConfig{} : load_config(path); }

// A comma-separated list, or the path of a file with one name per line.
std::vector<std::string> sequence_names(const std::string& list) {
  std::vector<std::string> names;
  if (list.empty()) return names;
  std::string text = list;
  if (std::filesystem::is_regular_file(list)) {
    std::ifstream in(list);
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  std::string cur;
  for (char c : text + ",") {
    if (c == ',' || c == '\n' || c == '\r' || c == ' ' || c == '\t') {
      if (!cur.empty()) names.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  return names;
}

void print_summary(const std::vector<EvalReport>& reports) {
  std::printf("%-24s %8s %8s %8s %8s\n", "sequence", "frames", "prec@20", "auc", "fps");
  double p = 0.0, a = 0.0, f = 0.0;
  for (const auto& r : reports) {
    std::printf("%-24s %8zu %8.3f %8.3f %8.1f\n", r.name.c_str(), r.trajectory.size(), r.precision.at20,
                r.success.auc, r.fps);
    p += r.precision.at20;
    a += r.success.auc;
    f += r.fps;
  }
  const double n = static_cast<double>(reports.size());
  std::printf("%-24s %8zu %8.3f %8.3f %8.1f\n", "mean", reports.size(), p / n, a / n, f / n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation filter and color model fusion tracker"};
  app.require_subcommand(1);

  std::string seq_dir, dataset_root, spec_file, results_dir, config_file, out_dir = "results", sequences;
  int jobs = 1;

  auto* track = app.add_subcommand("track", "Track one OTB-layout sequence and score it");
  track->add_option("seq_dir", seq_dir, "Sequence folder with img/ and groundtruth_rect.txt")->required();
  track->add_option("--config", config_file, "Key-value config file");
  track->add_option("--out", out_dir, "Output folder")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "One-pass evaluation over a dataset");
  bench->add_option("dataset_root", dataset_root, "Folder of sequence folders")->required();
  bench->add_option("--sequences", sequences, "Comma-separated names, or a file listing them");
  bench->add_option("--config", config_file, "Key-value config file");
  bench->add_option("--out", out_dir, "Output folder")->capture_default_str();
  bench->add_option("--jobs", jobs, "Sequences evaluated concurrently")->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "Render a scripted synthetic sequence");
  synth->add_option("spec_file", spec_file, "JSON sequence script")->required();
  synth->add_option("--out", out_dir, "Output sequence folder")->required();

  auto* report = app.add_subcommand("report", "Rescore stored trajectories and rewrite the summary");
  report->add_option("results_dir", results_dir, "Folder written by track or bench")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*track) {
      const TrackerConfig config = config_from(config_file);
      const Sequence seq = load_otb_sequence(seq_dir);
      const std::vector<EvalReport> reports{evaluate_sequence(config, seq)};
      emit_report(reports, out_dir);
      print_summary(reports);
    } else if (*bench) {
      const TrackerConfig config = config_from(config_file);
      const auto dirs = discover_sequences(dataset_root, sequence_names(sequences));
      const auto reports = run_benchmark(dataset_root, dirs, config, jobs);
      emit_report(reports, out_dir);
      print_summary(reports);
    } else if (*synth) {
      const Sequence seq = synth_sequence(load_synth_spec(spec_file));
      write_sequence(seq, out_dir);
      std::printf("wrote %zu frames to %s\n", seq.size(), out_dir.c_str());
    } else if (*report) {
      const auto reports = load_reports(results_dir);
      emit_report(reports, results_dir);
      print_summary(reports);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
