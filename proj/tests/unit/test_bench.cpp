#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "aftrack/evaluation.hpp"
#include "aftrack/image_io.hpp"
#include "aftrack/sequence.hpp"
#include "aftrack/synth.hpp"

using namespace aftrack;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = fs::temp_directory_path() / ("aftrack_test_" + std::to_string(rng()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::vector<CornerBox> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_groundtruth(in);
}

double mean_intensity(const Frame& f) {
  double s = 0.0;
  for (auto p : f.pixels) s += p;
  return s / static_cast<double>(f.pixels.size());
}

SynthSpec small_scene(int frames) {
  SynthSpec s;
  s.width = 160;
  s.height = 120;
  s.frames = frames;
  s.target_cx = 80;
  s.target_cy = 60;
  s.target_w = 24;
  s.target_h = 20;
  s.seed = 5;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Groundtruth, CommaLine) {
  const auto boxes = parse("100,80,50,60\n");
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0], (CornerBox{100, 80, 50, 60}));
}

TEST(Groundtruth, DelimitersParseIdentically) {
  const auto comma = parse("100,80,50,60\n1.5,2.5,3,4\n");
  EXPECT_EQ(parse("100\t80\t50\t60\n1.5\t2.5\t3\t4\n"), comma);
  EXPECT_EQ(parse("100 80  50 60\r\n1.5, 2.5, 3, 4\n\n"), comma);
}

TEST(Groundtruth, MalformedLineNamesTheLine) {
  try {
    parse("1,2,3,4\n1,2,x,4\n");
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse("1,2,3\n"), std::runtime_error);
}

TEST(Groundtruth, WriteParseRoundTrip) {
  const std::vector<CornerBox> boxes{{1, 2, 3, 4}, {10.25, 20.125, 30.5, 40.0625}, {0.1, 0.2, 0.3, 1e-3}};
  std::ostringstream out;
  write_groundtruth(out, boxes);
  EXPECT_EQ(parse(out.str()), boxes);
}

TEST(OtbSequence, FourFrameFixtureRoundTrips) {
  TempDir tmp;
  const Sequence seq = synth_sequence(small_scene(4));
  write_sequence(seq, (tmp.path() / "toy").string());
  const Sequence loaded = load_otb_sequence((tmp.path() / "toy").string());
  EXPECT_EQ(loaded.name, "toy");
  ASSERT_EQ(loaded.size(), 4u);
  EXPECT_EQ(loaded.groundtruth, seq.groundtruth);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(load_frame(loaded, i), seq.frames[i]);

  write_groundtruth((tmp.path() / "toy" / "groundtruth_rect.txt").string(), loaded.groundtruth);
  EXPECT_EQ(load_otb_sequence((tmp.path() / "toy").string()).groundtruth, seq.groundtruth);
}

TEST(OtbSequence, FramesSortNumerically) {
  TempDir tmp;
  fs::create_directories(tmp.path() / "s" / "img");
  std::vector<CornerBox> gt;
  for (int i = 1; i <= 11; ++i) {
    Frame f(8, 8, 1);
    for (auto& p : f.pixels) p = static_cast<std::uint8_t>(i * 10);
    write_image((tmp.path() / "s" / "img" / (std::to_string(i) + ".png")).string(), f);
    gt.push_back({1, 1, 4, 4});
  }
  write_groundtruth((tmp.path() / "s" / "groundtruth_rect.txt").string(), gt);
  const Sequence seq = load_otb_sequence((tmp.path() / "s").string());
  for (std::size_t i = 0; i < seq.size(); ++i) EXPECT_EQ(load_frame(seq, i).pixels[0], (i + 1) * 10);
}

TEST(OtbSequence, LoadErrors) {
  TempDir tmp;
  EXPECT_THROW(load_otb_sequence((tmp.path() / "absent").string()), std::runtime_error);

  const Sequence seq = synth_sequence(small_scene(3));
  write_sequence(seq, (tmp.path() / "a").string());
  std::ofstream((tmp.path() / "a" / "groundtruth_rect.txt")) << "1,1,10,10\n1,1,10,10\n";
  EXPECT_THROW(load_otb_sequence((tmp.path() / "a").string()), std::runtime_error);

  write_sequence(seq, (tmp.path() / "b").string());
  fs::remove(tmp.path() / "b" / "groundtruth_rect.txt");
  EXPECT_THROW(load_otb_sequence((tmp.path() / "b").string()), std::runtime_error);

  write_sequence(seq, (tmp.path() / "c").string());
  std::ofstream((tmp.path() / "c" / "groundtruth_rect.txt")) << "1,1,10,10\n1,1,ten,10\n1,1,10,10\n";
  EXPECT_THROW(load_otb_sequence((tmp.path() / "c").string()), std::runtime_error);
}

TEST(OtbSequence, NonPositiveExtentsAreFlagged) {
  TempDir tmp;
  const Sequence seq = synth_sequence(small_scene(3));
  write_sequence(seq, (tmp.path() / "s").string());
  std::ofstream((tmp.path() / "s" / "groundtruth_rect.txt")) << "60,50,24,20\n0,0,0,0\n60,50,24,20\n";
  const Sequence loaded = load_otb_sequence((tmp.path() / "s").string());
  EXPECT_EQ(loaded.valid, (std::vector<bool>{true, false, true}));
  EXPECT_EQ(loaded.size(), 3u);
}

TEST(Synth, StaticSceneIsConstant) {
  const Sequence seq = synth_sequence(small_scene(10));
  ASSERT_EQ(seq.size(), 10u);
  for (std::size_t t = 1; t < 10; ++t) {
    EXPECT_EQ(seq.frames[t], seq.frames[0]);
    EXPECT_EQ(seq.groundtruth[t], seq.groundtruth[0]);
  }
}

TEST(Synth, TranslationGivesArithmeticGroundTruth) {
  SynthSpec spec;
  spec.frames = 50;
  spec.target_cx = 40;
  spec.events.push_back({.type = EventType::Translate, .dx = 2.0});
  const Sequence seq = synth_sequence(spec);
  for (std::size_t t = 1; t < seq.size(); ++t) {
    EXPECT_DOUBLE_EQ(seq.groundtruth[t].x - seq.groundtruth[t - 1].x, 2.0);
    EXPECT_EQ(seq.groundtruth[t].y, seq.groundtruth[0].y);
  }
}

TEST(Synth, GainScalesIntensity) {
  SynthSpec spec = small_scene(30);
  spec.events.push_back({.type = EventType::Gain, .start = 25, .factor = 1.3});
  const Sequence seq = synth_sequence(spec);
  double clipped = 0.0;
  for (auto p : seq.frames[24].pixels) clipped += std::min(255.0, 1.3 * p);
  clipped /= static_cast<double>(seq.frames[24].pixels.size());
  EXPECT_NEAR(mean_intensity(seq.frames[25]), clipped, 1.0);
  EXPECT_NEAR(mean_intensity(seq.frames[25]) / mean_intensity(seq.frames[24]), 1.3, 0.05);
}

TEST(Synth, ReproducibleAndSeeded) {
  SynthSpec spec = small_scene(6);
  spec.noise = 4.0;
  spec.events.push_back({.type = EventType::Translate, .dx = 1.5, .dy = -0.5});
  spec.events.push_back({.type = EventType::Clutter, .start = 2});
  const Sequence a = synth_sequence(spec);
  const Sequence b = synth_sequence(spec);
  EXPECT_EQ(a.frames, b.frames);
  EXPECT_EQ(a.groundtruth, b.groundtruth);
  spec.seed = 6;
  EXPECT_NE(synth_sequence(spec).frames, a.frames);
}

TEST(Synth, OcclusionRestoresBackground) {
  SynthSpec spec = small_scene(4);
  spec.events.push_back({.type = EventType::Occlude, .start = 2, .end = 3});
  const Sequence seq = synth_sequence(spec);
  SynthSpec empty = small_scene(1);
  empty.target_cx = 140;  // target moved away; the background under the box is exposed
  empty.target_cy = 100;
  const Frame bg = synth_sequence(empty).frames[0];
  const BoundingBox box = to_center(seq.groundtruth[2]);
  for (int y = static_cast<int>(box.top()) + 1; y < static_cast<int>(box.bottom()) - 1; ++y) {
    for (int x = static_cast<int>(box.left()) + 1; x < static_cast<int>(box.right()) - 1; ++x) {
      EXPECT_EQ(seq.frames[2].at(x, y, 0), bg.at(x, y, 0));
    }
  }
  EXPECT_EQ(seq.frames[3], seq.frames[0]);
}

TEST(Synth, TargetLeavingCanvasThrows) {
  SynthSpec spec = small_scene(40);
  spec.events.push_back({.type = EventType::Translate, .dx = 5.0});
  EXPECT_THROW(synth_sequence(spec), std::runtime_error);
}

TEST(Synth, JsonSpec) {
  const SynthSpec s = parse_synth_spec(R"({
    "name": "demo", "width": 200, "height": 150, "frames": 12, "seed": 9, "color": false, "noise": 1.5,
    "target": {"cx": 100, "cy": 70, "w": 30, "h": 20},
    "events": [{"type": "translate", "start": 2, "duration": 5, "dx": 1, "dy": -1},
               {"type": "occlude", "start": 6, "end": 8, "fraction": 0.5}]
  })");
  EXPECT_EQ(s.name, "demo");
  EXPECT_EQ(s.width, 200);
  EXPECT_EQ(s.frames, 12);
  EXPECT_EQ(s.seed, 9u);
  EXPECT_FALSE(s.color);
  EXPECT_EQ(s.target_w, 30.0);
  ASSERT_EQ(s.events.size(), 2u);
  EXPECT_EQ(s.events[0].type, EventType::Translate);
  EXPECT_EQ(s.events[0].end, 7);
  EXPECT_EQ(s.events[1].fraction, 0.5);
  EXPECT_THROW(parse_synth_spec(R"({"events": [{"type": "spin"}]})"), std::runtime_error);
  EXPECT_THROW(parse_synth_spec("{not json"), std::runtime_error);
  EXPECT_THROW(parse_synth_spec(R"({"frames": 0})"), std::runtime_error);
}

TEST(Metrics, IouExamplesAndProperties) {
  EXPECT_NEAR(iou({0, 0, 10, 10}, {5, 0, 10, 10}), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(iou({1, 1, 10, 10}, {1, 1, 10, 10}), 1.0);
  EXPECT_EQ(iou({0, 0, 10, 10}, {20, 0, 10, 10}), 0.0);
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.0, 30.0), s(1.0, 20.0);
  for (int k = 0; k < 100; ++k) {
    const CornerBox a{u(rng), u(rng), s(rng), s(rng)}, b{u(rng), u(rng), s(rng), s(rng)};
    EXPECT_EQ(iou(a, b), iou(b, a));
    EXPECT_GE(iou(a, b), 0.0);
    EXPECT_LT(iou(a, b), 1.0);
  }
  EXPECT_NEAR(center_error({0, 0, 10, 10}, {3, 4, 10, 10}), 5.0, 1e-15);
}

TEST(Metrics, PrecisionExamples) {
  const std::vector<CornerBox> gt(3, CornerBox{50, 50, 20, 20});
  const PrecisionCurve perfect = precision_curve(gt, gt);
  EXPECT_EQ(perfect.at20, 1.0);
  EXPECT_EQ(perfect.values.size(), 51u);
  for (double v : perfect.values) EXPECT_EQ(v, 1.0);

  std::vector<CornerBox> off = gt;
  for (auto& b : off) b.x += 25;
  const PrecisionCurve far = precision_curve(off, gt);
  EXPECT_EQ(far.at20, 0.0);
  EXPECT_EQ(far.values[24], 0.0);
  EXPECT_EQ(far.values[25], 1.0);

  std::vector<CornerBox> mixed = gt;
  mixed[1].x += 10;
  mixed[2].y += 30;
  EXPECT_NEAR(precision_curve(mixed, gt).at20, 2.0 / 3.0, 1e-15);
  EXPECT_THROW(precision_curve(mixed, {gt[0]}), std::invalid_argument);
}

TEST(Metrics, SuccessExamples) {
  const std::vector<CornerBox> gt{{0, 0, 10, 10}, {0, 0, 10, 10}};
  const SuccessCurve same = success_curve(gt, gt);
  EXPECT_EQ(same.auc, 1.0);
  EXPECT_EQ(same.values.size(), 51u);
  EXPECT_EQ(same.values.back(), 1.0);

  const std::vector<CornerBox> apart{{20, 0, 10, 10}, {20, 0, 10, 10}};
  const SuccessCurve none = success_curve(apart, gt);
  EXPECT_EQ(none.at50, 0.0);
  EXPECT_NEAR(none.auc, 1.0 / 51.0, 1e-15);  // only tau = 0 counts

  const std::vector<CornerBox> third{{5, 0, 10, 10}, {0, 0, 10, 10}};
  const SuccessCurve half = success_curve(third, gt);
  EXPECT_EQ(half.at50, 0.5);
  EXPECT_THROW(success_curve(third, {gt[0]}), std::invalid_argument);
}

TEST(Metrics, CurvesAreMonotone) {
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  std::vector<CornerBox> a, b;
  for (int k = 0; k < 60; ++k) {
    a.push_back({u(rng), u(rng), 20, 20});
    b.push_back({u(rng), u(rng), 20, 20});
  }
  const PrecisionCurve p = precision_curve(a, b);
  const SuccessCurve s = success_curve(a, b);
  for (std::size_t i = 1; i < p.values.size(); ++i) EXPECT_GE(p.values[i], p.values[i - 1]);
  for (std::size_t i = 1; i < s.values.size(); ++i) EXPECT_LE(s.values[i], s.values[i - 1]);
  for (double v : p.values) EXPECT_TRUE(v >= 0.0 && v <= 1.0);
  const PrecisionCurve self = precision_curve(a, a);
  EXPECT_EQ(self.at20, 1.0);
  EXPECT_EQ(success_curve(a, a).auc, 1.0);
}

TEST(Evaluate, InvalidFramesAreExcluded) {
  const std::vector<CornerBox> gt{{0, 0, 10, 10}, {0, 0, 0, 0}, {0, 0, 10, 10}};
  const std::vector<CornerBox> traj{{0, 0, 10, 10}, {90, 90, 10, 10}, {0, 0, 10, 10}};
  const EvalReport r = evaluate("x", traj, gt, {true, false, true});
  EXPECT_EQ(r.precision.at20, 1.0);
  EXPECT_EQ(r.success.auc, 1.0);
  EXPECT_TRUE(std::isnan(r.cpe[1]));
  EXPECT_TRUE(std::isnan(r.overlap[1]));
  EXPECT_THROW(evaluate("x", traj, gt, {false, false, false}), std::invalid_argument);
}

TEST(RunOpe, SingleFrameReturnsInitBox) {
  const Sequence seq = synth_sequence(small_scene(1));
  const OpeResult r = run_ope({}, seq);
  ASSERT_EQ(r.trajectory.size(), 1u);
  EXPECT_NEAR(r.trajectory[0].x, seq.groundtruth[0].x, 1e-12);
  EXPECT_NEAR(r.trajectory[0].w, seq.groundtruth[0].w, 1e-12);
  EXPECT_EQ(r.steps, 0u);
}

TEST(RunOpe, StaticSequenceAndTiming) {
  SynthSpec spec = small_scene(20);
  spec.noise = 2.0;
  const Sequence seq = synth_sequence(spec);
  const OpeResult r = run_ope({}, seq);
  ASSERT_EQ(r.trajectory.size(), 20u);
  double cpe = 0.0;
  for (std::size_t i = 0; i < 20; ++i) cpe += center_error(r.trajectory[i], seq.groundtruth[i]);
  EXPECT_LE(cpe / 20.0, 2.0);
  EXPECT_EQ(r.steps, 19u);
  EXPECT_GT(r.fps(), 0.0);
  EXPECT_TRUE(std::isfinite(r.fps()));
}

TEST(RunOpe, ErrorsCarryTheFrameIndex) {
  Sequence seq = synth_sequence(small_scene(3));
  seq.frames[2] = Frame();
  try {
    run_ope({}, seq);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("frame 3"), std::string::npos) << e.what();
  }
}

TEST(Report, AggregatesOverSequencesAndRoundTrips) {
  TempDir tmp;
  const std::vector<CornerBox> gt(4, CornerBox{10, 10, 20, 20});
  std::vector<CornerBox> half = gt;
  half[2].x += 30;
  half[3].x += 30;
  std::vector<EvalReport> reports{evaluate("perfect", gt, gt, std::vector<bool>(4, true)),
                                  evaluate("half", half, gt, std::vector<bool>(4, true))};
  reports[0].attributes = {"OCC"};
  reports[1].attributes = {"OCC", "SV"};
  emit_report(reports, tmp.path().string());

  const auto summary = nlohmann::json::parse(slurp(tmp.path() / "summary.json"));
  EXPECT_EQ(summary["aggregate"]["count"], 2);
  EXPECT_NEAR(summary["aggregate"]["precision20"].get<double>(), 0.75, 1e-12);
  EXPECT_NEAR(summary["sequences"][0]["precision20"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(summary["attributes"]["SV"]["precision20"].get<double>(), 0.5, 1e-12);
  EXPECT_EQ(summary["attributes"]["OCC"]["count"], 2);

  const Curve p = read_curve_csv((tmp.path() / "half" / "precision.csv").string());
  ASSERT_EQ(p.values.size(), reports[1].precision.values.size());
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    EXPECT_NEAR(p.values[i], reports[1].precision.values[i], 1e-9);
    EXPECT_NEAR(p.thresholds[i], reports[1].precision.thresholds[i], 1e-9);
  }
  const Curve agg = read_curve_csv((tmp.path() / "success.csv").string());
  for (std::size_t i = 0; i < agg.values.size(); ++i) {
    EXPECT_NEAR(agg.values[i], 0.5 * (reports[0].success.values[i] + reports[1].success.values[i]), 1e-9);
  }

  const auto loaded = load_reports(tmp.path().string());
  ASSERT_EQ(loaded.size(), 2u);
  for (const auto& r : loaded) {
    const EvalReport& orig = r.name == "half" ? reports[1] : reports[0];
    EXPECT_EQ(r.trajectory, orig.trajectory);
    EXPECT_EQ(r.attributes, orig.attributes);
    EXPECT_NEAR(r.precision.at20, orig.precision.at20, 1e-12);
  }

  const std::string frames = slurp(tmp.path() / "half" / "frames.csv");
  EXPECT_EQ(frames.substr(0, frames.find('\n')), "frame,cpe,iou,apce,r_t,alpha_t,gate");
}

TEST(Report, UnwritableDestinationThrows) {
  TempDir tmp;
  std::ofstream(tmp.path() / "file") << "x";
  const std::vector<CornerBox> gt(2, CornerBox{1, 1, 5, 5});
  EXPECT_THROW(emit_report({evaluate("a", gt, gt, {true, true})}, (tmp.path() / "file" / "out").string()),
               std::runtime_error);
  EXPECT_THROW(emit_report({}, tmp.path().string()), std::invalid_argument);
}

TEST(Benchmark, ThreadedRunMatchesSerialAndAppliesAttributes) {
  TempDir tmp;
  for (int k = 0; k < 3; ++k) {
    SynthSpec spec = small_scene(8);
    spec.seed = 70 + k;
    spec.events.push_back({.type = EventType::Translate, .dx = 1.0});
    write_sequence(synth_sequence(spec), (tmp.path() / ("seq" + std::to_string(k))).string());
  }
  std::ofstream(tmp.path() / "attributes.txt") << "seq0 IV,SV\nseq2\tOCC\n";
  const auto dirs = discover_sequences(tmp.path().string());
  ASSERT_EQ(dirs.size(), 3u);
  EXPECT_EQ(discover_sequences(tmp.path().string(), {"seq1"}).size(), 1u);
  EXPECT_THROW(discover_sequences(tmp.path().string(), {"missing"}), std::runtime_error);

  const auto serial = run_benchmark(tmp.path().string(), dirs, {}, 1);
  const auto threaded = run_benchmark(tmp.path().string(), dirs, {}, 3);
  ASSERT_EQ(serial.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(serial[i].name, threaded[i].name);
    EXPECT_EQ(serial[i].trajectory, threaded[i].trajectory);
  }
  EXPECT_EQ(serial[0].attributes, (std::vector<std::string>{"IV", "SV"}));
  EXPECT_TRUE(serial[1].attributes.empty());
  EXPECT_EQ(serial[2].attributes, (std::vector<std::string>{"OCC"}));
}
