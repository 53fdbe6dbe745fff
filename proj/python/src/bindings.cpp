#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <stdexcept>

#include "aftrack/config.hpp"
#include "aftrack/evaluation.hpp"
#include "aftrack/features.hpp"
#include "aftrack/fusion.hpp"
#include "aftrack/synth.hpp"
#include "aftrack/tracker.hpp"

namespace py = pybind11;
using namespace aftrack;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Frame to_frame(const U8Array& a) {
  if (a.ndim() == 2) {
    Frame f(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), 1);
    std::copy(a.data(), a.data() + a.size(), f.pixels.begin());
    return f;
  }
  if (a.ndim() == 3 && a.shape(2) == 3) {
    Frame f(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), 3);
    std::copy(a.data(), a.data() + a.size(), f.pixels.begin());
    return f;
  }
  throw std::invalid_argument("expected an HxW or HxWx3 uint8 array");
}

py::array_t<std::uint8_t> from_frame(const Frame& f) {
  std::vector<py::ssize_t> shape{f.height, f.width};
  if (f.channels == 3) shape.push_back(3);
  py::array_t<std::uint8_t> out(shape);
  std::copy(f.pixels.begin(), f.pixels.end(), out.mutable_data());
  return out;
}

py::array_t<double> grid_array(const RealGrid& g) {
  py::array_t<double> out({g.rows, g.cols});
  std::copy(g.values.begin(), g.values.end(), out.mutable_data());
  return out;
}

RealGrid to_grid(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  RealGrid g(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), g.values.begin());
  return g;
}

py::tuple corner_tuple(const CornerBox& b) { return py::make_tuple(b.x, b.y, b.w, b.h); }

CornerBox to_corner_box(const py::sequence& s) {
  if (py::len(s) != 4) throw std::invalid_argument("expected a box (x, y, w, h)");
  return {s[0].cast<double>(), s[1].cast<double>(), s[2].cast<double>(), s[3].cast<double>()};
}

std::vector<CornerBox> to_boxes(const py::sequence& s) {
  std::vector<CornerBox> out;
  for (const auto& b : s) out.push_back(to_corner_box(b.cast<py::sequence>()));
  return out;
}

py::dict diagnostics_dict(const Diagnostics& d) {
  py::dict out;
  out["apce"] = d.apce;
  out["relative_confidence"] = d.relative_confidence;
  out["alpha"] = d.alpha;
  out["gate"] = d.gate;
  out["scale_change"] = d.scale_change;
  out["cf_peak"] = d.cf_peak;
  out["peak"] = d.peak;
  out["clamped"] = d.clamped;
  return out;
}

// Stateful wrapper over init_tracker / step with 1-based corner boxes.
class Tracker {
 public:
  Tracker(const U8Array& frame, const py::sequence& box, const TrackerConfig& config)
      : state_(init_tracker(to_frame(frame), to_center(to_corner_box(box)), config)) {}

  py::tuple update(const U8Array& frame) {
    const StepResult r = step(state_, to_frame(frame));
    return py::make_tuple(corner_tuple(to_corner(r.box)), diagnostics_dict(r.diagnostics));
  }

  py::tuple box() const { return corner_tuple(to_corner(state_.box())); }
  double scale() const { return state_.scale; }
  std::vector<double> history() const { return state_.history.values(); }

 private:
  TrackerState state_;
};

}  // namespace

PYBIND11_MODULE(_aftrack, m) {
  m.doc() = "Correlation filter and color model fusion tracker.";

  py::class_<TrackerConfig>(m, "TrackerConfig")
      .def(py::init<>())
      .def_readwrite("lambda_", &TrackerConfig::lambda)
      .def_readwrite("eta", &TrackerConfig::eta)
      .def_readwrite("output_sigma_factor", &TrackerConfig::output_sigma_factor)
      .def_readwrite("theta_color", &TrackerConfig::theta_color)
      .def_readwrite("bins", &TrackerConfig::bins)
      .def_readwrite("lambda_hist", &TrackerConfig::lambda_hist)
      .def_readwrite("alpha", &TrackerConfig::alpha)
      .def_readwrite("rho", &TrackerConfig::rho)
      .def_readwrite("adaptive_fusion", &TrackerConfig::adaptive_fusion)
      .def_readwrite("invert_confidence", &TrackerConfig::invert_confidence)
      .def_readwrite("gate_margin", &TrackerConfig::gate_margin)
      .def_readwrite("c_dim", &TrackerConfig::c_dim)
      .def_readwrite("projection_reg", &TrackerConfig::projection_reg)
      .def_readwrite("gn_iters", &TrackerConfig::gn_iters)
      .def_readwrite("cg_iters", &TrackerConfig::cg_iters)
      .def_readwrite("padding", &TrackerConfig::padding)
      .def_readwrite("cell_size", &TrackerConfig::cell_size)
      .def_readwrite("scales", &TrackerConfig::scales)
      .def_readwrite("scale_step", &TrackerConfig::scale_step)
      .def_readwrite("scale_penalty", &TrackerConfig::scale_penalty)
      .def("validate", [](const TrackerConfig& c) { validate_config(c); })
      .def("to_text", [](const TrackerConfig& c) {
        std::ostringstream os;
        write_config(os, c);
        return os.str();
      });

  m.def("parse_config", [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
  }, py::arg("text"), "Parses flat key = value config text.");
  m.def("load_config", &load_config, py::arg("path"));

  py::class_<Tracker>(m, "Tracker")
      .def(py::init<const U8Array&, const py::sequence&, const TrackerConfig&>(), py::arg("frame"),
           py::arg("box"), py::arg("config") = TrackerConfig{},
           "Initializes on a frame and a 1-based (x, y, w, h) box.")
      .def("update", &Tracker::update, py::arg("frame"),
           "Tracks one frame; returns ((x, y, w, h), diagnostics).")
      .def_property_readonly("box", &Tracker::box)
      .def_property_readonly("scale", &Tracker::scale)
      .def_property_readonly("history", &Tracker::history);

  m.def("hog_features", [](const U8Array& frame, int cell_size, int orientations) {
    const FeatureMap f = hog_features(to_gray(to_frame(frame)), cell_size, orientations);
    py::array_t<double> out({f.channels, f.rows, f.cols});
    std::copy(f.data.begin(), f.data.end(), out.mutable_data());
    return out;
  }, py::arg("frame"), py::arg("cell_size") = 4, py::arg("orientations") = 9,
        "HOG features as a (channels, rows, cols) array.");

  m.def("apce", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& r) {
    return apce(to_grid(r));
  }, py::arg("response"));
  m.def("adaptive_alpha", [](double r, double alpha, double rho, bool invert) {
    return adaptive_alpha(r, {alpha, rho, invert});
  }, py::arg("r"), py::arg("alpha") = 0.25, py::arg("rho") = 1.0, py::arg("invert_confidence") = false);
  m.def("locate_peak", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& r) {
    const Point2 p = locate_peak(ResponseMap(to_grid(r)));
    return py::make_tuple(p.x, p.y);
  }, py::arg("response"), "Sub-cell (x, y) peak position in array index units.");
  m.def("gaussian_label", [](int cols, int rows, double sigma) { return grid_array(gaussian_label(cols, rows, sigma)); },
        py::arg("cols"), py::arg("rows"), py::arg("sigma"));

  m.def("iou", [](const py::sequence& a, const py::sequence& b) { return iou(to_corner_box(a), to_corner_box(b)); });
  m.def("center_error",
        [](const py::sequence& a, const py::sequence& b) { return center_error(to_corner_box(a), to_corner_box(b)); });
  m.def("precision_curve", [](const py::sequence& traj, const py::sequence& gt) {
    const PrecisionCurve c = precision_curve(to_boxes(traj), to_boxes(gt));
    return py::make_tuple(c.thresholds, c.values, c.at20);
  }, py::arg("trajectory"), py::arg("groundtruth"), "Returns (thresholds, values, precision@20).");
  m.def("success_curve", [](const py::sequence& traj, const py::sequence& gt) {
    const SuccessCurve c = success_curve(to_boxes(traj), to_boxes(gt));
    return py::make_tuple(c.thresholds, c.values, c.auc);
  }, py::arg("trajectory"), py::arg("groundtruth"), "Returns (thresholds, values, auc).");

  m.def("synth_sequence", [](const std::string& json_spec) {
    const Sequence seq = synth_sequence(parse_synth_spec(json_spec));
    py::list frames, boxes;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      frames.append(from_frame(seq.frames[i]));
      boxes.append(corner_tuple(seq.groundtruth[i]));
    }
    return py::make_tuple(frames, boxes);
  }, py::arg("spec_json"), "Renders a scripted sequence; returns (frames, 1-based boxes).");

  m.def("run_ope", [](const py::sequence& frames, const py::sequence& groundtruth, const TrackerConfig& config) {
    Sequence seq;
    seq.name = "sequence";
    for (const auto& f : frames) seq.frames.push_back(to_frame(f.cast<U8Array>()));
    seq.groundtruth = to_boxes(groundtruth);
    seq.valid.assign(seq.groundtruth.size(), true);
    if (seq.frames.size() != seq.groundtruth.size()) throw std::invalid_argument("frame and box counts differ");
    OpeResult r;
    {
      py::gil_scoped_release release;
      r = run_ope(config, seq);
    }
    py::list traj, diags;
    for (const auto& b : r.trajectory) traj.append(corner_tuple(b));
    for (const auto& d : r.diagnostics) diags.append(diagnostics_dict(d));
    return py::make_tuple(traj, diags, r.fps());
  }, py::arg("frames"), py::arg("groundtruth"), py::arg("config") = TrackerConfig{},
        "One-pass evaluation; returns (trajectory, diagnostics, fps).");
}
