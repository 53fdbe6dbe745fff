#include "aftrack/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace aftrack {

namespace {

struct Field {
  std::string_view key;
  std::function<void(TrackerConfig&, std::string_view)> set;
  std::function<std::string(const TrackerConfig&)> get;
};

double to_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

int to_int(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

bool to_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("expected a boolean, got '" + std::string(s) + "'");
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

template <typename T>
Field real(std::string_view key, T TrackerConfig::*member) {
  return {key, [member](TrackerConfig& c, std::string_view s) { c.*member = to_double(s); },
          [member](const TrackerConfig& c) { return format_double(c.*member); }};
}

Field integer(std::string_view key, int TrackerConfig::*member) {
  return {key, [member](TrackerConfig& c, std::string_view s) { c.*member = to_int(s); },
          [member](const TrackerConfig& c) { return std::to_string(c.*member); }};
}

Field boolean(std::string_view key, bool TrackerConfig::*member) {
  return {key, [member](TrackerConfig& c, std::string_view s) { c.*member = to_bool(s); },
          [member](const TrackerConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      real("cf.lambda", &TrackerConfig::lambda),
      real("cf.eta", &TrackerConfig::eta),
      real("cf.output_sigma_factor", &TrackerConfig::output_sigma_factor),
      {"cf.solve",
       [](TrackerConfig& c, std::string_view s) {
         if (s == "exact") {
           c.solve_mode = SolveMode::Exact;
         } else if (s == "diagonal") {
           c.solve_mode = SolveMode::Diagonal;
         } else {
           throw std::invalid_argument("expected 'exact' or 'diagonal', got '" + std::string(s) + "'");
         }
       },
       [](const TrackerConfig& c) {
         return std::string(c.solve_mode == SolveMode::Exact ? "exact" : "diagonal");
       }},
      real("color.theta", &TrackerConfig::theta_color),
      integer("color.bins", &TrackerConfig::bins),
      real("color.lambda", &TrackerConfig::lambda_hist),
      real("fusion.alpha", &TrackerConfig::alpha),
      real("fusion.rho", &TrackerConfig::rho),
      boolean("fusion.adaptive", &TrackerConfig::adaptive_fusion),
      boolean("fusion.invert_confidence", &TrackerConfig::invert_confidence),
      real("fusion.gate_margin", &TrackerConfig::gate_margin),
      integer("projection.c_dim", &TrackerConfig::c_dim),
      real("projection.reg", &TrackerConfig::projection_reg),
      integer("projection.gn_iters", &TrackerConfig::gn_iters),
      integer("projection.cg_iters", &TrackerConfig::cg_iters),
      real("projection.cg_tol", &TrackerConfig::cg_tol),
      real("search.padding", &TrackerConfig::padding),
      integer("search.cell_size", &TrackerConfig::cell_size),
      integer("search.orientations", &TrackerConfig::orientations),
      real("search.template_size", &TrackerConfig::template_size),
      integer("search.scales", &TrackerConfig::scales),
      real("search.scale_step", &TrackerConfig::scale_step),
      real("search.scale_penalty", &TrackerConfig::scale_penalty),
  };
  return table;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw std::invalid_argument(std::string("config: ") + field + " " + rule);
}

}  // namespace

void validate_config(const TrackerConfig& c) {
  require(c.lambda > 0.0, "cf.lambda", "must be > 0");
  require(c.eta >= 0.0 && c.eta <= 1.0, "cf.eta", "must be in [0, 1]");
  require(c.output_sigma_factor > 0.0, "cf.output_sigma_factor", "must be > 0");
  require(c.theta_color >= 0.0 && c.theta_color <= 1.0, "color.theta", "must be in [0, 1]");
  require(c.bins == 8 || c.bins == 16 || c.bins == 32, "color.bins", "must be 8, 16 or 32");
  require(c.lambda_hist >= 0.0, "color.lambda", "must be >= 0");
  require(c.alpha >= 0.0 && c.alpha <= 0.5, "fusion.alpha", "must be in [0, 0.5]");
  require(c.rho >= 0.0, "fusion.rho", "must be >= 0");
  require(c.gate_margin > 0.0, "fusion.gate_margin", "must be > 0");
  require(c.c_dim >= 1, "projection.c_dim", "must be >= 1");
  require(c.projection_reg >= 0.0, "projection.reg", "must be >= 0");
  require(c.gn_iters >= 0, "projection.gn_iters", "must be >= 0");
  require(c.cg_iters >= 1, "projection.cg_iters", "must be >= 1");
  require(c.cg_tol >= 0.0, "projection.cg_tol", "must be >= 0");
  require(c.padding >= 0.0, "search.padding", "must be >= 0");
  require(c.cell_size >= 1, "search.cell_size", "must be >= 1");
  require(c.orientations >= 2, "search.orientations", "must be >= 2");
  require(c.template_size >= 4.0 * c.cell_size, "search.template_size", "must span at least 4 cells");
  require(c.scales >= 1 && c.scales % 2 == 1, "search.scales", "must be odd and >= 1");
  require(c.scale_step > 1.0, "search.scale_step", "must be > 1");
  require(c.scale_penalty >= 1.0, "search.scale_penalty", "must be >= 1");
}

TrackerConfig parse_config(std::istream& in) {
  TrackerConfig config;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view text(line);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    const std::string where = "config line " + std::to_string(number) + ": ";
    if (eq == std::string_view::npos) throw std::invalid_argument(where + "expected key = value");
    const std::string_view key = trim(text.substr(0, eq));
    const std::string_view value = trim(text.substr(eq + 1));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
    if (it == table.end()) throw std::invalid_argument(where + "unknown key '" + std::string(key) + "'");
    try {
      it->set(config, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + std::string(key) + ": " + e.what());
    }
  }
  validate_config(config);
  return config;
}

TrackerConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse_config(in);
}

void write_config(std::ostream& out, const TrackerConfig& config) {
  for (const Field& f : fields()) out << f.key << " = " << f.get(config) << '\n';
}

}  // namespace aftrack
