#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "srlab/core/error.hpp"
#include "srlab/core/io.hpp"
#include "srlab/geometry/expression.hpp"

namespace srlab::cli {

inline constexpr int report_format_version = 1;

/// One chart axis: bounds are constant expressions ("0", "sqrt2pi", "2*pi").
struct AxisSpec {
  std::string lo = "0";
  std::string hi = "1";
  bool periodic = true;

  bool operator==(const AxisSpec&) const = default;
};

/// Experiment description, read from `key = value` lines. `#` starts a comment.
/// serialize() writes every key in a fixed order, so parse(serialize(c)) == c.
struct ExperimentConfig {
  std::string model = "heisenberg";  // heisenberg | grushin | martinet | custom-frame
  double lambda_max = 300;

  // Heisenberg sector solver (half_width 0 = automatic)
  int intervals = 2048;
  int levels = 2;
  double half_width = 0;
  int sector_check = 0;  // numeric cross-check of sectors |m| <= sector_check

  // Singular box models
  double box_half_width = 1;
  int samples = 400;
  std::vector<double> fit_tops;  // empty = {lambda_max/2, lambda_max}

  // Custom frame
  std::array<std::string, 3> frame_x{"1", "0", "0"};
  std::array<std::string, 3> frame_y{"0", "1", "-x"};
  std::string volume = "1";
  std::array<AxisSpec, 3> chart{AxisSpec{"0", "sqrt2pi", false}, AxisSpec{"0", "sqrt2pi", true},
                                AxisSpec{"0", "2*pi", true}};
  std::array<int, 3> grid{16, 16, 16};
  int probes = 8;  // random points for the pointwise Reeb check

  // Observables (expressions in x, y, z)
  std::vector<std::string> observables;

  // Statistics
  int cutoffs = 40;
  double theta = 0.99;
  bool require_cache = false;

  // Flow
  std::string flow = "reeb";  // reeb | line | field
  std::array<std::string, 3> field{"0", "0", "1"};
  std::array<double, 3> q0{0.5, 0.5, 0.5};
  double T = 100;
  double dt = 0.01;
  double a0 = 0.6180339887498949;
  int stride = 100;

  std::uint64_t seed = 1;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;

  void validate() const;
  std::string serialize() const;
  /// Hash of everything except output_dir, so the same experiment hashes the same anywhere.
  std::string hash() const;
  static ExperimentConfig parse(std::string_view text);
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Parsing context: value text plus where it starts, for error positions.
struct Field {
  std::string value;
  int line;
  int column;
};

inline double to_double(const Field& f) {
  double v = 0;
  const char* b = f.value.data();
  const char* e = b + f.value.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e) throw ConfigError("expected a number, got '" + f.value + "'", f.line, f.column);
  return v;
}

template <class Int>
Int to_int(const Field& f) {
  Int v = 0;
  const char* b = f.value.data();
  const char* e = b + f.value.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e) throw ConfigError("expected an integer, got '" + f.value + "'", f.line, f.column);
  return v;
}

inline bool to_bool(const Field& f) {
  if (f.value == "true") return true;
  if (f.value == "false") return false;
  throw ConfigError("expected true or false, got '" + f.value + "'", f.line, f.column);
}

inline std::vector<Field> split_field(const Field& f, std::size_t expect) {
  std::vector<Field> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = f.value.find(',', start);
    const std::string_view raw = std::string_view(f.value).substr(start, p == std::string::npos ? std::string::npos : p - start);
    const auto lead = raw.find_first_not_of(" \t");
    const int col = f.column + static_cast<int>(start + (lead == std::string_view::npos ? 0 : lead));
    out.push_back({trim(raw), f.line, col});
    if (p == std::string::npos) break;
    start = p + 1;
  }
  if (expect && out.size() != expect)
    throw ConfigError("expected " + std::to_string(expect) + " comma-separated values", f.line, f.column);
  return out;
}

// Parses an expression and rebases its column onto the config line.
inline void check_expression(const std::string& src, int line, int column) {
  try {
    geometry::Expression e(src);
  } catch (const ConfigError& err) {
    throw ConfigError("bad expression '" + src + "'", line, column + std::max(err.column(), 1) - 1);
  }
}

inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s;
}

}  // namespace detail

inline void ExperimentConfig::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0) || !std::isfinite(v)) throw ConfigError(std::string(key) + " must be positive");
  };
  if (model != "heisenberg" && model != "grushin" && model != "martinet" && model != "custom-frame")
    throw ConfigError("model must be heisenberg, grushin, martinet or custom-frame");
  positive(lambda_max, "lambda_max");
  positive(intervals, "sector.intervals");
  positive(levels, "sector.levels");
  if (half_width < 0) throw ConfigError("sector.half_width must be positive (or 0 for automatic)");
  if (sector_check < 0) throw ConfigError("sector.check must be nonnegative");
  positive(box_half_width, "box.half_width");
  if (samples < 2) throw ConfigError("samples must be at least 2");
  for (double t : fit_tops) positive(t, "fit_tops");
  for (int n : grid)
    if (n < 4) throw ConfigError("grid needs at least 4 points per axis");
  if (probes < 0) throw ConfigError("probes must be nonnegative");
  if (cutoffs < 1) throw ConfigError("ql.cutoffs must be positive");
  if (!(theta > 0 && theta <= 1)) throw ConfigError("ql.theta must lie in (0, 1]");
  if (flow != "reeb" && flow != "line" && flow != "field") throw ConfigError("flow.kind must be reeb, line or field");
  positive(T, "flow.T");
  positive(dt, "flow.dt");
  if (T < dt) throw ConfigError("flow.T must be at least flow.dt");
  if (stride < 1) throw ConfigError("flow.stride must be positive");
  for (const auto& e : frame_x) detail::check_expression(e, 0, 1);
  for (const auto& e : frame_y) detail::check_expression(e, 0, 1);
  detail::check_expression(volume, 0, 1);
  for (const auto& e : field) detail::check_expression(e, 0, 1);
  for (const auto& e : observables) detail::check_expression(e, 0, 1);
  for (const auto& a : chart) {
    detail::check_expression(a.lo, 0, 1);
    detail::check_expression(a.hi, 0, 1);
    if (!(geometry::Expression(a.hi)(0, 0, 0) > geometry::Expression(a.lo)(0, 0, 0)))
      throw ConfigError("chart axis needs lo < hi");
  }
}

inline std::string ExperimentConfig::serialize() const {
  std::ostringstream os;
  auto d = [](double v) { return format_double(v); };
  auto triple = [](const std::array<std::string, 3>& a) { return a[0] + ", " + a[1] + ", " + a[2]; };
  os << "model = " << model << "\n";
  os << "lambda_max = " << d(lambda_max) << "\n";
  os << "sector.intervals = " << intervals << "\n";
  os << "sector.levels = " << levels << "\n";
  os << "sector.half_width = " << d(half_width) << "\n";
  os << "sector.check = " << sector_check << "\n";
  os << "box.half_width = " << d(box_half_width) << "\n";
  os << "samples = " << samples << "\n";
  {
    std::vector<std::string> t;
    for (double v : fit_tops) t.push_back(d(v));
    os << "fit_tops = " << detail::join(t) << "\n";
  }
  os << "frame.X = " << triple(frame_x) << "\n";
  os << "frame.Y = " << triple(frame_y) << "\n";
  os << "frame.volume = " << volume << "\n";
  const char* names[3] = {"chart.x", "chart.y", "chart.z"};
  for (std::size_t i = 0; i < 3; ++i)
    os << names[i] << " = " << chart[i].lo << ", " << chart[i].hi << ", " << (chart[i].periodic ? "periodic" : "open")
       << "\n";
  os << "grid = " << grid[0] << ", " << grid[1] << ", " << grid[2] << "\n";
  os << "probes = " << probes << "\n";
  for (const auto& o : observables) os << "observable = " << o << "\n";
  os << "ql.cutoffs = " << cutoffs << "\n";
  os << "ql.theta = " << d(theta) << "\n";
  os << "ql.require_cache = " << (require_cache ? "true" : "false") << "\n";
  os << "flow.kind = " << flow << "\n";
  os << "flow.field = " << triple(field) << "\n";
  os << "flow.q0 = " << d(q0[0]) << ", " << d(q0[1]) << ", " << d(q0[2]) << "\n";
  os << "flow.T = " << d(T) << "\n";
  os << "flow.dt = " << d(dt) << "\n";
  os << "flow.a0 = " << d(a0) << "\n";
  os << "flow.stride = " << stride << "\n";
  os << "seed = " << seed << "\n";
  os << "output_dir = " << output_dir << "\n";
  return os.str();
}

inline std::string ExperimentConfig::hash() const {
  ExperimentConfig c = *this;
  c.output_dir.clear();
  return hex64(fnv1a(c.serialize()));
}

inline ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  using detail::Field;
  ExperimentConfig c;
  c.observables.clear();
  std::istringstream is{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    if (detail::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", lineno, 1);
    const std::string key = detail::trim(line.substr(0, eq));
    const auto vstart = line.find_first_not_of(" \t", eq + 1);
    const int col = static_cast<int>(vstart == std::string_view::npos ? eq + 2 : vstart + 1);
    const Field f{detail::trim(line.substr(eq + 1)), lineno, col};
    auto expr = [&](const Field& g) {
      detail::check_expression(g.value, g.line, g.column);
      return g.value;
    };
    auto expr3 = [&]() {
      const auto parts = detail::split_field(f, 3);
      std::array<std::string, 3> out;
      for (std::size_t i = 0; i < 3; ++i) out[i] = expr(parts[i]);
      return out;
    };

    if (key == "model") c.model = f.value;
    else if (key == "lambda_max") c.lambda_max = detail::to_double(f);
    else if (key == "sector.intervals") c.intervals = detail::to_int<int>(f);
    else if (key == "sector.levels") c.levels = detail::to_int<int>(f);
    else if (key == "sector.half_width") c.half_width = detail::to_double(f);
    else if (key == "sector.check") c.sector_check = detail::to_int<int>(f);
    else if (key == "box.half_width") c.box_half_width = detail::to_double(f);
    else if (key == "samples") c.samples = detail::to_int<int>(f);
    else if (key == "fit_tops") {
      c.fit_tops.clear();
      if (!f.value.empty())
        for (const auto& p : detail::split_field(f, 0)) c.fit_tops.push_back(detail::to_double(p));
    } else if (key == "frame.X") c.frame_x = expr3();
    else if (key == "frame.Y") c.frame_y = expr3();
    else if (key == "frame.volume") c.volume = expr(f);
    else if (key == "chart.x" || key == "chart.y" || key == "chart.z") {
      const auto parts = detail::split_field(f, 3);
      AxisSpec a{expr(parts[0]), expr(parts[1]), true};
      if (parts[2].value == "open") a.periodic = false;
      else if (parts[2].value != "periodic") throw ConfigError("axis kind must be periodic or open", lineno, col);
      c.chart[static_cast<std::size_t>(key.back() - 'x')] = a;
    } else if (key == "grid") {
      const auto parts = detail::split_field(f, 0);
      if (parts.size() == 1) c.grid.fill(detail::to_int<int>(parts[0]));
      else if (parts.size() == 3)
        for (std::size_t i = 0; i < 3; ++i) c.grid[i] = detail::to_int<int>(parts[i]);
      else throw ConfigError("grid takes one or three integers", lineno, col);
    } else if (key == "probes") c.probes = detail::to_int<int>(f);
    else if (key == "observable") c.observables.push_back(expr(f));
    else if (key == "ql.cutoffs") c.cutoffs = detail::to_int<int>(f);
    else if (key == "ql.theta") c.theta = detail::to_double(f);
    else if (key == "ql.require_cache") c.require_cache = detail::to_bool(f);
    else if (key == "flow.kind") c.flow = f.value;
    else if (key == "flow.field") c.field = expr3();
    else if (key == "flow.q0") {
      const auto parts = detail::split_field(f, 3);
      for (std::size_t i = 0; i < 3; ++i) c.q0[i] = detail::to_double(parts[i]);
    } else if (key == "flow.T") c.T = detail::to_double(f);
    else if (key == "flow.dt") c.dt = detail::to_double(f);
    else if (key == "flow.a0") c.a0 = detail::to_double(f);
    else if (key == "flow.stride") c.stride = detail::to_int<int>(f);
    else if (key == "seed") c.seed = detail::to_int<std::uint64_t>(f);
    else if (key == "output_dir") c.output_dir = f.value;
    else throw ConfigError("unknown key '" + key + "'", lineno, 1);
  }
  return c;
}

}  // namespace srlab::cli
