#pragma once

// Parameter sweeps over the supported systems: job-file parsing and
// validation, parallel evaluation of optimized Bell/Leggett-Garg values, and
// CSV / SVG output.

#include "qcoarse/ecs.hpp"
#include "qcoarse/error.hpp"
#include "qcoarse/fock_photon.hpp"
#include "qcoarse/generic_bell.hpp"
#include "qcoarse/leggett_garg.hpp"
#include "qcoarse/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace qcoarse {

class OutputError : public std::runtime_error {
 public:
  explicit OutputError(const std::string& what) : std::runtime_error(what) {}
};

enum class System {
  GenericDelta,
  GenericRef,
  Photon,
  EcsEta,
  EcsRef,
  EcsHomodyne,
  LgSpin,
  LgNonclassical,
};

struct ParamSpec {
  std::string name;
  double default_value;
  bool integral = false;
};

struct SystemInfo {
  System system;
  std::string name;
  std::vector<ParamSpec> params;
  std::string variance_of;  // parameter whose square is exposed as "V"; empty if none
  bool temporal = false;    // Leggett-Garg K instead of CHSH B
  std::string default_variable;
};

inline const std::vector<SystemInfo>& system_catalog() {
  static const std::vector<SystemInfo> catalog{
      {System::GenericDelta, "generic-delta", {{"n", 1, true}, {"delta", 0}}, "delta", false, "V"},
      {System::GenericRef, "generic-ref", {{"n", 1, true}, {"Delta", 0}}, "Delta", false, "V"},
      {System::Photon, "photon", {{"n", 1, true}, {"eta", 1}, {"Delta", 0}}, "Delta", false, "V"},
      {System::EcsEta, "ecs-eta", {{"alpha", 5}, {"eta", 1}}, "", false, "eta"},
      {System::EcsRef, "ecs-ref", {{"alpha", 5}, {"Delta", 0}}, "Delta", false, "V"},
      {System::EcsHomodyne, "ecs-homodyne", {{"alpha", 5}, {"Delta", 0}}, "Delta", false, "V"},
      {System::LgSpin, "lg-spin", {{"j", 0.5}, {"Delta", 0}, {"omega", 1}}, "Delta", true, "V"},
      {System::LgNonclassical, "lg-nonclassical", {{"j", 0.5}, {"Delta", 0}, {"omega", 1}}, "Delta", true, "V"},
  };
  return catalog;
}

inline const SystemInfo& system_info(System s) {
  for (const auto& info : system_catalog())
    if (info.system == s) return info;
  throw ValidationError("unregistered system");
}

inline std::string valid_system_list() {
  std::string out;
  for (const auto& info : system_catalog()) {
    if (!out.empty()) out += ", ";
    out += info.name;
  }
  return out;
}

inline System parse_system(std::string_view name, std::string_view field = "system") {
  for (const auto& info : system_catalog())
    if (info.name == name) return info.system;
  throw ValidationError("unknown system '" + std::string(name) + "' in field '" +
                        std::string(field) + "'; valid systems: " + valid_system_list());
}

using ParamMap = std::map<std::string, double>;

struct RunOptions {
  int starts = 0;  // 0 -> 3^d lattice
  int quadrature_order = kPhotonQuadratureOrder;
  long max_evaluations = OptimizationOptions{}.max_evaluations;  // per optimizer start
};

/// An evaluable E(theta_a, theta_b) tagged with the system it models.
struct SpatialCorrelator {
  std::string system;
  std::function<double(double, double)> eval;
  double operator()(double theta_a, double theta_b) const { return eval(theta_a, theta_b); }
};

/// An evaluable C(tau) and a period of it in tau.
struct TemporalCorrelator {
  std::string system;
  std::function<double(double)> eval;
  double period = 2.0 * std::numbers::pi;
  double operator()(double tau) const { return eval(tau); }
};

namespace detail {

inline std::string format_g(double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline const ParamSpec* find_param(const SystemInfo& info, std::string_view name) {
  for (const auto& p : info.params)
    if (p.name == name) return &p;
  return nullptr;
}

inline std::string param_list(const SystemInfo& info) {
  std::string out;
  for (const auto& p : info.params) out += (out.empty() ? "" : ", ") + p.name;
  if (!info.variance_of.empty()) out += ", V";
  return out;
}

inline void check_param_name(const SystemInfo& info, const std::string& name, const std::string& field) {
  if (name == "V" && !info.variance_of.empty()) return;
  if (!find_param(info, name))
    throw ValidationError("unknown parameter '" + name + "' in field '" + field + "' for system " +
                          info.name + "; valid parameters: " + param_list(info));
}

// Apply one assignment; V sets the variance of the system's coarsening std.
inline void assign(const SystemInfo& info, ParamMap& params, const std::string& name, double value,
                   const std::string& field) {
  check_param_name(info, name, field);
  if (!std::isfinite(value))
    throw ValidationError("field '" + field + "' must be finite");
  if (name == "V") {
    if (value < 0.0) throw ValidationError("field '" + field + "': variance V must be >= 0");
    params[info.variance_of] = std::sqrt(value);
    return;
  }
  const auto* spec = find_param(info, name);
  if (spec->integral && value != std::round(value))
    throw ValidationError("field '" + field + "': parameter '" + name + "' must be an integer");
  params[name] = value;
}

}  // namespace detail

/// Defaults for `system`, then `overrides` applied in order.
inline ParamMap resolve_params(System system, const std::vector<std::pair<std::string, double>>& overrides) {
  const auto& info = system_info(system);
  ParamMap params;
  for (const auto& p : info.params) params[p.name] = p.default_value;
  for (const auto& [name, value] : overrides) detail::assign(info, params, name, value, name);
  return params;
}

inline GenericParams generic_params(const ParamMap& p) {
  GenericParams g{static_cast<int>(std::lround(p.at("n"))), p.count("delta") ? p.at("delta") : 0.0,
                  p.count("Delta") ? p.at("Delta") : 0.0};
  g.validate();
  return g;
}

inline PhotonParams photon_params(const ParamMap& p) {
  PhotonParams q{static_cast<int>(std::lround(p.at("n"))), p.at("eta"), p.at("Delta")};
  q.validate();
  return q;
}

inline EcsParams ecs_params(const ParamMap& p) {
  EcsParams q{p.at("alpha"), p.count("eta") ? p.at("eta") : 1.0, p.count("Delta") ? p.at("Delta") : 0.0};
  q.validate();
  return q;
}

inline SpinParams spin_params(const ParamMap& p) {
  SpinParams q{p.at("j"), p.at("Delta"), p.at("omega")};
  q.validate();
  return q;
}

/// Checks every parameter constraint without building anything expensive.
inline void validate_params(System system, const ParamMap& p) {
  switch (system) {
    case System::GenericDelta:
    case System::GenericRef: (void)generic_params(p); break;
    case System::Photon: (void)photon_params(p); break;
    case System::EcsEta:
    case System::EcsRef:
    case System::EcsHomodyne: (void)ecs_params(p); break;
    case System::LgSpin:
    case System::LgNonclassical: (void)spin_params(p); break;
  }
}

inline SpatialCorrelator make_spatial_correlator(System system, const ParamMap& p,
                                                 const RunOptions& opt = {}) {
  const std::string name = system_info(system).name;
  switch (system) {
    case System::GenericDelta: return {name, FuzzyDetectorCorrelator(generic_params(p))};
    case System::GenericRef: {
      const auto g = generic_params(p);
      return {name, [g](double a, double b) { return corr_coarse_reference(a, b, g); }};
    }
    case System::Photon: return {name, PhotonCorrelator(photon_params(p), opt.quadrature_order)};
    case System::EcsEta: return {name, EcsCorrelator(ecs_efficiency_amplitude(ecs_params(p)))};
    case System::EcsRef: return {name, EcsCorrelator(ecs_reference_amplitude(ecs_params(p)))};
    case System::EcsHomodyne: return {name, EcsCorrelator(ecs_homodyne_amplitude(ecs_params(p)))};
    default: break;
  }
  throw ValidationError("system " + name + " has no spatial correlator");
}

inline TemporalCorrelator make_temporal_correlator(System system, const ParamMap& p) {
  const std::string name = system_info(system).name;
  const auto s = spin_params(p);
  const double period = 2.0 * std::numbers::pi / s.omega;
  if (system == System::LgSpin)
    return {name, [s](double tau) { return corr_spin_parity(tau, s); }, period};
  if (system == System::LgNonclassical)
    return {name, [s](double tau) { return corr_nonclassical(tau, s); }, period};
  throw ValidationError("system " + name + " has no temporal correlator");
}

/// Optimized B (or K for the Leggett-Garg systems) at one parameter point.
inline OptimizationResult evaluate_point(System system, const ParamMap& p, const RunOptions& opt = {}) {
  OptimizationOptions nm;
  nm.max_evaluations = opt.max_evaluations;
  if (system_info(system).temporal) {
    const auto c = make_temporal_correlator(system, p);
    return maximize_lg(c, c.period, opt.starts, nm);
  }
  const auto e = make_spatial_correlator(system, p, opt);
  return maximize_chsh(e, opt.starts, nm).result;
}

struct Grid {
  double min = 0.0;
  double max = 1.0;
  int steps = 11;

  std::vector<double> points() const {
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k)
      out[static_cast<std::size_t>(k)] =
          steps == 1 ? min : (k == steps - 1 ? max : min + (max - min) * k / (steps - 1));
    return out;
  }
};

struct Series {
  std::string label;
  std::vector<std::pair<std::string, double>> params;  // in file order
};

struct PlotLabels {
  std::string title;
  std::string x_label;
  std::string y_label;
};

struct SweepSpec {
  System system = System::GenericRef;
  std::string variable = "V";
  Grid grid;
  std::vector<Series> series;
  RunOptions options;
  PlotLabels labels;
};

struct SweepRow {
  std::string series;
  double sweep_value = 0.0;
  double value = 0.0;
  bool converged = true;
};

struct SweepResult {
  System system = System::GenericRef;
  std::string variable;
  std::vector<std::string> series_order;
  std::vector<SweepRow> rows;
  PlotLabels labels;

  bool all_converged() const {
    return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.converged; });
  }
};

/// Resolved parameters of one (series, grid point) pair.
inline ParamMap point_params(const SweepSpec& spec, const Series& series, double sweep_value) {
  auto assignments = series.params;
  assignments.emplace_back(spec.variable, sweep_value);
  return resolve_params(spec.system, assignments);
}

inline void validate_spec(const SweepSpec& spec) {
  const auto& info = system_info(spec.system);
  detail::check_param_name(info, spec.variable, "sweep.variable");
  const auto& g = spec.grid;
  if (!std::isfinite(g.min) || !std::isfinite(g.max))
    throw ValidationError("malformed grid: sweep.min and sweep.max must be finite");
  if (g.steps == 1) {
    if (g.min != g.max)
      throw ValidationError("malformed grid: a single-point grid needs sweep.min == sweep.max");
  } else {
    if (g.steps < 2)
      throw ValidationError("malformed grid: sweep.steps must be >= 2, got " + std::to_string(g.steps));
    if (!(g.min < g.max))
      throw ValidationError("malformed grid: sweep.min must be < sweep.max");
  }
  std::set<std::string> labels;
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const auto& s = spec.series[i];
    const std::string field = "series[" + std::to_string(i) + "]";
    if (s.label.empty()) throw ValidationError("field '" + field + ".label' must not be empty");
    if (s.label.find_first_of(",\"\r\n") != std::string::npos)
      throw ValidationError("field '" + field + ".label' must not contain commas, quotes or newlines");
    if (!labels.insert(s.label).second)
      throw ValidationError("field '" + field + ".label': duplicate label '" + s.label + "'");
    for (const auto& [name, value] : s.params) {
      detail::check_param_name(info, name, field + ".params." + name);
      if (name == spec.variable)
        throw ValidationError("field '" + field + ".params." + name +
                              "' fixes the sweep variable; remove it or sweep another variable");
    }
  }
  if (spec.options.starts < 0) throw ValidationError("field 'options.starts' must be >= 0");
  if (spec.options.quadrature_order < 1 || spec.options.quadrature_order > kMaxHermiteOrder)
    throw ValidationError("field 'options.quadrature_order' must lie in [1, " +
                          std::to_string(kMaxHermiteOrder) + "]");
  if (spec.options.max_evaluations < 1) throw ValidationError("field 'options.max_evaluations' must be >= 1");
  // Every point must resolve to valid physical parameters.
  for (const auto& s : spec.series) {
    for (double v : g.points()) {
      try {
        validate_params(spec.system, point_params(spec, s, v));
      } catch (const ValidationError& e) {
        throw ValidationError("series '" + s.label + "' at " + spec.variable + " = " +
                              detail::format_g(v) + ": " + e.what());
      }
    }
  }
}

/// Evaluates every (series, grid point) pair. Points run concurrently; each
/// writes only its own row, so the result does not depend on scheduling.
inline SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 0) {
  validate_spec(spec);
  SweepResult result;
  result.system = spec.system;
  result.variable = spec.variable;
  result.labels = spec.labels;
  const auto points = spec.grid.points();
  for (const auto& s : spec.series) {
    result.series_order.push_back(s.label);
    for (double v : points) result.rows.push_back({s.label, v, 0.0, false});
  }

  const std::size_t total = result.rows.size();
  std::vector<std::exception_ptr> errors(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      try {
        const auto& series = spec.series[k / points.size()];
        auto& row = result.rows[k];
        const auto res = evaluate_point(spec.system, point_params(spec, series, row.sweep_value), spec.options);
        row.value = res.value;
        row.converged = res.converged && std::isfinite(res.value);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(total, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return result;
}

// ---------------------------------------------------------------------------
// Job files
// ---------------------------------------------------------------------------
//
// One `key = value` per line; `#` starts a comment. Keys:
//   system                  required, one of the registered system names
//   sweep.variable          parameter to sweep (default V, or eta for ecs-eta)
//   sweep.min, sweep.max    grid bounds (default 0, 1)
//   sweep.steps             grid points (default 11)
//   series[i].label         required for each series i = 0, 1, ...
//   series[i].params.NAME   fixed parameter of series i
//   options.starts          optimizer lattice starts (default 3^d)
//   options.quadrature_order  Gauss-Hermite order per axis (default 20)
//   options.max_evaluations   objective evaluations per optimizer start (default 20000)
//   plot.title, plot.x_label, plot.y_label
// Without any series the job has a single series labelled "default".

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_number(const std::string& text, const std::string& field) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty())
    throw ValidationError("field '" + field + "': expected a number, got '" + text + "'");
  return v;
}

inline int parse_int(const std::string& text, const std::string& field, const std::string& what) {
  const double v = parse_number(text, field);
  if (v != std::round(v) || std::fabs(v) > 1e9)
    throw ValidationError(what + ": field '" + field + "' must be an integer, got '" + text + "'");
  return static_cast<int>(v);
}

}  // namespace detail

inline SweepSpec parse_job(std::string_view text) {
  std::map<std::string, std::pair<std::string, int>> entries;  // key -> (value, line)
  std::vector<std::string> key_order;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError("line " + std::to_string(lineno) + ": expected 'key = value', got '" + t + "'");
    const std::string key = detail::trim(std::string_view(t).substr(0, eq));
    const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ValidationError("line " + std::to_string(lineno) + ": empty key");
    if (!entries.emplace(key, std::make_pair(value, lineno)).second)
      throw ValidationError("field '" + key + "' given twice (line " + std::to_string(lineno) + ")");
    key_order.push_back(key);
  }

  SweepSpec spec;
  const auto sys = entries.find("system");
  if (sys == entries.end()) throw ValidationError("missing required field 'system'; valid systems: " + valid_system_list());
  spec.system = parse_system(sys->second.first, "system");
  const auto& info = system_info(spec.system);
  spec.variable = info.default_variable;

  std::map<int, Series> series;
  std::map<int, bool> has_label;
  for (const auto& key : key_order) {
    const std::string& value = entries.at(key).first;
    if (key == "system") continue;
    if (key == "sweep.variable") {
      spec.variable = value;
    } else if (key == "sweep.min") {
      spec.grid.min = detail::parse_number(value, key);
    } else if (key == "sweep.max") {
      spec.grid.max = detail::parse_number(value, key);
    } else if (key == "sweep.steps") {
      spec.grid.steps = detail::parse_int(value, key, "malformed grid");
    } else if (key == "options.starts") {
      spec.options.starts = detail::parse_int(value, key, "bad option");
    } else if (key == "options.max_evaluations") {
      spec.options.max_evaluations = detail::parse_int(value, key, "bad option");
    } else if (key == "options.quadrature_order") {
      spec.options.quadrature_order = detail::parse_int(value, key, "bad option");
    } else if (key == "plot.title") {
      spec.labels.title = value;
    } else if (key == "plot.x_label") {
      spec.labels.x_label = value;
    } else if (key == "plot.y_label") {
      spec.labels.y_label = value;
    } else if (key.rfind("series[", 0) == 0) {
      const auto close = key.find(']');
      if (close == std::string::npos || close == 7)
        throw ValidationError("unknown field '" + key + "'");
      const std::string idx_text = key.substr(7, close - 7);
      if (idx_text.find_first_not_of("0123456789") != std::string::npos || idx_text.size() > 6)
        throw ValidationError("field '" + key + "': series index must be a non-negative integer");
      const int idx = std::stoi(idx_text);
      const std::string rest = key.substr(close + 1);
      auto& s = series[idx];
      if (rest == ".label") {
        s.label = value;
        has_label[idx] = true;
      } else if (rest.rfind(".params.", 0) == 0) {
        const std::string name = rest.substr(8);
        detail::check_param_name(info, name, key);
        s.params.emplace_back(name, detail::parse_number(value, key));
      } else {
        throw ValidationError("unknown field '" + key + "'");
      }
    } else {
      throw ValidationError("unknown field '" + key + "'");
    }
  }

  int expect = 0;
  for (auto& [idx, s] : series) {
    if (idx != expect)
      throw ValidationError("field 'series[" + std::to_string(expect) + "]' missing; series indices must be contiguous from 0");
    if (!has_label[idx])
      throw ValidationError("missing required field 'series[" + std::to_string(idx) + "].label'");
    spec.series.push_back(std::move(s));
    ++expect;
  }
  if (spec.series.empty()) spec.series.push_back({"default", {}});

  if (spec.labels.x_label.empty()) spec.labels.x_label = spec.variable;
  if (spec.labels.y_label.empty()) spec.labels.y_label = info.temporal ? "K" : "B";
  validate_spec(spec);
  return spec;
}

inline SweepSpec load_job(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read job file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_job(ss.str());
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline constexpr std::string_view kCsvHeader = "series,sweep_value,value,converged";

/// Rows in (series label, sweep value) order.
inline std::vector<SweepRow> sorted_rows(const SweepResult& result) {
  auto rows = result.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.series != b.series) return a.series < b.series;
    return a.sweep_value < b.sweep_value;
  });
  return rows;
}

inline std::string render_csv(const SweepResult& result) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : sorted_rows(result)) {
    out += r.series;
    out += ',';
    out += detail::format_g(r.sweep_value);
    out += ',';
    out += detail::format_g(r.value);
    out += ',';
    out += r.converged ? "true" : "false";
    out += '\n';
  }
  return out;
}

namespace detail {

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw OutputError("failed writing '" + path + "'");
}

}  // namespace detail

inline void emit_csv(const SweepResult& result, const std::string& path) {
  detail::write_file(path, render_csv(result));
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

struct SvgOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  double bound = 2.0;
  bool show_bound = true;
};

/// Affine map from data to the fixed 800x600 canvas.
struct PlotFrame {
  static constexpr double kWidth = 800.0;
  static constexpr double kHeight = 600.0;
  static constexpr double kLeft = 90.0;
  static constexpr double kRight = 600.0;
  static constexpr double kTop = 50.0;
  static constexpr double kBottom = 530.0;

  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  double x_step = 0.1, y_step = 0.1;

  double map_x(double v) const { return kLeft + (v - x0) / (x1 - x0) * (kRight - kLeft); }
  double map_y(double v) const { return kBottom - (v - y0) / (y1 - y0) * (kBottom - kTop); }
};

namespace detail {

inline double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10.0 * mag;
}

inline void nice_range(double lo, double hi, int target, double& a, double& b, double& step) {
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  step = nice_step(hi - lo, target);
  a = std::floor(lo / step + 1e-9) * step;
  b = std::ceil(hi / step - 1e-9) * step;
}

inline std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string tick_label(double v, double step) {
  if (std::fabs(v) < 1e-9 * step) v = 0.0;
  char buf[64];
  const int decimals = std::max(0, static_cast<int>(std::ceil(-std::log10(step) - 1e-9)) + 1);
  std::snprintf(buf, sizeof buf, "%.*f", std::min(decimals, 6), v);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline PlotFrame plot_frame(const SweepResult& result, const SvgOptions& opt) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& r : result.rows) {
    xmin = std::min(xmin, r.sweep_value);
    xmax = std::max(xmax, r.sweep_value);
    ymin = std::min(ymin, r.value);
    ymax = std::max(ymax, r.value);
  }
  if (result.rows.empty()) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  if (opt.show_bound) {
    ymin = std::min(ymin, opt.bound);
    ymax = std::max(ymax, opt.bound);
  }
  PlotFrame f;
  detail::nice_range(xmin, xmax, 6, f.x0, f.x1, f.x_step);
  detail::nice_range(ymin, ymax, 6, f.y0, f.y1, f.y_step);
  return f;
}

/// Self-contained SVG line chart of a sweep, one polyline per series, with a
/// dot-dashed rule at the classical bound. Output depends only on the inputs.
inline std::string render_svg(const SweepResult& result, SvgOptions opt = {}) {
  using detail::fixed;
  if (opt.title.empty()) opt.title = result.labels.title;
  if (opt.x_label.empty()) opt.x_label = result.labels.x_label.empty() ? result.variable : result.labels.x_label;
  if (opt.y_label.empty()) opt.y_label = result.labels.y_label;
  const PlotFrame f = plot_frame(result, opt);

  static const char* const kColors[] = {"#1f4e9c", "#c0392b", "#1e8449", "#7d3c98", "#d35400", "#5d6d7e"};
  static const char* const kDashes[] = {"", "9 5", "2 4", "12 4 2 4"};

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
  if (!opt.title.empty())
    s << "<text x=\"" << fixed((PlotFrame::kLeft + PlotFrame::kRight) / 2)
      << "\" y=\"30.000\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">"
      << detail::xml_escape(opt.title) << "</text>\n";

  // Axes and ticks.
  s << "<g id=\"axes\" stroke=\"#000000\" stroke-width=\"1\" fill=\"none\">\n";
  s << "<rect x=\"" << fixed(PlotFrame::kLeft) << "\" y=\"" << fixed(PlotFrame::kTop) << "\" width=\""
    << fixed(PlotFrame::kRight - PlotFrame::kLeft) << "\" height=\""
    << fixed(PlotFrame::kBottom - PlotFrame::kTop) << "\"/>\n";
  const int nx = static_cast<int>(std::lround((f.x1 - f.x0) / f.x_step));
  const int ny = static_cast<int>(std::lround((f.y1 - f.y0) / f.y_step));
  for (int k = 0; k <= nx; ++k) {
    const double x = f.map_x(f.x0 + k * f.x_step);
    s << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(PlotFrame::kBottom) << "\" x2=\"" << fixed(x)
      << "\" y2=\"" << fixed(PlotFrame::kBottom + 6) << "\"/>\n";
  }
  for (int k = 0; k <= ny; ++k) {
    const double y = f.map_y(f.y0 + k * f.y_step);
    s << "<line x1=\"" << fixed(PlotFrame::kLeft - 6) << "\" y1=\"" << fixed(y) << "\" x2=\""
      << fixed(PlotFrame::kLeft) << "\" y2=\"" << fixed(y) << "\"/>\n";
  }
  s << "</g>\n";
  s << "<g id=\"tick-labels\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#000000\">\n";
  for (int k = 0; k <= nx; ++k) {
    const double v = f.x0 + k * f.x_step;
    s << "<text x=\"" << fixed(f.map_x(v)) << "\" y=\"" << fixed(PlotFrame::kBottom + 22)
      << "\" text-anchor=\"middle\">" << detail::tick_label(v, f.x_step) << "</text>\n";
  }
  for (int k = 0; k <= ny; ++k) {
    const double v = f.y0 + k * f.y_step;
    s << "<text x=\"" << fixed(PlotFrame::kLeft - 10) << "\" y=\"" << fixed(f.map_y(v) + 4)
      << "\" text-anchor=\"end\">" << detail::tick_label(v, f.y_step) << "</text>\n";
  }
  s << "</g>\n";
  s << "<text x=\"" << fixed((PlotFrame::kLeft + PlotFrame::kRight) / 2) << "\" y=\"575.000\" "
    << "text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << detail::xml_escape(opt.x_label) << "</text>\n";
  s << "<text x=\"25.000\" y=\"" << fixed((PlotFrame::kTop + PlotFrame::kBottom) / 2)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\" transform=\"rotate(-90 25.000 "
    << fixed((PlotFrame::kTop + PlotFrame::kBottom) / 2) << ")\">" << detail::xml_escape(opt.y_label)
    << "</text>\n";

  if (opt.show_bound) {
    const double y = f.map_y(opt.bound);
    s << "<line id=\"classical-bound\" x1=\"" << fixed(PlotFrame::kLeft) << "\" y1=\"" << fixed(y)
      << "\" x2=\"" << fixed(PlotFrame::kRight) << "\" y2=\"" << fixed(y)
      << "\" stroke=\"#555555\" stroke-width=\"1.5\" stroke-dasharray=\"10 4 2 4\"/>\n";
  }

  for (std::size_t i = 0; i < result.series_order.size(); ++i) {
    const auto& label = result.series_order[i];
    std::vector<const SweepRow*> pts;
    for (const auto& r : result.rows)
      if (r.series == label) pts.push_back(&r);
    std::stable_sort(pts.begin(), pts.end(),
                     [](const SweepRow* a, const SweepRow* b) { return a->sweep_value < b->sweep_value; });
    s << "<polyline class=\"series\" id=\"series-" << i << "\" fill=\"none\" stroke=\""
      << kColors[i % std::size(kColors)] << "\" stroke-width=\"2\"";
    if (const char* dash = kDashes[i % std::size(kDashes)]; *dash)
      s << " stroke-dasharray=\"" << dash << "\"";
    s << " points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k)
      s << (k ? " " : "") << fixed(f.map_x(pts[k]->sweep_value)) << "," << fixed(f.map_y(pts[k]->value));
    s << "\"/>\n";
  }

  s << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"14\">\n";
  for (std::size_t i = 0; i < result.series_order.size(); ++i) {
    const double y = PlotFrame::kTop + 20.0 + 24.0 * static_cast<double>(i);
    s << "<line x1=\"620.000\" y1=\"" << fixed(y) << "\" x2=\"660.000\" y2=\"" << fixed(y) << "\" stroke=\""
      << kColors[i % std::size(kColors)] << "\" stroke-width=\"2\"";
    if (const char* dash = kDashes[i % std::size(kDashes)]; *dash)
      s << " stroke-dasharray=\"" << dash << "\"";
    s << "/>\n";
    s << "<text x=\"668.000\" y=\"" << fixed(y + 5) << "\">" << detail::xml_escape(result.series_order[i])
      << "</text>\n";
  }
  s << "</g>\n";
  s << "</svg>\n";
  return s.str();
}

inline void emit_svg(const SweepResult& result, const std::string& path, const SvgOptions& opt = {}) {
  detail::write_file(path, render_svg(result, opt));
}

}  // namespace qcoarse
