#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tmfa/modulation_opt.hpp"
#include "tmfa/system_model.hpp"
#include "tmfa/time_domain.hpp"

namespace tmfa {

// ---------------------------------------------------------------------------
// Run configuration: one JSON document with nested blocks, overlaid on the
// built-in defaults. Frequencies accept plain Hz numbers or strings with an
// SI suffix (k, M, G); angles are degrees at this interface and radians
// everywhere inside. Unknown keys are rejected so typos cannot silently
// fall back to defaults.
// ---------------------------------------------------------------------------

/// Anything wrong with the configuration document itself.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct SweepBlock {
  double f_start_hz = 2.28e9;
  double f_stop_hz = 2.52e9;
  int points = 201;
  bool harmonics = false;  ///< add per-harmonic magnitude columns to the CSV
};

struct SolverBlock {
  int k_max = 5;
  double residual_tol = 1e-10;
};

struct OracleBlock {
  int steps_per_carrier = 200;
  int settle_periods = 200;
  int window_periods = 8;
  double settle_tol = 1e-5;
  int max_extra_windows = 40;
  double tolerance_db = 0.05;  ///< gate on |HB - TD| per direction
  /// Probe points; each carrier must be an exact integer multiple of its
  /// modulation frequency. Empty selects the built-in five-point set.
  std::vector<std::pair<double, double>> points;  ///< (f_hz, fm_hz)
};

struct OptimizerBlock {
  ModulationBounds bounds;
  double il_guard_db = 1.0;
  double penalty_weight = 10.0;
  double iso_cap_db = 22.0;
  std::array<int, 3> grid{8, 8, 12};
  int max_iterations = 300;
  double spread_tolerance = 1e-9;
  std::uint64_t seed = 0;
};

/// Realization knobs of the composed device; the radiated passband is
/// deliberately narrower and lossier than the standalone filter block.
struct SystemBlock {
  double fbw = default_system_filter().fbw;
  double q_u = 140.0;
  double c_res_farad = 0.86e-12;
  double table_lo_hz = 1.3e9;
  double table_hi_hz = 3.5e9;
  int table_points = 221;
};

struct RunConfig {
  std::string output_dir = "out";
  bool svg = false;

  FilterSpec filter;            ///< standalone filter; both ports at z0
  double filter_q_u = 200.0;    ///< unloaded resonator Q of the standalone filter
  double c_res_farad = 0.86e-12;

  double fm_hz = 75e6;          ///< modulation block
  double delta_m = 0.09;
  double delta_phi_deg = 56.0;

  YagiGeometry antenna = default_geometry();
  SweepBlock sweep;
  SolverBlock solver;
  OracleBlock oracle;
  OptimizerBlock optimizer;
  SystemBlock system;

  ModulationSpec modulation_spec() const {
    if (delta_m == 0.0) return ModulationSpec::off(filter.order);
    return ModulationSpec::progressive(filter.order, fm_hz, delta_m, deg_to_rad(delta_phi_deg));
  }

  SystemOptions system_options() const {
    SystemOptions s;
    s.filter = filter;
    s.filter.fbw = system.fbw;
    s.c_res_farad = system.c_res_farad;
    s.q_u = system.q_u;
    s.geometry = antenna;
    s.table_lo_hz = system.table_lo_hz;
    s.table_hi_hz = system.table_hi_hz;
    s.table_points = system.table_points;
    s.k_max = solver.k_max;
    return s;
  }

  ModOptOptions optimizer_options() const {
    ModOptOptions o;
    o.bounds = optimizer.bounds;
    o.il_guard_db = optimizer.il_guard_db;
    o.penalty_weight = optimizer.penalty_weight;
    o.iso_cap_db = optimizer.iso_cap_db;
    o.grid = optimizer.grid;
    o.max_iterations = optimizer.max_iterations;
    o.spread_tolerance = optimizer.spread_tolerance;
    o.seed = optimizer.seed;
    o.k_max = solver.k_max;
    return o;
  }

  TdOptions oracle_options() const {
    TdOptions o;
    o.steps_per_carrier = oracle.steps_per_carrier;
    o.settle_periods = oracle.settle_periods;
    o.window_periods = oracle.window_periods;
    o.settle_tol = oracle.settle_tol;
    o.max_extra_windows = oracle.max_extra_windows;
    o.k_max = solver.k_max;
    return o;
  }

  std::vector<std::pair<double, double>> oracle_points() const {
    if (!oracle.points.empty()) return oracle.points;
    std::vector<std::pair<double, double>> out;
    for (const auto& p : oracle_point_set()) out.emplace_back(p.f_hz(), p.fm_hz);
    return out;
  }

  std::vector<double> sweep_grid() const {
    if (sweep.points == 1) return {sweep.f_start_hz};
    return frequency_grid(sweep.f_start_hz, sweep.f_stop_hz, sweep.points);
  }

  /// Every downstream precondition, checked before any computation.
  void validate() const {
    filter.validate();
    modulation_spec().validate(filter.order);
    antenna.validate();
    system_options().validate();
    optimizer_options();  // constructs bounds; range checks below
    optimizer.bounds.validate();
    if (output_dir.empty()) throw ConfigError("config: output_dir must not be empty");
    if (!(filter_q_u > 0.0)) throw ConfigError("config: filter.q_u must be > 0");
    if (!(c_res_farad > 0.0)) throw ConfigError("config: filter.c_res_farad must be > 0");
    if (!(fm_hz > 0.0)) throw ConfigError("config: modulation.fm_hz must be > 0");
    if (!(delta_m >= 0.0) || !(delta_m < 1.0))
      throw ConfigError("config: modulation.delta_m must be in [0, 1)");
    if (!(sweep.f_start_hz > 0.0) || !(sweep.f_stop_hz >= sweep.f_start_hz))
      throw ConfigError("config: sweep needs 0 < f_start <= f_stop");
    if (sweep.points < 1) throw ConfigError("config: sweep.points must be >= 1");
    if (sweep.points > 1 && !(sweep.f_stop_hz > sweep.f_start_hz))
      throw ConfigError("config: multi-point sweep needs f_stop > f_start");
    if (solver.k_max < 1) throw ConfigError("config: solver.k_max must be >= 1");
    if (!(solver.residual_tol > 0.0)) throw ConfigError("config: solver.residual_tol must be > 0");
    if (oracle.steps_per_carrier < 16 || oracle.settle_periods < 1 || oracle.window_periods < 1 ||
        oracle.max_extra_windows < 0 || !(oracle.settle_tol > 0.0))
      throw ConfigError("config: bad oracle block");
    if (!(oracle.tolerance_db > 0.0)) throw ConfigError("config: oracle.tolerance_db must be > 0");
    for (const auto& [f, fm] : oracle_points()) {
      if (!(f > 0.0) || !(fm > 0.0))
        throw ConfigError("config: oracle points need positive frequencies");
      const double ratio = f / fm;
      if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        throw ConfigError("config: oracle point " + std::to_string(f) +
                          " Hz is not an integer multiple of fm");
    }
    if (optimizer.grid[0] < 2 || optimizer.grid[1] < 2 || optimizer.grid[2] < 2)
      throw ConfigError("config: optimizer.grid needs >= 2 points per axis");
    if (optimizer.max_iterations < 1)
      throw ConfigError("config: optimizer.max_iterations must be >= 1");
  }
};

namespace config_detail {

using nlohmann::json;

/// "2.4G" -> 2.4e9; plain numbers pass through.
inline double parse_hz(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    size_t pos = 0;
    double base = 0.0;
    try {
      base = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw ConfigError("config: " + key + ": cannot parse frequency '" + s + "'");
    }
    std::string suffix = s.substr(pos);
    if (suffix.empty()) return base;
    if (suffix == "k") return base * 1e3;
    if (suffix == "M") return base * 1e6;
    if (suffix == "G") return base * 1e9;
    throw ConfigError("config: " + key + ": unknown SI suffix '" + suffix + "'");
  }
  throw ConfigError("config: " + key + ": expected a number or an SI-suffixed string");
}

inline void reject_unknown(const json& block, const std::vector<std::string>& allowed,
                           const std::string& where) {
  if (!block.is_object()) throw ConfigError("config: " + where + " must be an object");
  for (const auto& [key, value] : block.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("config: unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void get_to(const json& block, const char* key, T& out) {
  if (auto it = block.find(key); it != block.end()) {
    try {
      it->get_to(out);
    } catch (const json::exception& e) {
      throw ConfigError("config: " + std::string(key) + ": " + e.what());
    }
  }
}

inline void get_hz(const json& block, const char* key, double& out) {
  if (auto it = block.find(key); it != block.end()) out = parse_hz(*it, key);
}

inline void apply_filter(const json& j, RunConfig& cfg) {
  reject_unknown(j, {"f0_hz", "fbw", "rl_db", "order", "z0_ohm", "q_u", "c_res_farad"}, "filter");
  get_hz(j, "f0_hz", cfg.filter.f0_hz);
  get_to(j, "fbw", cfg.filter.fbw);
  get_to(j, "rl_db", cfg.filter.rl_db);
  get_to(j, "order", cfg.filter.order);
  get_to(j, "z0_ohm", cfg.filter.z0_ohm);
  get_to(j, "q_u", cfg.filter_q_u);
  get_to(j, "c_res_farad", cfg.c_res_farad);
}

inline void apply_modulation(const json& j, RunConfig& cfg) {
  reject_unknown(j, {"fm_hz", "delta_m", "delta_phi_deg"}, "modulation");
  get_hz(j, "fm_hz", cfg.fm_hz);
  get_to(j, "delta_m", cfg.delta_m);
  get_to(j, "delta_phi_deg", cfg.delta_phi_deg);
}

inline void apply_antenna(const json& j, RunConfig& cfg) {
  reject_unknown(j, {"driven_index", "elements"}, "antenna");
  get_to(j, "driven_index", cfg.antenna.driven_index);
  if (auto it = j.find("elements"); it != j.end()) {
    if (!it->is_array() || it->empty())
      throw ConfigError("config: antenna.elements must be a non-empty array");
    cfg.antenna.elements.clear();
    for (const auto& e : *it) {
      reject_unknown(e, {"half_length_m", "radius_m", "position_m"}, "antenna.elements[]");
      WireElement w;
      get_to(e, "half_length_m", w.half_length_m);
      get_to(e, "radius_m", w.radius_m);
      get_to(e, "position_m", w.position_m);
      cfg.antenna.elements.push_back(w);
    }
  }
}

inline void apply_sweep(const json& j, RunConfig& cfg) {
  reject_unknown(j, {"f_start_hz", "f_stop_hz", "points", "harmonics"}, "sweep");
  get_hz(j, "f_start_hz", cfg.sweep.f_start_hz);
  get_hz(j, "f_stop_hz", cfg.sweep.f_stop_hz);
  get_to(j, "points", cfg.sweep.points);
  get_to(j, "harmonics", cfg.sweep.harmonics);
}

inline void apply_solver(const json& j, RunConfig& cfg) {
  reject_unknown(j, {"k_max", "residual_tol"}, "solver");
  get_to(j, "k_max", cfg.solver.k_max);
  get_to(j, "residual_tol", cfg.solver.residual_tol);
}

inline void apply_oracle(const json& j, RunConfig& cfg) {
  reject_unknown(j,
                 {"steps_per_carrier", "settle_periods", "window_periods", "settle_tol",
                  "max_extra_windows", "tolerance_db", "points"},
                 "oracle");
  get_to(j, "steps_per_carrier", cfg.oracle.steps_per_carrier);
  get_to(j, "settle_periods", cfg.oracle.settle_periods);
  get_to(j, "window_periods", cfg.oracle.window_periods);
  get_to(j, "settle_tol", cfg.oracle.settle_tol);
  get_to(j, "max_extra_windows", cfg.oracle.max_extra_windows);
  get_to(j, "tolerance_db", cfg.oracle.tolerance_db);
  if (auto it = j.find("points"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("config: oracle.points must be an array");
    cfg.oracle.points.clear();
    for (const auto& p : *it) {
      reject_unknown(p, {"f_hz", "fm_hz"}, "oracle.points[]");
      double f = 0.0, fm = 0.0;
      get_hz(p, "f_hz", f);
      get_hz(p, "fm_hz", fm);
      cfg.oracle.points.emplace_back(f, fm);
    }
  }
}

inline void apply_optimizer(const json& j, RunConfig& cfg) {
  reject_unknown(j,
                 {"fm_lo_hz", "fm_hi_hz", "delta_m_lo", "delta_m_hi", "delta_phi_lo_deg",
                  "delta_phi_hi_deg", "il_guard_db", "penalty_weight", "iso_cap_db", "grid",
                  "max_iterations", "spread_tolerance", "seed"},
                 "optimizer");
  get_hz(j, "fm_lo_hz", cfg.optimizer.bounds.fm_lo_hz);
  get_hz(j, "fm_hi_hz", cfg.optimizer.bounds.fm_hi_hz);
  get_to(j, "delta_m_lo", cfg.optimizer.bounds.dm_lo);
  get_to(j, "delta_m_hi", cfg.optimizer.bounds.dm_hi);
  if (auto it = j.find("delta_phi_lo_deg"); it != j.end())
    cfg.optimizer.bounds.dphi_lo_rad = deg_to_rad(it->get<double>());
  if (auto it = j.find("delta_phi_hi_deg"); it != j.end())
    cfg.optimizer.bounds.dphi_hi_rad = deg_to_rad(it->get<double>());
  get_to(j, "il_guard_db", cfg.optimizer.il_guard_db);
  get_to(j, "penalty_weight", cfg.optimizer.penalty_weight);
  get_to(j, "iso_cap_db", cfg.optimizer.iso_cap_db);
  get_to(j, "grid", cfg.optimizer.grid);
  get_to(j, "max_iterations", cfg.optimizer.max_iterations);
  get_to(j, "spread_tolerance", cfg.optimizer.spread_tolerance);
  get_to(j, "seed", cfg.optimizer.seed);
}

inline void apply_system(const json& j, RunConfig& cfg) {
  reject_unknown(j, {"fbw", "q_u", "c_res_farad", "table_lo_hz", "table_hi_hz", "table_points"},
                 "system");
  get_to(j, "fbw", cfg.system.fbw);
  get_to(j, "q_u", cfg.system.q_u);
  get_to(j, "c_res_farad", cfg.system.c_res_farad);
  get_hz(j, "table_lo_hz", cfg.system.table_lo_hz);
  get_hz(j, "table_hi_hz", cfg.system.table_hi_hz);
  get_to(j, "table_points", cfg.system.table_points);
}

}  // namespace config_detail

/// Overlays a JSON document (comments allowed) on the built-in defaults.
/// Throws ConfigError on syntax errors, unknown keys, or invalid values;
/// the returned config has passed validate().
inline RunConfig parse_config(const std::string& text) {
  using config_detail::json;
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  config_detail::reject_unknown(
      doc,
      {"output_dir", "svg", "filter", "modulation", "antenna", "sweep", "solver", "oracle",
       "optimizer", "system"},
      "the top level");

  RunConfig cfg;
  config_detail::get_to(doc, "output_dir", cfg.output_dir);
  config_detail::get_to(doc, "svg", cfg.svg);
  if (auto it = doc.find("filter"); it != doc.end()) config_detail::apply_filter(*it, cfg);
  if (auto it = doc.find("modulation"); it != doc.end()) config_detail::apply_modulation(*it, cfg);
  if (auto it = doc.find("antenna"); it != doc.end()) config_detail::apply_antenna(*it, cfg);
  if (auto it = doc.find("sweep"); it != doc.end()) config_detail::apply_sweep(*it, cfg);
  if (auto it = doc.find("solver"); it != doc.end()) config_detail::apply_solver(*it, cfg);
  if (auto it = doc.find("oracle"); it != doc.end()) config_detail::apply_oracle(*it, cfg);
  if (auto it = doc.find("optimizer"); it != doc.end()) config_detail::apply_optimizer(*it, cfg);
  if (auto it = doc.find("system"); it != doc.end()) config_detail::apply_system(*it, cfg);

  try {
    cfg.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

/// Canonical JSON image of a config: every field, sorted keys, plain Hz
/// numbers and degree angles. The text is itself a loadable config, and
/// identical configs produce identical bytes.
inline std::string resolved_config(const RunConfig& cfg) {
  using config_detail::json;
  json j;
  j["output_dir"] = cfg.output_dir;
  j["svg"] = cfg.svg;
  j["filter"] = {{"f0_hz", cfg.filter.f0_hz},   {"fbw", cfg.filter.fbw},
                 {"rl_db", cfg.filter.rl_db},   {"order", cfg.filter.order},
                 {"z0_ohm", cfg.filter.z0_ohm}, {"q_u", cfg.filter_q_u},
                 {"c_res_farad", cfg.c_res_farad}};
  j["modulation"] = {
      {"fm_hz", cfg.fm_hz}, {"delta_m", cfg.delta_m}, {"delta_phi_deg", cfg.delta_phi_deg}};
  json elements = json::array();
  for (const auto& e : cfg.antenna.elements)
    elements.push_back({{"half_length_m", e.half_length_m},
                        {"radius_m", e.radius_m},
                        {"position_m", e.position_m}});
  j["antenna"] = {{"driven_index", cfg.antenna.driven_index}, {"elements", elements}};
  j["sweep"] = {{"f_start_hz", cfg.sweep.f_start_hz},
                {"f_stop_hz", cfg.sweep.f_stop_hz},
                {"points", cfg.sweep.points},
                {"harmonics", cfg.sweep.harmonics}};
  j["solver"] = {{"k_max", cfg.solver.k_max}, {"residual_tol", cfg.solver.residual_tol}};
  json points = json::array();
  for (const auto& [f, fm] : cfg.oracle.points)
    points.push_back({{"f_hz", f}, {"fm_hz", fm}});
  j["oracle"] = {{"steps_per_carrier", cfg.oracle.steps_per_carrier},
                 {"settle_periods", cfg.oracle.settle_periods},
                 {"window_periods", cfg.oracle.window_periods},
                 {"settle_tol", cfg.oracle.settle_tol},
                 {"max_extra_windows", cfg.oracle.max_extra_windows},
                 {"tolerance_db", cfg.oracle.tolerance_db},
                 {"points", points}};
  j["optimizer"] = {{"fm_lo_hz", cfg.optimizer.bounds.fm_lo_hz},
                    {"fm_hi_hz", cfg.optimizer.bounds.fm_hi_hz},
                    {"delta_m_lo", cfg.optimizer.bounds.dm_lo},
                    {"delta_m_hi", cfg.optimizer.bounds.dm_hi},
                    {"delta_phi_lo_deg", rad_to_deg(cfg.optimizer.bounds.dphi_lo_rad)},
                    {"delta_phi_hi_deg", rad_to_deg(cfg.optimizer.bounds.dphi_hi_rad)},
                    {"il_guard_db", cfg.optimizer.il_guard_db},
                    {"penalty_weight", cfg.optimizer.penalty_weight},
                    {"iso_cap_db", cfg.optimizer.iso_cap_db},
                    {"grid", cfg.optimizer.grid},
                    {"max_iterations", cfg.optimizer.max_iterations},
                    {"spread_tolerance", cfg.optimizer.spread_tolerance},
                    {"seed", cfg.optimizer.seed}};
  j["system"] = {{"fbw", cfg.system.fbw},
                 {"q_u", cfg.system.q_u},
                 {"c_res_farad", cfg.system.c_res_farad},
                 {"table_lo_hz", cfg.system.table_lo_hz},
                 {"table_hi_hz", cfg.system.table_hi_hz},
                 {"table_points", cfg.system.table_points}};
  return j.dump();
}

}  // namespace tmfa
