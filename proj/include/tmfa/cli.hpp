#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tmfa/config.hpp"
#include "tmfa/io.hpp"
#include "tmfa/svg.hpp"

namespace tmfa {

// ---------------------------------------------------------------------------
// Subcommand bodies behind the tmfa executable. Exit codes: 0 success,
// 2 validation failure, 3 tuner failure, 4 solver failure, 5 optimizer
// below the usefulness floor, 6 oracle tolerance breach, 1 anything else.
// Commands write complete files or none.
// ---------------------------------------------------------------------------

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int validation = 2;
inline constexpr int tuner = 3;
inline constexpr int solver = 4;
inline constexpr int optimize_floor = 5;
inline constexpr int oracle_breach = 6;
}  // namespace exit_code

namespace cli_detail {

inline std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
  return std::filesystem::path(cfg.output_dir) / name;
}

/// Modulation actually applied by a command: the config block, optionally
/// forced off by --static or asserted on by --modulated.
inline ModulationSpec effective_modulation(const RunConfig& cfg, std::optional<bool> want_mod) {
  if (want_mod.has_value() && !*want_mod) return ModulationSpec::off(cfg.filter.order);
  ModulationSpec m = cfg.modulation_spec();
  if (want_mod.has_value() && *want_mod && !m.enabled())
    throw ConfigError("cli: --modulated requires modulation.delta_m > 0");
  return m;
}

struct TunedFilter {
  ModulatedLadder ladder;
  TunerReport report;
};

/// Standalone filter with both ports at z0: synthesis plus equi-ripple
/// restoration, the front half of every filter-level command.
inline TunedFilter synth_filter(const RunConfig& cfg) {
  const PrototypeValues proto = chebyshev_prototype(cfg.filter);
  const ModulatedLadder start = realize_ladder(proto, cfg.filter, cfg.c_res_farad, cfg.filter_q_u);
  auto [ladder, report] = tune_equiripple(start, cfg.filter, {});
  return {std::move(ladder), report};
}

inline std::string join_nums(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_num(v[i]);
  return s;
}

inline void write_cuts(const RunConfig& cfg, const PatternCuts& cuts, const std::string& header) {
  auto one_plane = [&](const std::vector<CutPoint>& plane, const std::string& stem,
                       const std::string& title) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : plane)
      rows.push_back({fmt_num(c.angle_deg), fmt_num(c.tx_db), fmt_num(c.rx_db)});
    write_atomic(out_path(cfg, stem + ".csv"),
                 csv_document(header, {"angle_deg", "tx_db", "rx_db"}, rows));
    if (cfg.svg) {
      SvgSeries tx{"tx_db", "#1f6feb", {}, {}}, rx{"rx_db", "#d1242f", {}, {}};
      for (const auto& c : plane) {
        tx.x.push_back(c.angle_deg);
        tx.y.push_back(c.tx_db);
        rx.x.push_back(c.angle_deg);
        rx.y.push_back(c.rx_db);
      }
      write_atomic(out_path(cfg, stem + ".svg"), svg_polar(title, {tx, rx}));
    }
  };
  one_plane(cuts.e_plane, "cuts_e_plane", "E-plane cut");
  one_plane(cuts.h_plane, "cuts_h_plane", "H-plane cut");
}

}  // namespace cli_detail

/// Synthesizes and tunes the standalone filter, then records the element
/// values and the tuner verdict.
inline int cmd_synth(const RunConfig& cfg) {
  const auto tf = cli_detail::synth_filter(cfg);
  if (!tf.report.met_target) {
    std::cerr << "error: tuner: best return loss " << fmt_num(tf.report.achieved_rl_db)
              << " dB misses the " << fmt_num(tf.report.target_rl_db) << " dB target\n";
    return exit_code::tuner;
  }
  const auto& lad = tf.ladder;
  std::string body = file_header("synth", resolved_config(cfg));
  body += "order = " + std::to_string(lad.order()) + "\n";
  body += "f0_hz = " + fmt_num(lad.f0_hz) + "\n";
  body += "c0_farad = " + cli_detail::join_nums(lad.c0_farad) + "\n";
  body += "l_henry = " + cli_detail::join_nums(lad.l_henry) + "\n";
  body += "g_loss_siemens = " + cli_detail::join_nums(lad.g_loss_siemens) + "\n";
  body += "c_couple_farad = " + cli_detail::join_nums(lad.c_couple_farad) + "\n";
  body += "c_ext_in_farad = " + fmt_num(lad.c_ext_in_farad) + "\n";
  body += "c_ext_out_farad = " + fmt_num(lad.c_ext_out_farad) + "\n";
  body += "achieved_rl_db = " + fmt_num(tf.report.achieved_rl_db) + "\n";
  body += "reflection_zero_count = " + std::to_string(tf.report.reflection_zero_count) + "\n";
  body += "iterations = " + std::to_string(tf.report.iterations) + "\n";
  write_atomic(cli_detail::out_path(cfg, "ladder.txt"), body);
  return exit_code::ok;
}

/// Frequency sweep of the standalone filter, static or modulated.
inline int cmd_sweep(const RunConfig& cfg, std::optional<bool> want_mod) {
  auto tf = cli_detail::synth_filter(cfg);
  tf.ladder.modulation = cli_detail::effective_modulation(cfg, want_mod);
  const bool modulated = tf.ladder.modulation.enabled();
  const HarmonicBasis basis{modulated ? cfg.solver.k_max : 1};

  const auto points = sweep(tf.ladder, basis, cfg.sweep_grid(), cfg.solver.residual_tol);
  for (const auto& pt : points)
    if (!pt.ok()) {
      std::cerr << "error: solver: f = " << fmt_num(pt.f_hz) << " Hz: " << pt.error << "\n";
      return exit_code::solver;
    }

  std::vector<std::string> cols{"f_hz", "s11_db", "s21_db", "s12_db", "iso_db"};
  const bool harmonics = cfg.sweep.harmonics && modulated;
  if (harmonics)
    for (int k = -basis.k_max; k <= basis.k_max; ++k) {
      char name[32];
      std::snprintf(name, sizeof(name), "h%+d_fwd_db", k);
      cols.emplace_back(name);
      std::snprintf(name, sizeof(name), "h%+d_rev_db", k);
      cols.emplace_back(name);
    }

  std::vector<std::vector<std::string>> rows;
  for (const auto& pt : points) {
    const auto& r = *pt.response;
    std::vector<std::string> row{fmt_num(pt.f_hz), fmt_num(r.s11_db()), fmt_num(r.s21_db()),
                                 fmt_num(r.s12_db()), fmt_num(r.isolation_db())};
    if (harmonics)
      for (int k = -basis.k_max; k <= basis.k_max; ++k) {
        const auto i = static_cast<size_t>(k + basis.k_max);
        row.push_back(fmt_num(db20(r.forward[i])));
        row.push_back(fmt_num(db20(r.reverse[i])));
      }
    rows.push_back(std::move(row));
  }
  const std::string header = file_header("sweep", resolved_config(cfg));
  write_atomic(cli_detail::out_path(cfg, "sweep.csv"), csv_document(header, cols, rows));

  if (cfg.svg) {
    SvgSeries s11{"s11_db", "#57606a", {}, {}}, s21{"s21_db", "#1f6feb", {}, {}},
        s12{"s12_db", "#d1242f", {}, {}};
    for (const auto& pt : points) {
      const auto& r = *pt.response;
      s11.x.push_back(pt.f_hz);
      s11.y.push_back(r.s11_db());
      s21.x.push_back(pt.f_hz);
      s21.y.push_back(r.s21_db());
      s12.x.push_back(pt.f_hz);
      s12.y.push_back(r.s12_db());
    }
    write_atomic(cli_detail::out_path(cfg, "sweep.svg"),
                 svg_chart(modulated ? "modulated sweep" : "static sweep", "f_hz", "dB",
                           {s11, s21, s12}));
  }
  return exit_code::ok;
}

/// Full-sphere radiator pattern at f0 plus the composed device's principal
/// cuts and the driving-point impedance table.
inline int cmd_pattern(const RunConfig& cfg, std::optional<bool> want_mod) {
  const std::string header = file_header("pattern", resolved_config(cfg));

  const RadiationPattern pat = pattern(cfg.antenna, cfg.filter.f0_hz);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(pat.theta_deg.size() * pat.phi_deg.size());
  for (size_t it = 0; it < pat.theta_deg.size(); ++it)
    for (size_t ip = 0; ip < pat.phi_deg.size(); ++ip)
      rows.push_back(
          {fmt_num(pat.theta_deg[it]), fmt_num(pat.phi_deg[ip]), fmt_num(pat.at(it, ip))});
  write_atomic(cli_detail::out_path(cfg, "pattern.csv"),
               csv_document(header, {"theta_deg", "phi_deg", "d_dbi"}, rows));

  FilteringAntennaModel model(cfg.system_options());
  model.set_modulation(cli_detail::effective_modulation(cfg, want_mod));
  cli_detail::write_cuts(cfg, model.pattern_cuts(model.f0_hz()), header);

  std::vector<std::vector<std::string>> zrows;
  for (const auto& [f, z] : model.antenna().samples)
    zrows.push_back({fmt_num(f), fmt_num(z.real()), fmt_num(z.imag())});
  write_atomic(cli_detail::out_path(cfg, "impedance.csv"),
               csv_document(header, {"f_hz", "re_z_ohm", "im_z_ohm"}, zrows));
  return exit_code::ok;
}

/// Boresight gain sweep of the composed device: reference antenna, static
/// filter, and both directions under modulation.
inline int cmd_boresight(const RunConfig& cfg, std::optional<bool> want_mod) {
  FilteringAntennaModel model(cfg.system_options());
  model.set_modulation(cli_detail::effective_modulation(cfg, want_mod));
  const DirectionalGainReport rep = model.boresight_sweep(cfg.sweep_grid());

  std::vector<std::vector<std::string>> rows;
  for (const auto& p : rep.sweep)
    rows.push_back({fmt_num(p.f_hz), fmt_num(p.ref_db), fmt_num(p.static_tx_db),
                    fmt_num(p.mod_tx_db), fmt_num(p.mod_rx_db), fmt_num(p.iso_db)});
  const std::string header = file_header("boresight", resolved_config(cfg));
  write_atomic(
      cli_detail::out_path(cfg, "boresight.csv"),
      csv_document(header, {"f_hz", "ref_db", "static_tx_db", "mod_tx_db", "mod_rx_db", "iso_db"},
                   rows));
  cli_detail::write_cuts(cfg, rep.cuts, header);

  if (cfg.svg) {
    SvgSeries ref{"ref_db", "#57606a", {}, {}}, st{"static_tx_db", "#1f6feb", {}, {}},
        tx{"mod_tx_db", "#2da44e", {}, {}}, rx{"mod_rx_db", "#d1242f", {}, {}};
    for (const auto& p : rep.sweep) {
      ref.x.push_back(p.f_hz);
      ref.y.push_back(p.ref_db);
      st.x.push_back(p.f_hz);
      st.y.push_back(p.static_tx_db);
      tx.x.push_back(p.f_hz);
      tx.y.push_back(p.mod_tx_db);
      rx.x.push_back(p.f_hz);
      rx.y.push_back(p.mod_rx_db);
    }
    write_atomic(cli_detail::out_path(cfg, "boresight.svg"),
                 svg_chart("boresight gain", "f_hz", "dB", {ref, st, tx, rx}));
  }
  return exit_code::ok;
}

/// Modulation search on the composed device's tuned ladder. Writes the
/// report, the improvement trace, and a config fragment holding the
/// optimum for downstream commands.
inline int cmd_optimize(const RunConfig& cfg) {
  FilteringAntennaModel model(cfg.system_options());
  const OptimizationReport rep =
      optimize_modulation(model.ladder(), model.f0_hz(), cfg.optimizer_options());

  if (rep.isolation_db < 10.0) {
    std::cerr << "error: optimize: best isolation " << fmt_num(rep.isolation_db)
              << " dB is below the 10 dB usefulness floor\n";
    return exit_code::optimize_floor;
  }

  const std::string header = file_header("optimize", resolved_config(cfg));
  std::string body = header;
  body += "fm_hz = " + fmt_num(rep.fm_hz) + "\n";
  body += "delta_m = " + fmt_num(rep.delta_m) + "\n";
  body += "delta_phi_deg = " + fmt_num(rad_to_deg(rep.delta_phi_rad)) + "\n";
  body += "isolation_db = " + fmt_num(rep.isolation_db) + "\n";
  body += "il_static_db = " + fmt_num(rep.il_static_db) + "\n";
  body += "il_mod_db = " + fmt_num(rep.il_mod_db) + "\n";
  body += "il_penalty_db = " + fmt_num(rep.il_penalty_db) + "\n";
  body += "objective = " + fmt_num(rep.objective) + "\n";
  body += "grid_evaluations = " + std::to_string(rep.grid_evaluations) + "\n";
  body += "simplex_iterations = " + std::to_string(rep.simplex_iterations) + "\n";
  body += std::string("converged = ") + (rep.converged ? "true" : "false") + "\n";
  write_atomic(cli_detail::out_path(cfg, "optimize_report.txt"), body);

  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < rep.trace.size(); ++i) {
    const auto& t = rep.trace[i];
    rows.push_back({std::to_string(i), fmt_num(t.fm_hz), fmt_num(t.delta_m),
                    fmt_num(rad_to_deg(t.delta_phi_rad)), fmt_num(t.objective)});
  }
  write_atomic(cli_detail::out_path(cfg, "optimize_trace.csv"),
               csv_document(header, {"step", "fm_hz", "delta_m", "delta_phi_deg", "objective"},
                            rows));

  std::string fragment = "// tmfa optimize\n// config: " + resolved_config(cfg) + "\n";
  fragment += "{ \"modulation\": { \"fm_hz\": " + fmt_num(rep.fm_hz) +
              ", \"delta_m\": " + fmt_num(rep.delta_m) +
              ", \"delta_phi_deg\": " + fmt_num(rad_to_deg(rep.delta_phi_rad)) + " } }\n";
  write_atomic(cli_detail::out_path(cfg, "modulation_opt.json"), fragment);
  return exit_code::ok;
}

/// Harmonic-balance transmission against brute-force transient integration
/// at commensurate probes; the gate of the whole frequency-domain engine.
inline int cmd_oracle_check(const RunConfig& cfg, std::optional<bool> want_mod) {
  auto tf = cli_detail::synth_filter(cfg);
  const ModulationSpec mod = cli_detail::effective_modulation(cfg, want_mod);
  const TdOptions td = cfg.oracle_options();

  std::vector<std::vector<std::string>> rows;
  bool breach = false;
  for (const auto& [f, fm] : cfg.oracle_points()) {
    ModulatedLadder lad = tf.ladder;
    lad.modulation = mod;
    if (lad.modulation.enabled()) lad.modulation.fm_hz = fm;
    const HarmonicBasis basis{lad.modulation.enabled() ? cfg.solver.k_max : 1};

    const HarmonicResponse hb = sparams(lad, basis, f, cfg.solver.residual_tol);
    const OracleResponse ref = oracle_sparams(lad, f, fm, td);
    const double d21 = hb.s21_db() - ref.s21_db();
    const double d12 = hb.s12_db() - ref.s12_db();
    if (std::abs(d21) > cfg.oracle.tolerance_db || std::abs(d12) > cfg.oracle.tolerance_db)
      breach = true;

    rows.push_back({fmt_num(f), std::to_string(std::lround(f / fm)), fmt_num(hb.s21_db()),
                    fmt_num(hb.s12_db()), fmt_num(ref.s21_db()), fmt_num(ref.s12_db()),
                    fmt_num(d21), fmt_num(d12)});
  }

  const std::string header = file_header("oracle-check", resolved_config(cfg));
  write_atomic(cli_detail::out_path(cfg, "oracle_check.csv"),
               csv_document(header,
                            {"f_hz", "carrier_per_mod", "hb_s21_db", "hb_s12_db", "td_s21_db",
                             "td_s12_db", "delta_s21_db", "delta_s12_db"},
                            rows));
  if (breach) {
    std::cerr << "error: oracle: frequency-domain and time-domain transmission disagree beyond "
              << fmt_num(cfg.oracle.tolerance_db) << " dB\n";
    return exit_code::oracle_breach;
  }
  return exit_code::ok;
}

/// Runs one subcommand and folds every failure into the exit-code contract.
inline int run_command(const std::string& name, const RunConfig& cfg,
                       std::optional<bool> want_mod) {
  try {
    if (name == "synth") return cmd_synth(cfg);
    if (name == "sweep") return cmd_sweep(cfg, want_mod);
    if (name == "pattern") return cmd_pattern(cfg, want_mod);
    if (name == "boresight") return cmd_boresight(cfg, want_mod);
    if (name == "optimize") return cmd_optimize(cfg);
    if (name == "oracle-check") return cmd_oracle_check(cfg, want_mod);
    std::cerr << "error: cli: unknown command '" << name << "'\n";
    return exit_code::validation;
  } catch (const ConfigError& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return exit_code::validation;
  } catch (const std::domain_error& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return exit_code::validation;
  } catch (const IoError& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return exit_code::failure;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: solver: " << e.what() << "\n";
    return exit_code::solver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::failure;
  }
}

}  // namespace tmfa
