#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tmfa/cli.hpp"

// ---------------------------------------------------------------------------
// Acceptance gate: every release criterion checked end to end at its stated
// tolerance, one PASS/FAIL line each. Exits nonzero if any line fails.
// ---------------------------------------------------------------------------

namespace {

using namespace tmfa;
using Verdict = std::pair<bool, std::string>;

int g_failures = 0;

/// Runs one criterion; a positive limit_s makes the stated runtime bound
/// part of the verdict.
void criterion(int number, const char* label, double limit_s,
               const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("threw: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0.0 && seconds > limit_s) {
    v.first = false;
    v.second += "; over the " + std::to_string(limit_s) + " s budget";
  }
  if (!v.first) ++g_failures;
  std::printf("%s %2d %s: %s (%.2f s)\n", v.first ? "PASS" : "FAIL", number, label,
              v.second.c_str(), seconds);
  std::fflush(stdout);
}

std::string num(double v) { return fmt_num(v); }

// --- shared fixtures -------------------------------------------------------

const cli_detail::TunedFilter& tuned50() {
  static const cli_detail::TunedFilter tf = cli_detail::synth_filter(RunConfig{});
  return tf;
}

const FilteringAntennaModel& system_model() {
  static const FilteringAntennaModel model{};
  return model;
}

const OptimizationReport& optimum() {
  static const OptimizationReport rep =
      optimize_modulation(system_model().ladder(), system_model().f0_hz(), {});
  return rep;
}

ModulationSpec optimum_modulation() {
  const auto& r = optimum();
  return ModulationSpec::progressive(3, r.fm_hz, r.delta_m, r.delta_phi_rad);
}

// --- small analysis helpers ------------------------------------------------

/// Interpolated edges of the band where y >= level; y must rise through the
/// level once and fall through it once.
std::pair<double, double> band_edges(const std::vector<double>& f, const std::vector<double>& y,
                                     double level) {
  double lo = 0.0, hi = 0.0;
  for (size_t i = 1; i < f.size(); ++i) {
    const double t = (level - y[i - 1]) / (y[i] - y[i - 1]);
    if (y[i - 1] < level && y[i] >= level && lo == 0.0) lo = f[i - 1] + t * (f[i] - f[i - 1]);
    if (y[i - 1] >= level && y[i] < level) hi = f[i - 1] + t * (f[i] - f[i - 1]);
  }
  return {lo, hi};
}

/// Fixed-grid composite-Simpson dipole impedance, written against the same
/// closed form as the library but with independent arithmetic throughout.
cplx oracle_dipole_z(double half_m, double radius_m, double f_hz) {
  const double k = two_pi * f_hz / c0;
  const double h = half_m;
  const double s = std::sin(k * h);
  auto kernel = [&](double z) {
    const double r1 = std::hypot(radius_m, h - z);
    const double r2 = std::hypot(radius_m, h + z);
    const double r = std::hypot(radius_m, z);
    const cplx e1 = std::exp(cplx(0.0, -k * r1)) / r1;
    const cplx e2 = std::exp(cplx(0.0, -k * r2)) / r2;
    const cplx e0 = std::exp(cplx(0.0, -k * r)) / r;
    return (e1 + e2 - 2.0 * std::cos(k * h) * e0) * std::sin(k * (h - z));
  };
  const int n = 40000;
  const double dz = h / n;
  cplx acc = kernel(0.0) + kernel(h);
  for (int i = 1; i < n; ++i) acc += kernel(i * dz) * ((i % 2 != 0) ? 4.0 : 2.0);
  const cplx integral = 2.0 * (acc * dz / 3.0);
  return j1i * eta0 / (4.0 * pi * s * s) * integral;
}

// --- criteria ---------------------------------------------------------------

Verdict static_equiripple() {
  const auto& tf = tuned50();
  const bool tuned_ok = tf.report.achieved_rl_db >= 13.0 && tf.report.reflection_zero_count == 3;

  const auto grid = frequency_grid(2.28e9, 2.52e9, 201);
  const auto pts = sweep(tf.ladder, HarmonicBasis{1}, grid);
  std::vector<double> f, neg_s11;
  for (const auto& p : pts) {
    if (!p.ok()) return {false, "sweep failed at " + num(p.f_hz)};
    f.push_back(p.f_hz);
    neg_s11.push_back(-p.response->s11_db());
  }
  const auto [lo, hi] = band_edges(f, neg_s11, 10.0);
  const double fbw = (hi - lo) / 2.4e9;
  const bool fbw_ok = lo > 0.0 && hi > lo && fbw >= 0.036 && fbw <= 0.048;

  return {tuned_ok && fbw_ok, "RL=" + num(tf.report.achieved_rl_db) +
                                  " dB, zeros=" + std::to_string(tf.report.reflection_zero_count) +
                                  ", 10-dB FBW=" + num(100.0 * fbw) + "%"};
}

Verdict reciprocity_toggle() {
  const auto& lad = tuned50().ladder;
  double worst = 0.0;
  for (const auto& p : sweep(lad, HarmonicBasis{1}, frequency_grid(2.28e9, 2.52e9, 201))) {
    if (!p.ok()) return {false, "sweep failed at " + num(p.f_hz)};
    worst = std::max(worst, std::abs(p.response->s21() - p.response->s12()));
  }

  const auto modded = with_modulation(lad, 75e6, 0.09, deg_to_rad(56.0));
  const double iso = sparams(modded, HarmonicBasis{5}, 2.4e9).isolation_db();

  return {worst <= 1e-12 && std::abs(iso) >= 3.0,
          "static max|S21-S12|=" + num(worst) + ", modulated iso(f0)=" + num(iso) + " dB"};
}

Verdict optimized_isolation() {
  const auto& rep = optimum();
  const bool ok = rep.isolation_db >= 20.0 && rep.il_mod_db <= rep.il_static_db + 1.0;
  return {ok, "iso=" + num(rep.isolation_db) + " dB, IL " + num(rep.il_static_db) + " -> " +
                  num(rep.il_mod_db) + " dB (guard +1.0)"};
}

Verdict oracle_gate() {
  const auto& lad = tuned50().ladder;
  double worst = 0.0;
  bool saw_ratio_32_f0 = false;
  for (const auto& pt : oracle_point_set()) {
    const auto modded = with_modulation(lad, pt.fm_hz, 0.09, deg_to_rad(56.0));
    const auto hb = sparams(modded, HarmonicBasis{5}, pt.f_hz());
    const auto td = oracle_sparams(modded, pt.f_hz(), pt.fm_hz);
    worst = std::max({worst, std::abs(hb.s21_db() - td.s21_db()),
                      std::abs(hb.s12_db() - td.s12_db())});
    if (pt.carrier_per_mod == 32 && pt.f_hz() == 2.4e9) saw_ratio_32_f0 = true;
  }
  return {worst <= 0.05 && saw_ratio_32_f0,
          "worst |HB-TD|=" + num(worst) + " dB over 5 commensurate points"};
}

Verdict mirror_phase_duality() {
  FilterSpec spec;
  const auto base = realize_ladder(chebyshev_prototype(spec), spec, 0.86e-12, 200.0);
  const auto pos = with_modulation(base, 75e6, 0.09, deg_to_rad(56.0));
  const auto neg = with_modulation(base, 75e6, 0.09, -deg_to_rad(56.0));
  const auto grid = frequency_grid(2.28e9, 2.52e9, 201);
  const auto rp = sweep(pos, HarmonicBasis{5}, grid);
  const auto rn = sweep(neg, HarmonicBasis{5}, grid);
  double worst = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!rp[i].ok() || !rn[i].ok()) return {false, "sweep failed at " + num(grid[i])};
    worst = std::max(worst, std::abs(std::abs(rp[i].response->s21()) -
                                     std::abs(rn[i].response->s12())));
    worst = std::max(worst, std::abs(std::abs(rp[i].response->s12()) -
                                     std::abs(rn[i].response->s21())));
  }
  return {worst <= 1e-10, "max||S21(+dphi)|-|S12(-dphi)||=" + num(worst) + " over 201 points"};
}

Verdict truncation_convergence() {
  ModulatedLadder lad = system_model().ladder();
  lad.modulation = optimum_modulation();
  const auto r5 = sparams(lad, HarmonicBasis{5}, 2.4e9);
  const auto r7 = sparams(lad, HarmonicBasis{7}, 2.4e9);
  const double d21 = std::abs(r5.s21_db() - r7.s21_db());
  const double d12 = std::abs(r5.s12_db() - r7.s12_db());
  const double d11 = std::abs(r5.s11_db() - r7.s11_db());
  const double worst = std::max({d21, d12, d11});
  return {worst <= 0.01, "k_max 5->7 drift=" + num(worst) + " dB at the optimized point"};
}

Verdict antenna_sanity() {
  const double f = 2.4e9;
  const double lambda = c0 / f;
  const cplx target{73.0, 42.0};
  const cplx z_lib = self_impedance(lambda / 4.0, lambda / 10000.0, f);
  const cplx z_ref = oracle_dipole_z(lambda / 4.0, lambda / 10000.0, f);
  const bool z_ok = std::abs(z_lib - target) <= 0.05 * std::abs(target) &&
                    std::abs(z_ref - target) <= 0.05 * std::abs(target) &&
                    std::abs(z_lib - z_ref) <= 1e-3 * std::abs(z_ref);

  YagiGeometry dipole;
  dipole.elements = {{lambda / 4.0, lambda / 10000.0, 0.0}};
  dipole.driven_index = 0;
  const FarField ff(dipole, f);
  const double d_dipole = ff.directivity_dbi(90.0, 0.0);
  const bool dipole_ok = std::abs(d_dipole - 2.15) <= 0.1;

  const RadiationPattern pat = pattern(default_geometry(), f);
  const bool yagi_ok = pat.peak_dbi >= 4.5 && pat.peak_dbi <= 7.5 &&
                       std::abs(pat.peak_theta_deg - 90.0) <= 1.0 && pat.peak_phi_deg == 0.0;
  const double norm = pat.normalization();
  const bool norm_ok = std::abs(norm - 1.0) <= 1e-3;

  return {z_ok && dipole_ok && yagi_ok && norm_ok,
          "dipole Z=" + num(z_lib.real()) + "+j" + num(z_lib.imag()) + " (oracle " +
              num(z_ref.real()) + "+j" + num(z_ref.imag()) + "), D=" + num(d_dipole) +
              " dBi; directors peak=" + num(pat.peak_dbi) + " dBi at theta=" +
              num(pat.peak_theta_deg) + ", norm=" + num(norm)};
}

Verdict system_curves() {
  FilteringAntennaModel model = system_model();
  model.set_modulation(optimum_modulation());
  const auto grid = frequency_grid(2.30e9, 2.50e9, 201);
  const auto rep = model.boresight_sweep(grid);

  std::vector<double> f, ref, st, mt, iso;
  for (const auto& p : rep.sweep) {
    f.push_back(p.f_hz);
    ref.push_back(p.ref_db);
    st.push_back(p.static_tx_db);
    mt.push_back(p.mod_tx_db);
    iso.push_back(p.iso_db);
  }
  const double ref_peak = *std::max_element(ref.begin(), ref.end());
  const double st_peak = *std::max_element(st.begin(), st.end());
  const double mt_peak = *std::max_element(mt.begin(), mt.end());

  const double drop = st_peak - ref_peak;
  const bool drop_ok = drop >= -4.0 && drop <= -2.0;

  const auto [slo, shi] = band_edges(f, st, st_peak - 3.0);
  const double sfbw = (shi - slo) / 2.4e9;
  const bool sfbw_ok = slo > 0.0 && shi > slo && sfbw >= 0.025 && sfbw <= 0.040;

  const double rej_lo = st_peak - model.tx_gain_db(0.9 * 2.4e9, 90.0, 0.0, false);
  const double rej_hi = st_peak - model.tx_gain_db(1.1 * 2.4e9, 90.0, 0.0, false);
  const bool oob_ok = rej_lo >= 11.0 && rej_hi >= 11.0;

  const double depth = st_peak - mt_peak;
  const bool depth_ok = depth >= 0.2 && depth <= 1.5;

  const auto [mlo, mhi] = band_edges(f, mt, mt_peak - 3.0);
  double min_iso = 1e30;
  for (size_t i = 0; i < f.size(); ++i)
    if (f[i] >= mlo && f[i] <= mhi) min_iso = std::min(min_iso, iso[i]);
  for (double edge : {mlo, mhi})
    min_iso = std::min(min_iso, model.tx_gain_db(edge, 90.0, 0.0) - model.rx_gain_db(edge, 90.0, 0.0));
  const bool iso_ok = mlo > 0.0 && mhi > mlo && min_iso >= 5.0;

  return {drop_ok && sfbw_ok && oob_ok && depth_ok && iso_ok,
          "drop=" + num(drop) + " dB, static 3-dB FBW=" + num(100.0 * sfbw) + "%, OOB rej=" +
              num(std::min(rej_lo, rej_hi)) + " dB, mod depth=" + num(depth) +
              " dB, min in-band iso=" + num(min_iso) + " dB"};
}

Verdict angle_insensitive_isolation() {
  FilteringAntennaModel model = system_model();
  model.set_modulation(optimum_modulation());
  const auto cuts = model.pattern_cuts(model.f0_hz());
  double lo = 1e30, hi = -1e30;
  for (const auto* plane : {&cuts.e_plane, &cuts.h_plane})
    for (const auto& c : *plane) {
      const double d = c.tx_db - c.rx_db;
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  const double spread = hi - lo;
  return {spread <= 1e-9, "TX-RX spread over 720 cut angles=" + num(spread) + " dB"};
}

Verdict performance_determinism() {
  ModulatedLadder lad = system_model().ladder();
  lad.modulation = optimum_modulation();
  const auto grid = frequency_grid(2.28e9, 2.52e9, 201);

  const auto t0 = std::chrono::steady_clock::now();
  const auto first = sweep(lad, HarmonicBasis{5}, grid);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto second = sweep(lad, HarmonicBasis{5}, grid);
  auto render = [](const std::vector<SweepPoint>& pts) {
    std::string s;
    for (const auto& p : pts) {
      if (!p.ok()) return std::string{};
      s += num(p.f_hz) + "," + num(p.response->s11_db()) + "," + num(p.response->s21_db()) + "," +
           num(p.response->s12_db()) + "," + num(p.response->isolation_db()) + "\n";
    }
    return s;
  };
  const std::string a = render(first), b = render(second);
  const bool ok = seconds < 1.0 && !a.empty() && a == b;
  return {ok, "201-point modulated sweep in " + num(seconds) + " s, repeated run " +
                  (a == b && !a.empty() ? "byte-identical" : "DIFFERS")};
}

}  // namespace

int main() {
  criterion(1, "static equi-ripple", 5.0, static_equiripple);
  criterion(2, "reciprocity toggle", 1.0, reciprocity_toggle);
  criterion(3, "optimized isolation", 60.0, optimized_isolation);
  criterion(4, "time-domain oracle gate", 120.0, oracle_gate);
  criterion(5, "mirror-phase duality", 5.0, mirror_phase_duality);
  criterion(6, "truncation convergence", 0.0, truncation_convergence);
  criterion(7, "antenna sanity", 0.0, antenna_sanity);
  criterion(8, "system gain curves", 0.0, system_curves);
  criterion(9, "angle-insensitive isolation", 0.0, angle_insensitive_isolation);
  criterion(10, "performance and determinism", 0.0, performance_determinism);

  std::printf("acceptance: %d/10 passed\n", 10 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
