#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "tmfa/harmonic_balance.hpp"
#include "tmfa/nelder_mead.hpp"
#include "tmfa/synthesis.hpp"

namespace tmfa {

struct TunerOptions {
  double rl_target_db = 0.0;   ///< 0 means: use spec.rl_db
  double ripple_margin_db = 0.5;  ///< profile aims this far below the target ripple line
  int band_points = 81;        ///< in-band grid for the return-loss guard
  int max_iterations = 800;
  double spread_tolerance = 1e-14;
  double initial_step = 0.03;  ///< log-space simplex edge
};

struct TunerReport {
  double achieved_rl_db = 0.0;  ///< worst in-band return loss after tuning
  int reflection_zero_count = 0;
  bool met_target = false;
  int iterations = 0;
  double target_rl_db = 0.0;
};

namespace tuner_detail {

/// Symmetric ladders are tuned in the mirror-reduced coordinate set so the
/// result stays palindromic to the bit; asymmetric inputs get the full set.
struct ParamMap {
  bool symmetric = false;
  int order = 0;

  std::vector<double> pack(const ModulatedLadder& l) const {
    std::vector<double> u;
    const int n = order;
    if (symmetric) {
      for (int i = 0; i < (n + 1) / 2; ++i) u.push_back(std::log(l.c0_farad[static_cast<size_t>(i)]));
      for (int i = 0; i < n / 2; ++i) u.push_back(std::log(l.c_couple_farad[static_cast<size_t>(i)]));
      u.push_back(std::log(l.c_ext_in_farad));
    } else {
      for (double c : l.c0_farad) u.push_back(std::log(c));
      for (double c : l.c_couple_farad) u.push_back(std::log(c));
      u.push_back(std::log(l.c_ext_in_farad));
      u.push_back(std::log(l.c_ext_out_farad));
    }
    return u;
  }

  void unpack(const std::vector<double>& u, ModulatedLadder& l) const {
    const int n = order;
    size_t at = 0;
    if (symmetric) {
      for (int i = 0; i < (n + 1) / 2; ++i) {
        double c = std::exp(u[at++]);
        l.c0_farad[static_cast<size_t>(i)] = c;
        l.c0_farad[static_cast<size_t>(n - 1 - i)] = c;
      }
      for (int i = 0; i < n / 2; ++i) {
        double c = std::exp(u[at++]);
        l.c_couple_farad[static_cast<size_t>(i)] = c;
        l.c_couple_farad[static_cast<size_t>(n - 2 - i)] = c;
      }
      double ce = std::exp(u[at++]);
      l.c_ext_in_farad = ce;
      l.c_ext_out_farad = ce;
    } else {
      for (int i = 0; i < n; ++i) l.c0_farad[static_cast<size_t>(i)] = std::exp(u[at++]);
      for (int i = 0; i < n - 1; ++i) l.c_couple_farad[static_cast<size_t>(i)] = std::exp(u[at++]);
      l.c_ext_in_farad = std::exp(u[at++]);
      l.c_ext_out_farad = std::exp(u[at++]);
    }
  }
};

}  // namespace tuner_detail

/// Counts strict local minima of |S11| on a dense in-band grid; for an
/// equal-ripple response of order n this is exactly n.
inline int reflection_zero_count(const ModulatedLadder& ladder, const FilterSpec& spec,
                                 int points = 201) {
  HarmonicBasis basis{1};
  auto grid = frequency_grid(spec.band_lo_hz(), spec.band_hi_hz(), points);
  std::vector<double> mag(grid.size());
  parallel_for(static_cast<int>(grid.size()), [&](int i) {
    mag[static_cast<size_t>(i)] =
        std::abs(input_reflection(ladder, basis, grid[static_cast<size_t>(i)]));
  });
  int count = 0;
  for (size_t i = 1; i + 1 < mag.size(); ++i)
    if (mag[i] < mag[i - 1] && mag[i] <= mag[i + 1]) ++count;
  return count;
}

/// Polishes the ladder's capacitors (log-space) until the worst in-band
/// |S11| is as low as the topology allows over the spec band, which drives
/// the response toward the equal-ripple shape. Modulation is ignored while
/// tuning and carried over to the returned ladder untouched.
///
/// Never throws on a missed target: the report carries the best-achieved
/// return loss and met_target reflects it.
inline std::pair<ModulatedLadder, TunerReport> tune_equiripple(const ModulatedLadder& start,
                                                               const FilterSpec& spec,
                                                               const TunerOptions& opt = {}) {
  start.validate();
  spec.validate();
  const double target = opt.rl_target_db > 0.0 ? opt.rl_target_db : spec.rl_db;

  ModulatedLadder work = without_modulation(start);
  tuner_detail::ParamMap map;
  map.symmetric = work.mirror_symmetric();
  map.order = work.order();

  const auto grid = frequency_grid(spec.band_lo_hz(), spec.band_hi_hz(), opt.band_points);
  HarmonicBasis basis{1};

  // Collocation frequencies of the equal-ripple shape: |S11| should sit on
  // the ripple line at the Chebyshev extrema and vanish at its zeros. This
  // pins center, bandwidth and ripple simultaneously; a hinge on the worst
  // in-band |S11| keeps the return-loss target honest under loss.
  const int n = spec.order;
  std::vector<double> f_extrema, f_zeros;
  for (int i = 0; i <= n; ++i)
    f_extrema.push_back(spec.f0_hz * (1.0 + 0.5 * spec.fbw * std::cos(i * pi / n)));
  for (int i = 1; i <= n; ++i)
    f_zeros.push_back(spec.f0_hz * (1.0 + 0.5 * spec.fbw * std::cos((2.0 * i - 1.0) * pi / (2.0 * n))));
  const double ripple_mag = undb20(-(target + opt.ripple_margin_db));
  const double guard_mag = undb20(-target);

  auto objective = [&](const std::vector<double>& u) {
    ModulatedLadder trial = work;
    map.unpack(u, trial);
    double j = 0.0;
    for (double f : f_extrema) {
      double d = std::abs(input_reflection(trial, basis, f)) - ripple_mag;
      j += d * d;
    }
    for (double f : f_zeros) {
      double m = std::abs(input_reflection(trial, basis, f));
      j += m * m;
    }
    double worst = 0.0;
    for (double f : grid)
      worst = std::max(worst, std::abs(input_reflection(trial, basis, f)));
    double excess = std::max(0.0, worst - guard_mag);
    return j + 16.0 * excess * excess;
  };

  SimplexConfig cfg;
  cfg.max_iterations = opt.max_iterations;
  cfg.spread_tolerance = opt.spread_tolerance;
  cfg.default_step = opt.initial_step;

  auto result = nelder_mead(objective, map.pack(work), cfg);

  ModulatedLadder tuned = start;
  map.unpack(result.x, tuned);
  tuned.validate();

  ModulatedLadder tuned_static = without_modulation(tuned);
  double worst = 0.0;
  for (double f : grid)
    worst = std::max(worst, std::abs(input_reflection(tuned_static, basis, f)));

  TunerReport report;
  report.iterations = result.iterations;
  report.target_rl_db = target;
  report.achieved_rl_db = -db20(worst);
  report.reflection_zero_count = reflection_zero_count(tuned_static, spec);
  report.met_target = report.achieved_rl_db >= target;
  return {tuned, report};
}

}  // namespace tmfa
