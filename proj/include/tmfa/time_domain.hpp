#pragma once

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "tmfa/constants.hpp"
#include "tmfa/errors.hpp"
#include "tmfa/ladder.hpp"
#include "tmfa/linalg.hpp"

namespace tmfa {

// ---------------------------------------------------------------------------
// Brute-force transient reference path. Everything here works on the ladder's
// exact time-varying element laws and deliberately shares no machinery with
// the frequency-domain solver it cross-checks.
// ---------------------------------------------------------------------------

struct TdOptions {
  int steps_per_carrier = 200;  ///< fixed RK4 steps per carrier period
  int settle_periods = 200;     ///< discarded lead-in, in common (modulation) periods
  int window_periods = 8;       ///< extraction window length, in common periods
  double settle_tol = 1e-5;     ///< relative fundamental change between windows
  int max_extra_windows = 40;   ///< extra windows allowed before giving up
  int k_max = 5;                ///< extracted sidebands: carrier +- k * fm

  void validate() const {
    if (steps_per_carrier < 16)
      throw std::domain_error("time domain: steps_per_carrier must be >= 16");
    if (settle_periods < 1 || window_periods < 1)
      throw std::domain_error("time domain: settle and window periods must be >= 1");
    if (!(settle_tol > 0.0)) throw std::domain_error("time domain: settle_tol must be > 0");
    if (max_extra_windows < 0)
      throw std::domain_error("time domain: max_extra_windows must be >= 0");
    if (k_max < 1) throw std::domain_error("time domain: k_max must be >= 1");
  }
};

/// Streaming projection of a uniformly sampled real signal onto the tones
/// f + k*fm, |k| <= k_max. Feeding an integer number of common periods of a
/// commensurate signal makes the projection an exact DFT bin: no leakage.
/// Amplitudes follow x(t) = Re{ A_k e^{j w_k t} }, indexed k + k_max.
class ToneProjector {
 public:
  ToneProjector(double f_hz, double fm_hz, int k_max)
      : w_lowest_(two_pi * (f_hz - k_max * fm_hz)),
        wm_(two_pi * fm_hz),
        k_max_(k_max),
        acc_(static_cast<size_t>(2 * k_max + 1)) {}

  void add(double t_s, double x) {
    cplx rot = std::polar(x, -w_lowest_ * t_s);
    const cplx step = std::polar(1.0, -wm_ * t_s);
    for (auto& a : acc_) {
      a += rot;
      rot *= step;
    }
    ++count_;
  }

  long samples() const { return count_; }

  std::vector<cplx> amplitudes() const {
    std::vector<cplx> out = acc_;
    if (count_ > 0)
      for (auto& a : out) a *= 2.0 / static_cast<double>(count_);
    return out;
  }

 private:
  double w_lowest_, wm_;
  int k_max_;
  long count_ = 0;
  std::vector<cplx> acc_;
};

namespace td_detail {

inline double resistive(const Termination& term, const char* which) {
  if (term.is_table())
    throw std::domain_error(std::string("time domain: ") + which +
                            " termination must be a plain resistance, not a table");
  cplx z = term.constant_value();
  if (!(z.real() > 0.0) || std::abs(z.imag()) > 1e-9 * z.real())
    throw std::domain_error(std::string("time domain: ") + which +
                            " termination must be a positive resistance");
  return z.real();
}

/// State equations of the ladder with a sinusoidal Thevenin drive behind one
/// port resistance. State layout, length node_count + order + 2:
///
///   y = [ q_0 .. q_{N-1} | i_L1 .. i_Ln | E_in | E_diss ]
///
/// Nodal charge q = C(t) v is the integration variable because i = dq/dt
/// stays exact when C varies in time; voltages are recovered by solving
/// C(t) v = q (the capacitance graph is an irreducible dominant path, so
/// C(t) is always invertible). E_in integrates the power leaving the source
/// EMF, E_diss the power burned in the terminations and loss conductances.
///
/// Instances hold scratch buffers; share one per sequential run only.
class LadderOde {
 public:
  LadderOde(const ModulatedLadder& lad, Port drive_port, double f_hz, double emf_v)
      : nodes_(lad.node_count()),
        res_(lad.order()),
        rs_(resistive(lad.source, "source")),
        rl_(resistive(lad.load, "load")),
        emf_(emf_v),
        omega_(two_pi * f_hz),
        drive_node_(drive_port == Port::one ? 0 : nodes_ - 1),
        l_(lad.l_henry),
        g_(lad.g_loss_siemens),
        c_static_(nodes_),
        c_t_(nodes_),
        q_(static_cast<size_t>(nodes_)),
        v_(static_cast<size_t>(nodes_)) {
    lad.validate();
    for (int i = 0; i < res_; ++i) c0_.push_back(lad.resonator_capacitor(i));

    auto stamp = [&](int a, int b, double c) {
      c_static_(a, a) += c;
      c_static_(b, b) += c;
      c_static_(a, b) -= c;
      c_static_(b, a) -= c;
    };
    stamp(0, 1, lad.c_ext_in_farad);
    for (int i = 0; i + 1 < res_; ++i) stamp(i + 1, i + 2, lad.c_couple_farad[static_cast<size_t>(i)]);
    stamp(nodes_ - 2, nodes_ - 1, lad.c_ext_out_farad);
  }

  int state_size() const { return nodes_ + res_ + 2; }
  int node_count() const { return nodes_; }
  double drive_emf(double t_s) const { return emf_ * std::cos(omega_ * t_s); }

  /// Voltage buffer of the most recent solve; the stepper hands it to
  /// observers right after the first derivative stage of each step.
  const std::vector<double>& last_voltages() const { return v_; }

  /// Solves C(t) v = q for the given state; result stays valid until the
  /// next call on this instance.
  const std::vector<double>& node_voltages(double t_s, const std::vector<double>& y) const {
    c_t_.a = c_static_.a;
    for (int i = 0; i < res_; ++i) c_t_(i + 1, i + 1) += c0_[static_cast<size_t>(i)].at(t_s);
    for (int i = 0; i < nodes_; ++i) q_[static_cast<size_t>(i)] = y[static_cast<size_t>(i)];
    lu_factor(c_t_, perm_);
    lu_solve_factored(c_t_, perm_, q_, v_);
    return v_;
  }

  void derivative(double t_s, const std::vector<double>& y, std::vector<double>& dy) const {
    const std::vector<double>& v = node_voltages(t_s, y);
    dy.resize(y.size());

    const double e = drive_emf(t_s);
    const double e_src = drive_node_ == 0 ? e : 0.0;
    const double e_load = drive_node_ == nodes_ - 1 ? e : 0.0;
    const double i_src = (e_src - v[0]) / rs_;
    const double i_load = (e_load - v[static_cast<size_t>(nodes_ - 1)]) / rl_;

    dy[0] = i_src;
    for (int i = 0; i < res_; ++i) {
      const auto ui = static_cast<size_t>(i);
      dy[ui + 1] = -g_[ui] * v[ui + 1] - y[static_cast<size_t>(nodes_) + ui];
      dy[static_cast<size_t>(nodes_) + ui] = v[ui + 1] / l_[ui];
    }
    dy[static_cast<size_t>(nodes_ - 1)] = i_load;

    double p_diss = i_src * i_src * rs_ + i_load * i_load * rl_;
    for (int i = 0; i < res_; ++i) {
      const auto ui = static_cast<size_t>(i);
      p_diss += g_[ui] * v[ui + 1] * v[ui + 1];
    }
    const double i_drive = drive_node_ == 0 ? i_src : i_load;
    dy[static_cast<size_t>(state_size() - 2)] = e * i_drive;
    dy[static_cast<size_t>(state_size() - 1)] = p_diss;
  }

  /// 1/2 q.v + 1/2 sum L i^2; the capacitive term uses q = C v directly.
  double stored_energy(double t_s, const std::vector<double>& y) const {
    const std::vector<double>& v = node_voltages(t_s, y);
    double e = 0.0;
    for (int i = 0; i < nodes_; ++i)
      e += 0.5 * y[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
    for (int i = 0; i < res_; ++i) {
      double il = y[static_cast<size_t>(nodes_ + i)];
      e += 0.5 * l_[static_cast<size_t>(i)] * il * il;
    }
    return e;
  }

 private:
  int nodes_, res_;
  double rs_, rl_, emf_, omega_;
  int drive_node_;
  std::vector<double> l_, g_;
  std::vector<CapacitorWaveform> c0_;
  RMatrix c_static_;
  mutable RMatrix c_t_;
  mutable std::vector<int> perm_;
  mutable std::vector<double> q_, v_;
};

/// Classic fixed-step RK4. The observer sees (t, node voltages, state) at
/// the start of every step; the final state lands in y.
template <class Obs>
inline void rk4(const LadderOde& ode, std::vector<double>& y, double t0_s, long steps,
                double dt_s, Obs&& obs) {
  const size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), work(n);
  for (long s = 0; s < steps; ++s) {
    const double t = t0_s + static_cast<double>(s) * dt_s;
    ode.derivative(t, y, k1);
    obs(t, ode.last_voltages(), y);
    for (size_t i = 0; i < n; ++i) work[i] = y[i] + 0.5 * dt_s * k1[i];
    ode.derivative(t + 0.5 * dt_s, work, k2);
    for (size_t i = 0; i < n; ++i) work[i] = y[i] + 0.5 * dt_s * k2[i];
    ode.derivative(t + 0.5 * dt_s, work, k3);
    for (size_t i = 0; i < n; ++i) work[i] = y[i] + dt_s * k3[i];
    ode.derivative(t + dt_s, work, k4);
    for (size_t i = 0; i < n; ++i)
      y[i] += dt_s / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    for (double c : y)
      if (!std::isfinite(c))
        throw IntegrationError("time domain: state blew up (parametric instability?)",
                               t + dt_s);
  }
}

}  // namespace td_detail

/// Integrates the ladder driven by emf_v * cos(2 pi f t) behind the chosen
/// port's termination resistance. An empty state is zero-initialized; see
/// td_detail::LadderOde for the state layout. The observer is called as
/// obs(t_s, node_voltages, state) at the start of every step.
template <class Obs>
inline void integrate_transient(const ModulatedLadder& lad, Port drive_port, double f_hz,
                                double emf_v, long steps, double dt_s,
                                std::vector<double>& state, Obs&& obs, double t0_s = 0.0) {
  if (!(dt_s > 0.0) || steps < 0) throw std::domain_error("time domain: need dt > 0, steps >= 0");
  td_detail::LadderOde ode(lad, drive_port, f_hz, emf_v);
  if (state.empty()) state.assign(static_cast<size_t>(ode.state_size()), 0.0);
  if (state.size() != static_cast<size_t>(ode.state_size()))
    throw std::domain_error("time domain: state size does not match the ladder");
  td_detail::rk4(ode, state, t0_s, steps, dt_s, obs);
}

/// Instantaneous stored energy of a transient state (capacitors + inductors).
inline double stored_energy(const ModulatedLadder& lad, double t_s,
                            const std::vector<double>& state) {
  td_detail::LadderOde ode(lad, Port::one, 1.0, 0.0);
  if (state.size() != static_cast<size_t>(ode.state_size()))
    throw std::domain_error("time domain: state size does not match the ladder");
  return ode.stored_energy(t_s, state);
}

struct SteadyStateExtract {
  double f_hz = 0.0;
  double fm_hz = 0.0;
  int k_max = 0;
  std::vector<cplx> amplitude;  ///< probe-node voltage per tone, index k + k_max
  double settling_metric = 0.0;
  int windows_used = 0;
  double end_time_s = 0.0;

  cplx fundamental() const { return amplitude[static_cast<size_t>(k_max)]; }
};

namespace td_detail {

inline long commensurate_ratio(double f_hz, double fm_hz) {
  if (!(f_hz > 0.0) || !(fm_hz > 0.0))
    throw std::domain_error("time domain: frequencies must be positive");
  const double ratio = f_hz / fm_hz;
  const long p = std::lround(ratio);
  if (p < 1 || std::abs(ratio - static_cast<double>(p)) > 1e-9 * ratio)
    throw std::domain_error("time domain: f/fm must be an exact small integer, got " +
                            std::to_string(ratio));
  return p;
}

/// Runs settle + repeated extraction windows until the fundamental stops
/// moving, then reports the last window's amplitudes.
inline SteadyStateExtract settle_and_extract(const LadderOde& ode, int probe_node, double f_hz,
                                             double fm_hz, const TdOptions& opt) {
  const long p = commensurate_ratio(f_hz, fm_hz);
  const double dt = 1.0 / (opt.steps_per_carrier * f_hz);
  const long steps_per_common = static_cast<long>(opt.steps_per_carrier) * p;

  std::vector<double> y(static_cast<size_t>(ode.state_size()), 0.0);
  long done = 0;
  auto silent = [](double, const std::vector<double>&, const std::vector<double>&) {};
  rk4(ode, y, 0.0, opt.settle_periods * steps_per_common, dt, silent);
  done += opt.settle_periods * steps_per_common;

  auto window = [&] {
    ToneProjector proj(f_hz, fm_hz, opt.k_max);
    rk4(ode, y, static_cast<double>(done) * dt, opt.window_periods * steps_per_common, dt,
        [&](double t, const std::vector<double>& v, const std::vector<double>&) {
          proj.add(t, v[static_cast<size_t>(probe_node)]);
        });
    done += opt.window_periods * steps_per_common;
    return proj.amplitudes();
  };

  SteadyStateExtract out;
  out.f_hz = f_hz;
  out.fm_hz = fm_hz;
  out.k_max = opt.k_max;

  std::vector<cplx> prev = window();
  out.windows_used = 1;
  for (int w = 0; w <= opt.max_extra_windows; ++w) {
    std::vector<cplx> cur = window();
    ++out.windows_used;
    const auto k0 = static_cast<size_t>(opt.k_max);
    const double scale = std::max(std::abs(cur[k0]), 1e-300);
    out.settling_metric = std::abs(cur[k0] - prev[k0]) / scale;
    if (out.settling_metric <= opt.settle_tol) {
      out.amplitude = std::move(cur);
      out.end_time_s = static_cast<double>(done) * dt;
      return out;
    }
    prev = std::move(cur);
  }
  throw IntegrationError("time domain: steady state not reached, metric " +
                             std::to_string(out.settling_metric),
                         static_cast<double>(done) * dt);
}

}  // namespace td_detail

struct OracleResponse {
  double f_hz = 0.0;
  double fm_hz = 0.0;
  cplx s21, s12;
  double settling_fwd = 0.0;
  double settling_rev = 0.0;

  double s21_db() const { return db20(s21); }
  double s12_db() const { return db20(s12); }
  double isolation_db() const { return s21_db() - s12_db(); }
};

/// Transmission in both directions by brute-force transient integration,
/// commensurate probe (f = integer * fm). Modulation amplitude and phases
/// come from the ladder; the modulation frequency is part of the probe
/// point and overrides the ladder's. Terminations must be resistive.
///
/// With the drive EMF set to 2 sqrt(R_drive) the incident wave is unity, so
/// S21 = V_load / sqrt(R_load) and S12 = V_source / sqrt(R_source) at the
/// carrier, the same power-wave convention as the frequency-domain solver.
inline OracleResponse oracle_sparams(const ModulatedLadder& lad, double f_hz, double fm_hz,
                                     const TdOptions& opt = {}) {
  opt.validate();
  ModulatedLadder work = lad;
  if (work.modulation.enabled()) work.modulation.fm_hz = fm_hz;
  work.validate();

  const double rs = td_detail::resistive(work.source, "source");
  const double rl = td_detail::resistive(work.load, "load");
  const int last = work.node_count() - 1;

  OracleResponse out;
  out.f_hz = f_hz;
  out.fm_hz = fm_hz;

  td_detail::LadderOde fwd(work, Port::one, f_hz, 2.0 * std::sqrt(rs));
  auto ef = td_detail::settle_and_extract(fwd, last, f_hz, fm_hz, opt);
  out.s21 = ef.fundamental() / std::sqrt(rl);
  out.settling_fwd = ef.settling_metric;

  td_detail::LadderOde rev(work, Port::two, f_hz, 2.0 * std::sqrt(rl));
  auto er = td_detail::settle_and_extract(rev, 0, f_hz, fm_hz, opt);
  out.s12 = er.fundamental() / std::sqrt(rs);
  out.settling_rev = er.settling_metric;
  return out;
}

/// One probe frequency with an exactly integer carrier / modulation ratio.
struct CommensuratePoint {
  int carrier_per_mod = 0;
  double fm_hz = 0.0;

  double f_hz() const { return carrier_per_mod * fm_hz; }
};

/// Five in-band probes spanning ratios 31..33 around the 2.4 GHz design,
/// including the exact published operating ratio 2400/75 = 32.
inline std::vector<CommensuratePoint> oracle_point_set() {
  return {{32, 74.0e6}, {33, 72.5e6}, {32, 75.0e6}, {31, 77.5e6}, {33, 73.5e6}};
}

}  // namespace tmfa
