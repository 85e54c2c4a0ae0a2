#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tmfa/constants.hpp"
#include "tmfa/errors.hpp"
#include "tmfa/ladder.hpp"
#include "tmfa/linalg.hpp"
#include "tmfa/parallel.hpp"

namespace tmfa {

/// Truncated harmonic ladder around a carrier: frequencies w + k*wm for
/// k in [-k_max, k_max]. A time-periodic capacitance only couples
/// neighboring k, so truncation converges fast in the modulation depth.
struct HarmonicBasis {
  int k_max = 5;

  int count() const { return 2 * k_max + 1; }
  int index_of(int k) const { return k + k_max; }

  void validate() const {
    if (k_max < 1) throw std::domain_error("harmonic basis: k_max must be >= 1");
  }
};

/// Fundamental and per-harmonic scattering data of one bi-directional solve.
///
/// Power-wave convention with the (possibly complex) termination at each
/// port as reference: a = E / (2*sqrt(Re Zs)), b = (V - conj(Zr)*I) /
/// (2*sqrt(Re Zr)); at harmonic k the reference is evaluated at w_k.
struct HarmonicResponse {
  double f_hz = 0.0;
  int k_max = 0;
  std::vector<cplx> forward;     ///< b at port 2 per harmonic / a at port 1
  std::vector<cplx> reverse;     ///< b at port 1 per harmonic / a at port 2
  std::vector<cplx> reflection;  ///< b at port 1 per harmonic / a at port 1

  cplx s21() const { return forward[static_cast<size_t>(k_max)]; }
  cplx s12() const { return reverse[static_cast<size_t>(k_max)]; }
  cplx s11() const { return reflection[static_cast<size_t>(k_max)]; }
  double s21_db() const { return db20(s21()); }
  double s12_db() const { return db20(s12()); }
  double s11_db() const { return db20(s11()); }
  /// TX-vs-RX contrast at the carrier; positive when forward wins.
  double isolation_db() const { return s21_db() - s12_db(); }
};

/// Frequency-domain block system for one drive: node-voltage unknowns
/// V[n,k] ordered harmonic-major (row = h * node_count + node).
struct BlockSystem {
  int node_count = 0;
  int harmonics = 0;
  CMatrix a;
  std::vector<cplx> rhs;
  double drive_amplitude = 0.0;  ///< Thevenin EMF magnitude at k = 0
};

/// Assembles the nodal harmonic-balance system for a Thevenin drive of the
/// given port. Static elements contribute block-diagonal admittances at
/// w_k; each modulated capacitor at node i adds the conversion stencil
/// I_k = j*w_k * (C0*V_k + c1*V_{k-1} + conj(c1)*V_{k+1}) on that node.
///
/// Throws SolverError when any harmonic frequency |w + k*wm| falls below
/// 1e-9 * w: a sideband collapsing onto DC makes the inductive branches
/// singular and the drive grid must avoid it.
inline BlockSystem assemble(const ModulatedLadder& ladder, const HarmonicBasis& basis,
                            double f_hz, Port driven) {
  ladder.validate();
  basis.validate();
  if (!(f_hz > 0.0)) throw std::domain_error("assemble: drive frequency must be > 0");

  const int n_res = ladder.order();
  const int nodes = ladder.node_count();
  const int nh = basis.count();
  const double w = two_pi * f_hz;
  const double wm = two_pi * ladder.modulation.fm_hz;

  std::vector<double> wk(static_cast<size_t>(nh));
  for (int k = -basis.k_max; k <= basis.k_max; ++k) {
    double v = w + k * wm;
    if (std::abs(v) < 1e-9 * w)
      throw SolverError("assemble: harmonic k=" + std::to_string(k) +
                            " collides with DC at drive " + std::to_string(f_hz) + " Hz",
                        f_hz, k);
    wk[static_cast<size_t>(basis.index_of(k))] = v;
  }

  BlockSystem sys;
  sys.node_count = nodes;
  sys.harmonics = nh;
  sys.a = CMatrix(nodes * nh);
  sys.rhs.assign(static_cast<size_t>(nodes) * nh, cplx{});

  const int src_node = 0;
  const int load_node = nodes - 1;
  auto row = [nodes](int h, int node) { return h * nodes + node; };

  for (int h = 0; h < nh; ++h) {
    const double wkh = wk[static_cast<size_t>(h)];
    const cplx jw(0.0, wkh);
    const double fk = wkh / two_pi;
    auto& A = sys.a;

    // Port terminations appear as shunt admittances at their nodes.
    A(row(h, src_node), row(h, src_node)) += 1.0 / ladder.source.at(fk);
    A(row(h, load_node), row(h, load_node)) += 1.0 / ladder.load.at(fk);

    auto series_cap = [&](int na, int nb, double c) {
      const cplx y = jw * c;
      A(row(h, na), row(h, na)) += y;
      A(row(h, nb), row(h, nb)) += y;
      A(row(h, na), row(h, nb)) -= y;
      A(row(h, nb), row(h, na)) -= y;
    };
    series_cap(src_node, 1, ladder.c_ext_in_farad);
    series_cap(n_res, load_node, ladder.c_ext_out_farad);
    for (int i = 0; i < n_res - 1; ++i)
      series_cap(i + 1, i + 2, ladder.c_couple_farad[static_cast<size_t>(i)]);

    for (int i = 0; i < n_res; ++i) {
      const int node = i + 1;
      A(row(h, node), row(h, node)) += ladder.g_loss_siemens[static_cast<size_t>(i)];
      A(row(h, node), row(h, node)) += 1.0 / (jw * ladder.l_henry[static_cast<size_t>(i)]);

      const CapacitorWaveform cap = ladder.resonator_capacitor(i);
      A(row(h, node), row(h, node)) += jw * cap.c0_farad;
      if (ladder.modulation.enabled()) {
        const cplx c1 = cap.c1();
        if (h - 1 >= 0) A(row(h, node), row(h - 1, node)) += jw * c1;
        if (h + 1 < nh) A(row(h, node), row(h + 1, node)) += jw * std::conj(c1);
      }
    }
  }

  const int drive_node = (driven == Port::one) ? src_node : load_node;
  const Termination& drive_term = (driven == Port::one) ? ladder.source : ladder.load;
  const cplx z_drive = drive_term.at(f_hz);
  if (!(z_drive.real() > 0.0))
    throw std::domain_error("assemble: drive termination must have Re(Z) > 0");
  // Unit incident power wave: a = E / (2*sqrt(Re Zs)) = 1.
  sys.drive_amplitude = 2.0 * std::sqrt(z_drive.real());
  sys.rhs[static_cast<size_t>(row(basis.index_of(0), drive_node))] =
      sys.drive_amplitude / z_drive;

  return sys;
}

namespace hb_detail {

/// Outgoing power wave at a passive port node, per harmonic.
inline cplx passive_wave(cplx v, cplx z_ref) {
  return v * std::sqrt(z_ref.real()) / z_ref;
}

struct SolveOnce {
  std::vector<cplx> v;           ///< node voltages, harmonic-major
  double drive_amplitude = 0.0;
};

inline SolveOnce solve_drive(const ModulatedLadder& ladder, const HarmonicBasis& basis,
                             double f_hz, Port driven, double residual_tol) {
  BlockSystem sys = assemble(ladder, basis, f_hz, driven);
  SolveOnce out;
  out.v = solve_dense(sys.a, sys.rhs, residual_tol, f_hz);
  out.drive_amplitude = sys.drive_amplitude;
  return out;
}

}  // namespace hb_detail

/// Solves both drive directions at one frequency and forms the power-wave
/// scattering data. Terminations with Re(Z) <= 0 at any harmonic are
/// rejected; the residual of each linear solve is verified.
inline HarmonicResponse sparams(const ModulatedLadder& ladder, const HarmonicBasis& basis,
                                double f_hz, double residual_tol = 1e-10) {
  const int nodes = ladder.node_count();
  const int nh = basis.count();
  const double w = two_pi * f_hz;
  const double wm = two_pi * ladder.modulation.fm_hz;

  const auto fwd = hb_detail::solve_drive(ladder, basis, f_hz, Port::one, residual_tol);
  const auto rev = hb_detail::solve_drive(ladder, basis, f_hz, Port::two, residual_tol);

  HarmonicResponse resp;
  resp.f_hz = f_hz;
  resp.k_max = basis.k_max;
  resp.forward.resize(static_cast<size_t>(nh));
  resp.reverse.resize(static_cast<size_t>(nh));
  resp.reflection.resize(static_cast<size_t>(nh));

  const int src_node = 0;
  const int load_node = nodes - 1;
  const cplx z_src0 = ladder.source.at(f_hz);

  for (int h = 0; h < nh; ++h) {
    const double fk = (w + (h - basis.k_max) * wm) / two_pi;
    const cplx zs = ladder.source.at(fk);
    const cplx zl = ladder.load.at(fk);
    if (!(zs.real() > 0.0) || !(zl.real() > 0.0))
      throw std::domain_error("sparams: termination has Re(Z) <= 0 at harmonic frequency " +
                              std::to_string(fk));

    const cplx v_load_f = fwd.v[static_cast<size_t>(h * nodes + load_node)];
    const cplx v_src_f = fwd.v[static_cast<size_t>(h * nodes + src_node)];
    const cplx v_src_r = rev.v[static_cast<size_t>(h * nodes + src_node)];

    // Unit incident wave at the driven port makes b the S-parameter directly.
    resp.forward[static_cast<size_t>(h)] = hb_detail::passive_wave(v_load_f, zl);
    resp.reverse[static_cast<size_t>(h)] = hb_detail::passive_wave(v_src_r, zs);

    if (h == basis.index_of(0)) {
      const cplx e = fwd.drive_amplitude;
      const cplx i_in = (e - v_src_f) / zs;
      resp.reflection[static_cast<size_t>(h)] =
          (v_src_f - std::conj(z_src0) * i_in) / (2.0 * std::sqrt(z_src0.real()));
    } else {
      resp.reflection[static_cast<size_t>(h)] = hb_detail::passive_wave(v_src_f, zs);
    }
  }
  return resp;
}

/// Fundamental input reflection from a single forward solve; the cheap
/// path for tuners that never look at transmission.
inline cplx input_reflection(const ModulatedLadder& ladder, const HarmonicBasis& basis,
                             double f_hz, double residual_tol = 1e-10) {
  const auto fwd = hb_detail::solve_drive(ladder, basis, f_hz, Port::one, residual_tol);
  const cplx zs = ladder.source.at(f_hz);
  const cplx v = fwd.v[static_cast<size_t>(basis.index_of(0) * ladder.node_count())];
  const cplx i_in = (fwd.drive_amplitude - v) / zs;
  return (v - std::conj(zs) * i_in) / (2.0 * std::sqrt(zs.real()));
}

/// One grid point of a frequency sweep; failed points carry the message
/// instead of aborting the rest of the grid.
struct SweepPoint {
  double f_hz = 0.0;
  std::optional<HarmonicResponse> response;
  std::string error;

  bool ok() const { return response.has_value(); }
};

/// Uniform frequency grid, inclusive of both ends.
inline std::vector<double> frequency_grid(double f_start, double f_stop, int points) {
  if (!(f_start > 0.0) || !(f_stop > f_start))
    throw std::domain_error("sweep: need 0 < f_start < f_stop");
  if (points < 2) throw std::domain_error("sweep: need at least 2 points");
  std::vector<double> f(static_cast<size_t>(points));
  for (int i = 0; i < points; ++i)
    f[static_cast<size_t>(i)] = f_start + (f_stop - f_start) * i / (points - 1.0);
  return f;
}

/// Sweeps sparams over a grid. Points are independent and may be evaluated
/// concurrently; the result is always in grid order.
inline std::vector<SweepPoint> sweep(const ModulatedLadder& ladder, const HarmonicBasis& basis,
                                     const std::vector<double>& grid,
                                     double residual_tol = 1e-10) {
  std::vector<SweepPoint> out(grid.size());
  parallel_for(static_cast<int>(grid.size()), [&](int i) {
    SweepPoint& pt = out[static_cast<size_t>(i)];
    pt.f_hz = grid[static_cast<size_t>(i)];
    try {
      pt.response = sparams(ladder, basis, pt.f_hz, residual_tol);
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
  });
  return out;
}

}  // namespace tmfa
