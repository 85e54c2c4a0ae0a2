#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "tmfa/chebyshev.hpp"
#include "tmfa/harmonic_balance.hpp"
#include "tmfa/synthesis.hpp"
#include "tmfa/tuner.hpp"
#include "tmfa/wire_antenna.hpp"

namespace tmfa {

// ---------------------------------------------------------------------------
// Composition of the modulated filter and the wire radiator into one
// filtering antenna. The device gain factors exactly into (filter
// transducer gain) x (radiator directivity), so every angular quantity
// shares the filter's S-parameters and every spectral quantity shares the
// radiator's pattern.
// ---------------------------------------------------------------------------

/// The composed device narrows the design bandwidth below the bare filter's
/// 4% so the radiated 3-dB band lands at hardware scale once loss rounding
/// and the antenna's dispersion are in the loop.
inline FilterSpec default_system_filter() {
  FilterSpec s;
  s.fbw = 0.031;
  return s;
}

struct SystemOptions {
  FilterSpec filter = default_system_filter();
  double c_res_farad = 0.86e-12;
  double q_u = 140.0;
  YagiGeometry geometry = default_geometry();
  double table_lo_hz = 1.3e9;   ///< impedance-table span; covers all
  double table_hi_hz = 3.5e9;   ///<   sidebands the solver can request
  int table_points = 221;
  int k_max = 5;
  TunerOptions tuner;
  QuadratureOptions quadrature;

  void validate() const {
    filter.validate();
    geometry.validate();
    quadrature.validate();
    if (!(c_res_farad > 0.0)) throw std::domain_error("system: c_res must be > 0");
    if (!(q_u > 0.0)) throw std::domain_error("system: q_u must be > 0");
    if (!(table_lo_hz > 0.0) || !(table_hi_hz > table_lo_hz) || table_points < 2)
      throw std::domain_error("system: bad impedance-table span");
    if (table_lo_hz > filter.band_lo_hz() || table_hi_hz < filter.band_hi_hz())
      throw std::domain_error("system: impedance table must cover the filter band");
    if (k_max < 1) throw std::domain_error("system: k_max must be >= 1");
  }
};

/// One boresight sweep row; all gains are in dB relative to the reference
/// antenna's boresight at f0.
struct BoresightPoint {
  double f_hz = 0.0;
  double ref_db = 0.0;        ///< bare antenna fed straight from the source
  double static_tx_db = 0.0;  ///< through the unmodulated filter
  double mod_tx_db = 0.0;
  double mod_rx_db = 0.0;
  double iso_db = 0.0;        ///< mod_tx_db - mod_rx_db
};

struct CutPoint {
  double angle_deg = 0.0;
  double tx_db = 0.0;
  double rx_db = 0.0;
};

/// TX/RX principal-plane cuts at one frequency, 1 degree sampling.
/// E plane: the wire-axis plane through the beam (phi = 0 / 180 halves);
/// H plane: the equatorial plane (theta = 90).
struct PatternCuts {
  double f_hz = 0.0;
  std::vector<CutPoint> e_plane;
  std::vector<CutPoint> h_plane;
};

struct DirectionalGainReport {
  std::vector<BoresightPoint> sweep;
  PatternCuts cuts;              ///< taken at f0
  double f0_hz = 0.0;
  double isolation_f0_db = 0.0;  ///< carrier TX-RX contrast at f0
};

class FilteringAntennaModel {
 public:
  explicit FilteringAntennaModel(SystemOptions opt = {}) : opt_(std::move(opt)) {
    opt_.validate();
    antenna_ = impedance_table(
        opt_.geometry, frequency_grid(opt_.table_lo_hz, opt_.table_hi_hz, opt_.table_points),
        opt_.quadrature);
    load_ = antenna_.as_termination();

    ModulatedLadder start = realize_ladder(chebyshev_prototype(opt_.filter), opt_.filter,
                                           opt_.c_res_farad, opt_.q_u);
    start.load = load_;
    std::tie(ladder_, tuner_report_) = tune_equiripple(start, opt_.filter, opt_.tuner);

    FarField ff(opt_.geometry, opt_.filter.f0_hz, opt_.quadrature);
    reference_gain_dbi_ = ff.directivity_dbi(90.0, 0.0);
    if (!std::isfinite(reference_gain_dbi_))
      throw SolverError("system: reference gain not finite", opt_.filter.f0_hz);
    anchor_db_ = matched_transfer_db(opt_.filter.f0_hz) + reference_gain_dbi_;
  }

  const SystemOptions& options() const { return opt_; }
  const ModulatedLadder& ladder() const { return ladder_; }
  const AntennaImpedance& antenna() const { return antenna_; }
  const TunerReport& tuner_report() const { return tuner_report_; }
  double f0_hz() const { return opt_.filter.f0_hz; }
  /// Boresight directivity of the bare radiator at f0, the 0 dB anchor.
  double reference_gain_dbi() const { return reference_gain_dbi_; }

  void set_modulation(const ModulationSpec& m) {
    m.validate(ladder_.order());
    ladder_.modulation = m;
  }

  /// Power transfer of the bare antenna fed straight from the z0 source,
  /// relative to the available power.
  double matched_transfer_db(double f_hz) const {
    const cplx za = load_.at(f_hz);
    const double rs = opt_.filter.z0_ohm;
    return db10(4.0 * rs * za.real() / std::norm(za + rs));
  }

  /// Carrier S-parameters through the tuned, antenna-loaded ladder.
  /// The static state drops the sidebands entirely.
  HarmonicResponse response(double f_hz, bool modulated) const {
    if (modulated && ladder_.modulation.enabled())
      return sparams(ladder_, HarmonicBasis{opt_.k_max}, f_hz);
    ModulatedLadder quiet = ladder_;
    quiet.modulation = ModulationSpec::off(ladder_.order());
    return sparams(quiet, HarmonicBasis{1}, f_hz);
  }

  /// Transmit gain toward (theta, phi), dB relative to the reference
  /// antenna's boresight at f0.
  double tx_gain_db(double f_hz, double theta_deg, double phi_deg,
                    bool modulated = true) const {
    check_in_table(f_hz);
    FarField ff(opt_.geometry, f_hz, opt_.quadrature);
    return response(f_hz, modulated).s21_db() + ff.directivity_dbi(theta_deg, phi_deg) -
           anchor_db_;
  }

  /// Receive gain from (theta, phi): the reverse filter solve with the same
  /// reciprocal radiator.
  double rx_gain_db(double f_hz, double theta_deg, double phi_deg,
                    bool modulated = true) const {
    check_in_table(f_hz);
    FarField ff(opt_.geometry, f_hz, opt_.quadrature);
    return response(f_hz, modulated).s12_db() + ff.directivity_dbi(theta_deg, phi_deg) -
           anchor_db_;
  }

  /// Reference / static / modulated boresight curves over a grid, plus the
  /// principal-plane cuts at f0.
  DirectionalGainReport boresight_sweep(const std::vector<double>& f_grid_hz) const {
    if (f_grid_hz.empty()) throw std::domain_error("system: empty sweep grid");
    for (double f : f_grid_hz) check_in_table(f);

    DirectionalGainReport rep;
    rep.f0_hz = f0_hz();
    rep.sweep.resize(f_grid_hz.size());
    std::vector<std::string> failures(f_grid_hz.size());
    parallel_for(static_cast<int>(f_grid_hz.size()), [&](int i) {
      const auto ui = static_cast<size_t>(i);
      try {
        rep.sweep[ui] = boresight_point(f_grid_hz[ui]);
      } catch (const std::exception& e) {
        failures[ui] = e.what();
      }
    });
    for (size_t i = 0; i < failures.size(); ++i)
      if (!failures[i].empty())
        throw SolverError("system: boresight sweep failed: " + failures[i], f_grid_hz[i]);

    rep.cuts = pattern_cuts(f0_hz());
    rep.isolation_f0_db = response(f0_hz(), true).isolation_db();
    return rep;
  }

  /// E- and H-plane TX/RX cuts at one frequency, 360 rows each.
  PatternCuts pattern_cuts(double f_hz) const {
    check_in_table(f_hz);
    const HarmonicResponse r = response(f_hz, true);
    FarField ff(opt_.geometry, f_hz, opt_.quadrature);

    PatternCuts cuts;
    cuts.f_hz = f_hz;
    for (int a = 0; a < 360; ++a) {
      const double theta = a <= 180 ? a : 360.0 - a;
      const double phi = a <= 180 ? 0.0 : 180.0;
      cuts.e_plane.push_back(cut_point(r, ff, a, theta, phi));
      cuts.h_plane.push_back(cut_point(r, ff, a, 90.0, static_cast<double>(a)));
    }
    return cuts;
  }

 private:
  void check_in_table(double f_hz) const {
    if (!(f_hz >= opt_.table_lo_hz) || !(f_hz <= opt_.table_hi_hz))
      throw std::domain_error("system: frequency outside the impedance table span");
  }

  BoresightPoint boresight_point(double f_hz) const {
    FarField ff(opt_.geometry, f_hz, opt_.quadrature);
    const double d_bore = ff.directivity_dbi(90.0, 0.0);
    const HarmonicResponse st = response(f_hz, false);
    const HarmonicResponse mod = response(f_hz, true);

    BoresightPoint pt;
    pt.f_hz = f_hz;
    pt.ref_db = matched_transfer_db(f_hz) + d_bore - anchor_db_;
    pt.static_tx_db = st.s21_db() + d_bore - anchor_db_;
    pt.mod_tx_db = mod.s21_db() + d_bore - anchor_db_;
    pt.mod_rx_db = mod.s12_db() + d_bore - anchor_db_;
    pt.iso_db = pt.mod_tx_db - pt.mod_rx_db;
    return pt;
  }

  CutPoint cut_point(const HarmonicResponse& r, const FarField& ff, int angle, double theta,
                     double phi) const {
    const double d = ff.directivity_dbi(theta, phi);
    return {static_cast<double>(angle), r.s21_db() + d - anchor_db_,
            r.s12_db() + d - anchor_db_};
  }

  SystemOptions opt_;
  AntennaImpedance antenna_;
  Termination load_;
  ModulatedLadder ladder_;
  TunerReport tuner_report_;
  double reference_gain_dbi_ = 0.0;
  double anchor_db_ = 0.0;
};

}  // namespace tmfa
