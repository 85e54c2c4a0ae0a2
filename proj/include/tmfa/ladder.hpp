#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tmfa/constants.hpp"
#include "tmfa/modulation.hpp"

namespace tmfa {

enum class Port { one, two };

/// Port termination: either a constant complex impedance or a tabulated
/// Z(f) with linear interpolation between samples. Negative-frequency
/// lookups return the conjugate (real impulse response).
class Termination {
 public:
  Termination() : constant_(50.0, 0.0) {}
  explicit Termination(cplx z) : constant_(z) {}

  static Termination table(std::vector<std::pair<double, cplx>> samples) {
    if (samples.size() < 2)
      throw std::domain_error("termination: impedance table needs at least 2 samples");
    std::sort(samples.begin(), samples.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (size_t i = 1; i < samples.size(); ++i)
      if (!(samples[i].first > samples[i - 1].first))
        throw std::domain_error("termination: impedance table frequencies must be distinct");
    Termination t;
    t.samples_ = std::move(samples);
    return t;
  }

  bool is_table() const { return !samples_.empty(); }
  const std::vector<std::pair<double, cplx>>& samples() const { return samples_; }
  cplx constant_value() const { return constant_; }

  cplx at(double f_hz) const {
    if (f_hz < 0.0) return std::conj(at(-f_hz));
    if (samples_.empty()) return constant_;
    if (f_hz <= samples_.front().first) return samples_.front().second;
    if (f_hz >= samples_.back().first) return samples_.back().second;
    auto it = std::upper_bound(samples_.begin(), samples_.end(), f_hz,
                               [](double f, const auto& s) { return f < s.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    double u = (f_hz - lo.first) / (hi.first - lo.first);
    return lo.second + u * (hi.second - lo.second);
  }

 private:
  cplx constant_;
  std::vector<std::pair<double, cplx>> samples_;
};

/// Shunt-resonator bandpass ladder with capacitive couplings.
///
/// Node order: 0 = source-side port node, 1..n = resonator nodes,
/// n+1 = load-side port node. Each resonator node carries a (possibly
/// modulated) capacitor c0[i], an inductor l[i] and a loss conductance
/// g_loss[i], all to ground. c_couple[i] sits between resonator nodes
/// i+1 and i+2; c_ext_in / c_ext_out couple the port nodes in.
struct ModulatedLadder {
  double f0_hz = 0.0;                 ///< design center, kept for diagnostics
  std::vector<double> c0_farad;       ///< resonator capacitors (modulated)
  std::vector<double> l_henry;        ///< resonator inductors
  std::vector<double> g_loss_siemens; ///< resonator loss conductances
  std::vector<double> c_couple_farad; ///< inter-resonator couplings, size n-1
  double c_ext_in_farad = 0.0;
  double c_ext_out_farad = 0.0;
  Termination source{cplx(50.0, 0.0)};
  Termination load{cplx(50.0, 0.0)};
  ModulationSpec modulation;

  int order() const { return static_cast<int>(c0_farad.size()); }
  int node_count() const { return order() + 2; }

  CapacitorWaveform resonator_capacitor(int i) const {
    CapacitorWaveform w;
    w.c0_farad = c0_farad.at(static_cast<size_t>(i));
    w.delta_m = modulation.delta_m;
    w.fm_hz = modulation.fm_hz;
    w.phase_rad = modulation.phase_rad.at(static_cast<size_t>(i));
    return w;
  }

  void validate() const {
    const int n = order();
    if (n < 1) throw std::domain_error("ladder: needs at least one resonator");
    if (l_henry.size() != static_cast<size_t>(n) ||
        g_loss_siemens.size() != static_cast<size_t>(n) ||
        c_couple_farad.size() != static_cast<size_t>(n) - 1)
      throw std::domain_error("ladder: element list sizes inconsistent with order");
    for (double c : c0_farad)
      if (!(c > 0.0)) throw std::domain_error("ladder: resonator capacitance must be > 0");
    for (double l : l_henry)
      if (!(l > 0.0)) throw std::domain_error("ladder: inductance must be > 0");
    for (double g : g_loss_siemens)
      if (!(g >= 0.0)) throw std::domain_error("ladder: loss conductance must be >= 0");
    for (double c : c_couple_farad)
      if (!(c > 0.0)) throw std::domain_error("ladder: coupling capacitance must be > 0");
    if (!(c_ext_in_farad > 0.0) || !(c_ext_out_farad > 0.0))
      throw std::domain_error("ladder: external coupling capacitance must be > 0");
    modulation.validate(n);
  }

  /// True when every static element is mirror-symmetric about the center.
  bool mirror_symmetric(double rel_tol = 1e-12) const {
    const int n = order();
    auto near = [rel_tol](double a, double b) {
      return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
    };
    for (int i = 0; i < n; ++i) {
      if (!near(c0_farad[static_cast<size_t>(i)], c0_farad[static_cast<size_t>(n - 1 - i)]) ||
          !near(l_henry[static_cast<size_t>(i)], l_henry[static_cast<size_t>(n - 1 - i)]) ||
          !near(g_loss_siemens[static_cast<size_t>(i)], g_loss_siemens[static_cast<size_t>(n - 1 - i)]))
        return false;
    }
    for (int i = 0; i < n - 1; ++i)
      if (!near(c_couple_farad[static_cast<size_t>(i)], c_couple_farad[static_cast<size_t>(n - 2 - i)]))
        return false;
    return near(c_ext_in_farad, c_ext_out_farad);
  }
};

/// Copy of the ladder with progressive phasing applied.
inline ModulatedLadder with_modulation(const ModulatedLadder& ladder, double fm_hz,
                                       double delta_m, double delta_phi_rad) {
  ModulatedLadder out = ladder;
  out.modulation = ModulationSpec::progressive(ladder.order(), fm_hz, delta_m, delta_phi_rad);
  out.modulation.validate(ladder.order());
  return out;
}

/// Copy with arbitrary per-resonator phases.
inline ModulatedLadder with_phases(const ModulatedLadder& ladder, double fm_hz, double delta_m,
                                   std::vector<double> phase_rad) {
  ModulatedLadder out = ladder;
  out.modulation.fm_hz = fm_hz;
  out.modulation.delta_m = delta_m;
  out.modulation.phase_rad = std::move(phase_rad);
  out.modulation.validate(ladder.order());
  return out;
}

inline ModulatedLadder without_modulation(const ModulatedLadder& ladder) {
  ModulatedLadder out = ladder;
  out.modulation = ModulationSpec::off(ladder.order());
  return out;
}

}  // namespace tmfa
