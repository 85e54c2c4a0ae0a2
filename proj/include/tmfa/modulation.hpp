#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmfa/constants.hpp"

namespace tmfa {

/// Sinusoidal capacitance modulation shared by all resonators:
/// C_i(t) = C0_i * (1 + delta_m * cos(2*pi*fm*t + phase[i])).
struct ModulationSpec {
  double fm_hz = 0.0;            ///< modulation frequency
  double delta_m = 0.0;          ///< modulation depth, 0 disables
  std::vector<double> phase_rad; ///< per-resonator modulation phase

  bool enabled() const { return delta_m != 0.0 && fm_hz > 0.0; }

  void validate(int resonator_count) const {
    if (!(fm_hz >= 0.0)) throw std::domain_error("modulation: fm must be >= 0");
    if (!(delta_m >= 0.0) || !(delta_m < 1.0))
      throw std::domain_error("modulation: delta_m must lie in [0, 1), got " +
                              std::to_string(delta_m));
    if (delta_m > 0.0 && !(fm_hz > 0.0))
      throw std::domain_error("modulation: fm must be > 0 when delta_m > 0");
    if (phase_rad.size() != static_cast<size_t>(resonator_count))
      throw std::domain_error("modulation: phase list size must equal resonator count");
  }

  /// Progressive phasing phase[i] = i * delta_phi, the scheme that breaks
  /// transmit/receive symmetry.
  static ModulationSpec progressive(int resonator_count, double fm_hz, double delta_m,
                                    double delta_phi_rad) {
    ModulationSpec m;
    m.fm_hz = fm_hz;
    m.delta_m = delta_m;
    m.phase_rad.resize(static_cast<size_t>(resonator_count));
    for (int i = 0; i < resonator_count; ++i)
      m.phase_rad[static_cast<size_t>(i)] = i * delta_phi_rad;
    return m;
  }

  static ModulationSpec off(int resonator_count) {
    ModulationSpec m;
    m.phase_rad.assign(static_cast<size_t>(resonator_count), 0.0);
    return m;
  }
};

/// One time-varying capacitor.
struct CapacitorWaveform {
  double c0_farad = 0.0;
  double delta_m = 0.0;
  double fm_hz = 0.0;
  double phase_rad = 0.0;

  /// Instantaneous capacitance; positive for any t whenever delta_m < 1.
  double at(double t) const {
    return c0_farad * (1.0 + delta_m * std::cos(two_pi * fm_hz * t + phase_rad));
  }

  /// First Fourier coefficient c1 = C0 * delta_m / 2 * exp(j*phase);
  /// C(t) = C0 + c1 e^{j wm t} + conj(c1) e^{-j wm t}.
  cplx c1() const { return 0.5 * c0_farad * delta_m * std::polar(1.0, phase_rad); }
};

inline double capacitance_at(const CapacitorWaveform& w, double t) { return w.at(t); }

}  // namespace tmfa
