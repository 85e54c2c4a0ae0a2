#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "tmfa/chebyshev.hpp"
#include "tmfa/errors.hpp"
#include "tmfa/ladder.hpp"

namespace tmfa {

/// Realizes the prototype as a lumped ladder: parallel-LC resonators to
/// ground, series capacitors as coupling inverters, series capacitors to
/// the 50-ohm ports for the external coupling.
///
/// Narrowband closed forms seed the element values; each node's static
/// capacitor is reduced by the loading of its series neighbors so the node
/// resonates at f0 with total capacitance c_res and l = 1/(w0^2 * c_res).
/// These are starting values, the equal-ripple tuner owns the final ones.
///
/// q_u is the resonator unloaded Q; pass infinity for lossless.
inline ModulatedLadder realize_ladder(const PrototypeValues& proto, const FilterSpec& spec,
                                      double c_res = 0.86e-12, double q_u = 200.0) {
  spec.validate();
  if (!(c_res > 0.0)) throw std::domain_error("synthesis: c_res must be > 0");
  if (!(q_u > 0.0)) throw std::domain_error("synthesis: q_u must be > 0");
  const int n = spec.order;
  if (proto.g.size() != static_cast<size_t>(n) + 2 ||
      proto.k.size() != static_cast<size_t>(n) - 1)
    throw std::domain_error("synthesis: prototype does not match spec order");

  const double w0 = two_pi * spec.f0_hz;

  ModulatedLadder ladder;
  ladder.f0_hz = spec.f0_hz;
  ladder.source = Termination(cplx(spec.z0_ohm, 0.0));
  ladder.load = Termination(cplx(spec.z0_ohm, 0.0));
  ladder.modulation = ModulationSpec::off(n);

  const double c_ext = std::sqrt(c_res / (w0 * spec.z0_ohm * proto.qe));
  if (c_ext >= c_res)
    throw SynthesisError("synthesis: external capacitor " + std::to_string(c_ext * 1e12) +
                         " pF exceeds resonator budget " + std::to_string(c_res * 1e12) +
                         " pF; qe too low for this c_res");
  // What the resonator node actually sees from the series external capacitor
  // plus the port resistance (series-to-parallel transform at f0).
  const double x = w0 * c_ext * spec.z0_ohm;
  const double c_ext_shunt = c_ext / (1.0 + x * x);

  ladder.c_couple_farad.resize(static_cast<size_t>(n) - 1);
  for (int i = 0; i < n - 1; ++i)
    ladder.c_couple_farad[static_cast<size_t>(i)] = proto.k[static_cast<size_t>(i)] * c_res;

  const double g_loss = std::isinf(q_u) ? 0.0 : w0 * c_res / q_u;
  ladder.c0_farad.resize(static_cast<size_t>(n));
  ladder.l_henry.assign(static_cast<size_t>(n), 1.0 / (w0 * w0 * c_res));
  ladder.g_loss_siemens.assign(static_cast<size_t>(n), g_loss);
  for (int i = 0; i < n; ++i) {
    double c = c_res;
    if (i > 0) c -= ladder.c_couple_farad[static_cast<size_t>(i) - 1];
    if (i < n - 1) c -= ladder.c_couple_farad[static_cast<size_t>(i)];
    if (i == 0) c -= c_ext_shunt;
    if (i == n - 1) c -= c_ext_shunt;
    if (!(c > 0.0))
      throw SynthesisError("synthesis: absorbed capacitance at resonator " + std::to_string(i + 1) +
                           " is non-positive; couplings too strong for c_res");
    ladder.c0_farad[static_cast<size_t>(i)] = c;
  }
  ladder.c_ext_in_farad = c_ext;
  ladder.c_ext_out_farad = c_ext;

  ladder.validate();
  return ladder;
}

}  // namespace tmfa
