#pragma once

#include <cmath>
#include <vector>

#include "tmfa/constants.hpp"
#include "tmfa/filter_spec.hpp"

namespace tmfa {

/// Lowpass prototype of an equal-ripple bandpass design, bundled with the
/// coupling coefficients and external Q that realize it at fractional
/// bandwidth fbw.
struct PrototypeValues {
  double ripple_db = 0.0;  ///< passband ripple implied by the return loss
  std::vector<double> g;   ///< g0 .. g_{n+1}
  std::vector<double> k;   ///< inter-resonator couplings k_{i,i+1}, size n-1
  double qe = 0.0;         ///< external quality factor, both ports
};

/// Equal-ripple prototype from a return-loss spec.
///
/// The ripple follows from energy conservation on the ripple line,
/// ripple = -10*log10(1 - 10^(-rl/10)), and the g-values from the
/// standard closed-form recursion for Chebyshev responses.
inline PrototypeValues chebyshev_prototype(const FilterSpec& spec) {
  spec.validate();
  const int n = spec.order;

  PrototypeValues proto;
  proto.ripple_db = -10.0 * std::log10(1.0 - std::pow(10.0, -spec.rl_db / 10.0));

  const double eps = std::sqrt(std::pow(10.0, proto.ripple_db / 10.0) - 1.0);
  const double gamma = std::sinh(std::asinh(1.0 / eps) / n);

  std::vector<double> a(static_cast<size_t>(n) + 1), b(static_cast<size_t>(n) + 1);
  for (int i = 1; i <= n; ++i) {
    a[i] = std::sin((2.0 * i - 1.0) * pi / (2.0 * n));
    b[i] = gamma * gamma + std::pow(std::sin(i * pi / n), 2);
  }

  proto.g.assign(static_cast<size_t>(n) + 2, 0.0);
  proto.g[0] = 1.0;
  proto.g[1] = 2.0 * a[1] / gamma;
  for (int i = 2; i <= n; ++i)
    proto.g[static_cast<size_t>(i)] =
        4.0 * a[i - 1] * a[i] / (b[i - 1] * proto.g[static_cast<size_t>(i) - 1]);

  if (n % 2 == 1) {
    proto.g[static_cast<size_t>(n) + 1] = 1.0;
  } else {
    const double beta = 2.0 * std::asinh(1.0 / eps);
    const double coth = std::cosh(beta / 4.0) / std::sinh(beta / 4.0);
    proto.g[static_cast<size_t>(n) + 1] = coth * coth;
  }

  proto.k.resize(static_cast<size_t>(n) - 1);
  for (int i = 0; i < n - 1; ++i)
    proto.k[static_cast<size_t>(i)] =
        spec.fbw / std::sqrt(proto.g[static_cast<size_t>(i) + 1] * proto.g[static_cast<size_t>(i) + 2]);
  proto.qe = proto.g[0] * proto.g[1] / spec.fbw;
  return proto;
}

}  // namespace tmfa
