#pragma once

#include <cmath>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "tmfa/constants.hpp"
#include "tmfa/errors.hpp"

namespace tmfa {

struct QuadratureOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-30;  ///< floor so near-zero integrals can still converge
  int max_depth = 32;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol >= 0.0))
      throw std::domain_error("quadrature: tolerances must be positive");
    if (max_depth < 1 || max_depth > 60)
      throw std::domain_error("quadrature: max_depth out of range");
  }
};

namespace quad_detail {

template <class V, class F>
struct SimpsonWorker {
  const F& f;
  double err_sum = 0.0;

  V recurse(double a, double m, double b, V fa, V fm, V fb, V whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const V flm = f(lm);
    const V frm = f(rm);
    const V left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const V right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const V refined = left + right;
    const double err = std::abs(refined - whole);
    if (err <= 15.0 * tol || depth <= 0) {
      err_sum += err / 15.0;
      return refined + (refined - whole) / 15.0;
    }
    return recurse(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           recurse(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace quad_detail

/// Adaptive Simpson integration of a real- or complex-valued integrand over
/// [a, b]. Throws QuadratureError with the achieved relative error when the
/// subdivision depth runs out before the tolerance is met.
template <class F>
auto adaptive_simpson(F&& f, double a, double b, const QuadratureOptions& opt = {})
    -> std::decay_t<decltype(f(a))> {
  using V = std::decay_t<decltype(f(a))>;
  opt.validate();
  if (!(b > a)) {
    if (b == a) return V{};
    throw std::domain_error("quadrature: need a <= b");
  }

  const double m = 0.5 * (a + b);
  const V fa = f(a);
  const V fm = f(m);
  const V fb = f(b);
  const V whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);

  quad_detail::SimpsonWorker<V, std::decay_t<F>> worker{f};
  const double tol0 = std::max(opt.abs_tol, opt.rel_tol * std::abs(whole));
  V result = worker.recurse(a, m, b, fa, fm, fb, whole, tol0, opt.max_depth);

  const double scale = std::max(std::abs(result), opt.abs_tol / opt.rel_tol);
  const double achieved = scale > 0.0 ? worker.err_sum / scale : 0.0;
  if (achieved > 8.0 * opt.rel_tol)
    throw QuadratureError("quadrature: subdivision exhausted", achieved);
  return result;
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
inline std::vector<std::pair<double, double>> gauss_legendre(int n) {
  if (n < 1) throw std::domain_error("quadrature: rule order must be >= 1");
  std::vector<std::pair<double, double>> rule(static_cast<size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule[static_cast<size_t>(i)] = {-x, w};
    rule[static_cast<size_t>(n - 1 - i)] = {x, w};
  }
  return rule;
}

}  // namespace tmfa
