#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace tmfa {

/// Downhill-simplex settings. Coefficients follow the common convention;
/// the defaults are the textbook ones.
struct SimplexConfig {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  int max_iterations = 500;
  double spread_tolerance = 1e-10;      ///< max-min objective over vertices
  double vertex_tolerance = 1e-9;       ///< max coordinate distance between vertices
  std::vector<double> initial_step;     ///< per-coordinate simplex edge; scalar fallback below
  double default_step = 0.05;
  std::uint64_t seed = 0;               ///< non-zero adds deterministic jitter to the initial steps

  void validate(size_t dim) const {
    if (!(expansion > reflection) || !(reflection >= 1.0))
      throw std::domain_error("simplex: need expansion > reflection >= 1");
    if (!(contraction > 0.0) || !(contraction < 1.0))
      throw std::domain_error("simplex: need 0 < contraction < 1");
    if (!(shrink > 0.0) || !(shrink < 1.0))
      throw std::domain_error("simplex: need 0 < shrink < 1");
    if (max_iterations < 1) throw std::domain_error("simplex: max_iterations must be >= 1");
    if (!(vertex_tolerance >= 0.0))
      throw std::domain_error("simplex: vertex_tolerance must be >= 0");
    if (!initial_step.empty() && initial_step.size() != dim)
      throw std::domain_error("simplex: initial_step size must match dimension");
  }
};

struct SimplexResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::vector<double> best_trace;  ///< best-so-far objective per iteration, non-increasing
};

namespace nm_detail {

/// splitmix64, used only to derive reproducible step jitter from a seed.
inline std::uint64_t mix64(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double sanitize(double v) {
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace nm_detail

/// Derivative-free minimization of fn over R^dim starting at x0.
///
/// Deterministic: vertex ordering is stable, non-finite objective values
/// are treated as +infinity, and no randomness enters unless a seed
/// requests jittered initial steps (also reproducible). The best vertex
/// never regresses, so best_trace is non-increasing; if the start is
/// already the minimum the returned x is bitwise the input.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                                 const std::vector<double>& x0, const SimplexConfig& cfg = {}) {
  const size_t dim = x0.size();
  if (dim == 0) throw std::domain_error("simplex: empty start point");
  cfg.validate(dim);

  std::vector<std::vector<double>> vx(dim + 1, x0);
  std::uint64_t rng = cfg.seed;
  for (size_t i = 0; i < dim; ++i) {
    double step = cfg.initial_step.empty() ? cfg.default_step : cfg.initial_step[i];
    if (cfg.seed != 0) {
      double jitter = 0.9 + 0.2 * (nm_detail::mix64(rng) >> 11) * 0x1.0p-53;
      step *= jitter;
    }
    vx[i + 1][i] += step;
  }

  std::vector<double> fv(dim + 1);
  for (size_t i = 0; i <= dim; ++i) fv[i] = nm_detail::sanitize(fn(vx[i]));

  std::vector<size_t> order(dim + 1);
  SimplexResult res;
  auto sort_vertices = [&] {
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return fv[a] < fv[b]; });
  };

  for (int it = 0; it < cfg.max_iterations; ++it) {
    sort_vertices();
    res.iterations = it + 1;
    res.best_trace.push_back(fv[order[0]]);

    // Both criteria matter: equal values alone can mean vertices that merely
    // straddle a minimum symmetrically.
    double spread = fv[order[dim]] - fv[order[0]];
    if (std::isfinite(spread) && spread <= cfg.spread_tolerance) {
      double extent = 0.0;
      for (size_t i = 0; i <= dim; ++i)
        for (size_t d = 0; d < dim; ++d)
          extent = std::max(extent, std::fabs(vx[i][d] - vx[order[0]][d]));
      if (extent <= cfg.vertex_tolerance) {
        res.converged = true;
        break;
      }
    }

    const size_t iw = order[dim];
    std::vector<double> centroid(dim, 0.0);
    for (size_t i = 0; i <= dim; ++i) {
      if (i == iw) continue;
      for (size_t d = 0; d < dim; ++d) centroid[d] += vx[i][d];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto along = [&](double coeff) {
      std::vector<double> p(dim);
      for (size_t d = 0; d < dim; ++d) p[d] = centroid[d] + coeff * (centroid[d] - vx[iw][d]);
      return p;
    };

    auto xr = along(cfg.reflection);
    double fr = nm_detail::sanitize(fn(xr));

    if (fr < fv[order[0]]) {
      auto xe = along(cfg.expansion);
      double fe = nm_detail::sanitize(fn(xe));
      if (fe < fr) {
        vx[iw] = std::move(xe);
        fv[iw] = fe;
      } else {
        vx[iw] = std::move(xr);
        fv[iw] = fr;
      }
    } else if (fr < fv[order[dim - 1]]) {
      vx[iw] = std::move(xr);
      fv[iw] = fr;
    } else {
      bool outside = fr < fv[iw];
      auto xc = along(outside ? cfg.reflection * cfg.contraction : -cfg.contraction);
      double fc = nm_detail::sanitize(fn(xc));
      if (fc < std::min(fr, fv[iw])) {
        vx[iw] = std::move(xc);
        fv[iw] = fc;
      } else {
        const auto& best = vx[order[0]];
        for (size_t i = 0; i <= dim; ++i) {
          if (i == order[0]) continue;
          for (size_t d = 0; d < dim; ++d)
            vx[i][d] = best[d] + cfg.shrink * (vx[i][d] - best[d]);
          fv[i] = nm_detail::sanitize(fn(vx[i]));
        }
      }
    }
  }

  sort_vertices();
  if (!res.best_trace.empty() && fv[order[0]] <= res.best_trace.back())
    res.best_trace.push_back(fv[order[0]]);
  res.x = vx[order[0]];
  res.value = fv[order[0]];
  return res;
}

/// Smooth bijection between the real line and a bounded interval, used to
/// hand box constraints to the unconstrained simplex.
struct BoundedMap {
  double lo = 0.0;
  double hi = 1.0;

  double to_bounded(double u) const { return lo + (hi - lo) / (1.0 + std::exp(-u)); }
  double to_unbounded(double x) const {
    double t = std::clamp((x - lo) / (hi - lo), 1e-12, 1.0 - 1e-12);
    return std::log(t / (1.0 - t));
  }
};

}  // namespace tmfa
