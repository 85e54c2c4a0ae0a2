#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tmfa/constants.hpp"
#include "tmfa/errors.hpp"

namespace tmfa {

/// Dense row-major matrix, just big enough for the block systems here.
template <class T>
struct DenseMatrix {
  int n = 0;
  std::vector<T> a;

  explicit DenseMatrix(int n = 0) : n(n), a(static_cast<size_t>(n) * static_cast<size_t>(n)) {}

  T& operator()(int r, int c) { return a[static_cast<size_t>(r) * n + c]; }
  const T& operator()(int r, int c) const { return a[static_cast<size_t>(r) * n + c]; }
};

using CMatrix = DenseMatrix<cplx>;
using RMatrix = DenseMatrix<double>;

/// In-place LU with partial pivoting; pivot = largest magnitude in the
/// column, ties broken by the lowest row index so repeated runs factor
/// identically. Throws SolverError when the best pivot is numerically zero.
///
/// context_hz tags errors with the drive frequency being solved.
template <class T>
inline void lu_factor(DenseMatrix<T>& m, std::vector<int>& perm, double context_hz = 0.0) {
  const int n = m.n;
  perm.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;

  for (int col = 0; col < n; ++col) {
    int best = col;
    double best_mag = std::abs(m(col, col));
    for (int r = col + 1; r < n; ++r) {
      double mag = std::abs(m(r, col));
      if (mag > best_mag) {
        best_mag = mag;
        best = r;
      }
    }
    if (!(best_mag > 0.0) || !std::isfinite(best_mag))
      throw SolverError("linear solve: singular pivot at column " + std::to_string(col),
                        context_hz, col);
    if (best != col) {
      for (int c = 0; c < n; ++c) std::swap(m(col, c), m(best, c));
      std::swap(perm[static_cast<size_t>(col)], perm[static_cast<size_t>(best)]);
    }
    const T inv_piv = T{1.0} / m(col, col);
    for (int r = col + 1; r < n; ++r) {
      T f = m(r, col) * inv_piv;
      m(r, col) = f;
      if (f == T{}) continue;
      for (int c = col + 1; c < n; ++c) m(r, c) -= f * m(col, c);
    }
  }
}

/// Non-allocating variant for hot loops; x is resized to match b.
template <class T>
inline void lu_solve_factored(const DenseMatrix<T>& lu, const std::vector<int>& perm,
                              const std::vector<T>& b, std::vector<T>& x) {
  const int n = lu.n;
  x.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = b[static_cast<size_t>(perm[static_cast<size_t>(i)])];
  for (int r = 1; r < n; ++r) {
    T s = x[static_cast<size_t>(r)];
    for (int c = 0; c < r; ++c) s -= lu(r, c) * x[static_cast<size_t>(c)];
    x[static_cast<size_t>(r)] = s;
  }
  for (int r = n - 1; r >= 0; --r) {
    T s = x[static_cast<size_t>(r)];
    for (int c = r + 1; c < n; ++c) s -= lu(r, c) * x[static_cast<size_t>(c)];
    x[static_cast<size_t>(r)] = s / lu(r, r);
  }
}

template <class T>
inline std::vector<T> lu_solve_factored(const DenseMatrix<T>& lu, const std::vector<int>& perm,
                                        const std::vector<T>& b) {
  std::vector<T> x;
  lu_solve_factored(lu, perm, b, x);
  return x;
}

/// Solves A x = b by LU with partial pivoting, then verifies the residual
/// max|Ax-b| / max|b| against residual_tol (skipped when tol <= 0).
template <class T>
inline std::vector<T> solve_dense(const DenseMatrix<T>& a, const std::vector<T>& b,
                                  double residual_tol = 1e-10, double context_hz = 0.0) {
  if (a.n != static_cast<int>(b.size()))
    throw std::domain_error("linear solve: dimension mismatch");
  DenseMatrix<T> lu = a;
  std::vector<int> perm;
  lu_factor(lu, perm, context_hz);
  std::vector<T> x = lu_solve_factored(lu, perm, b);

  if (residual_tol > 0.0) {
    double bnorm = 0.0, rnorm = 0.0;
    for (const auto& v : b) bnorm = std::max(bnorm, std::abs(v));
    if (bnorm == 0.0) bnorm = 1.0;
    for (int r = 0; r < a.n; ++r) {
      T s = -b[static_cast<size_t>(r)];
      for (int c = 0; c < a.n; ++c) s += a(r, c) * x[static_cast<size_t>(c)];
      rnorm = std::max(rnorm, std::abs(s));
    }
    if (!(rnorm / bnorm <= residual_tol))
      throw SolverError("linear solve: residual " + std::to_string(rnorm / bnorm) +
                            " exceeds tolerance " + std::to_string(residual_tol),
                        context_hz);
  }
  return x;
}

}  // namespace tmfa
