#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace tmfa {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Speed of light in vacuum, m/s.
inline constexpr double c0 = 299792458.0;

/// Free-space wave impedance, ohms.
inline constexpr double eta0 = 376.730313668;

inline constexpr cplx j1i{0.0, 1.0};

inline double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

/// Amplitude ratio to decibels.
inline double db20(double x) { return 20.0 * std::log10(x); }
inline double db20(cplx x) { return 20.0 * std::log10(std::abs(x)); }

/// Power ratio to decibels.
inline double db10(double x) { return 10.0 * std::log10(x); }

inline double undb20(double db) { return std::pow(10.0, db / 20.0); }
inline double undb10(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace tmfa
