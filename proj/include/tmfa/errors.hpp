#pragma once

#include <stdexcept>
#include <string>

namespace tmfa {

/// Raised when a synthesized element value comes out non-physical
/// (narrowband closed forms pushed outside their validity range).
class SynthesisError : public std::runtime_error {
 public:
  explicit SynthesisError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by the harmonic-balance engine: singular or ill-conditioned
/// system, or a harmonic frequency collapsing onto DC. Carries the
/// drive frequency and, for pivot failures, the offending pivot index.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double frequency_hz, int pivot_index = -1)
      : std::runtime_error(what), frequency_hz(frequency_hz), pivot_index(pivot_index) {}

  double frequency_hz;
  int pivot_index;
};

/// Raised by the time-domain engine when the state blows up or the
/// steady-state settling metric stays above threshold.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time_s)
      : std::runtime_error(what), time_s(time_s) {}

  double time_s;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved_rel_error)
      : std::runtime_error(what + ", achieved relative error " +
                           std::to_string(achieved_rel_error)),
        achieved_rel_error(achieved_rel_error) {}

  double achieved_rel_error;
};

}  // namespace tmfa
