#pragma once

#include <stdexcept>
#include <string>

namespace plate {

/// Violated precondition on a public entry point (bad grid, negative coefficient, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Conjugate-gradient iteration cap exceeded or breakdown.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Explicit term exceeded the blow-up guard or produced non-finite samples.
class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace plate
