#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plate/model.hpp"

namespace plate {

struct StationaryResult {
  FieldD phi;
  /// |r(phi)|_L2 of the returned iterate.
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Line search could not reduce the residual further.
  bool stalled = false;
  std::string guess_tag;
};

/// r(phi) = gamma bilap phi + lambda phi - f(|grad phi|) lap phi + g(phi) - h.
FieldD stationary_residual(const FieldD& phi, const Scenario& sc);

/// Jacobian of the stationary residual at phi applied to w. The Kirchhoff rank-one term
/// (f'(z)/z) <lap phi, w> lap phi is dropped when z = |grad phi| <= 1e-12.
FieldD stationary_jacobian(const FieldD& phi, const FieldD& w, const Scenario& sc);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 50;
  /// Relative residual of the inner Krylov solve (tightened near convergence).
  double inner_tol = 1e-8;
};

/// Damped Newton with CG inner solves and backtracking on |r|.
StationaryResult solve_stationary(const Scenario& sc, const FieldD& guess, const NewtonOptions& opts = {},
                                  const std::string& tag = "");

/// Zero guess plus `random_guesses` seeded low-pass guesses of H2 norm `amplitude`;
/// converged results deduplicated at H2 distance `dedup_distance`.
std::vector<StationaryResult> find_stationary_set(const Scenario& sc, int random_guesses, std::uint64_t seed,
                                                  double amplitude, const NewtonOptions& opts = {},
                                                  double dedup_distance = 1e-6);

/// min over candidates of |(u - phi, v)|_{H2 x L2}.
double distance_to_N(const StateD& s, const std::vector<StationaryResult>& candidates);

}  // namespace plate
