#pragma once

#include <vector>

#include "plate/integrator.hpp"

namespace plate {

/// Parts of the energy E and of the Lyapunov functional
/// L = E + int G(u) + F(|grad u|^2)/2 - int h u.
struct EnergyBreakdown {
  double kinetic = 0.0;
  double bending = 0.0;
  double potential = 0.0;
  double local = 0.0;
  double nonlocal = 0.0;
  double forcing = 0.0;
  double E = 0.0;
  double L = 0.0;
};

/// Kinetic, bending and potential parts only; the nonlinear and forcing parts stay zero.
EnergyBreakdown energy_E(const StateD& s, const Scenario& sc);
EnergyBreakdown lyapunov_L(const StateD& s, const Scenario& sc);

/// D = int alpha v^2 + face-sum of beta |grad v|^2; D = 0 exactly when the damping sees no motion.
double dissipation(const StateD& s, const Scenario& sc);

struct ResidualSeries {
  /// rho_n = L(t_{n+1}) - L(t_n) + dt D(t_{n+1})
  std::vector<double> residuals;
  double max_abs = 0.0;
  /// max_abs / max(1, L(0))
  double normalized = 0.0;
};

/// Needs L and D at every step: either tracked balance or stride-1 "L" and "D" columns.
ResidualSeries energy_balance_residual(const TrajectoryRecord& traj, const Scenario& sc);

/// series[r][sample] of tail_norm over the recorded snapshots.
std::vector<std::vector<double>> tail_series(const TrajectoryRecord& traj, const std::vector<double>& radii);

struct QuotientSeries {
  std::vector<double> times;
  std::vector<double> energy;
};

/// E of the pair (w, dw/dt) where w = (u(t + sigma) - u(t)) / sigma and dw/dt is its
/// forward difference over one sampling interval. sigma must be a multiple of stride * dt.
QuotientSeries difference_quotient_energy(const TrajectoryRecord& traj, const Scenario& sc, double sigma);

// Observer factories for evolve.
Observer energy_observer();
Observer lyapunov_observer();
Observer dissipation_observer();
Observer phase_norm_observer();
/// Precomputes the cutoff for radius r; name "tail_r=<r>".
Observer tail_observer(const GridD& grid, double r);

}  // namespace plate
