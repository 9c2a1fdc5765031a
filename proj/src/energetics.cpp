#include "plate/energetics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plate/norms.hpp"

namespace plate {

namespace {

void require_scenario_grid(const StateD& s, const Scenario& sc) {
  if (s.grid() != sc.grid) throw InvalidArgument("state is not on the scenario grid");
}

}  // namespace

EnergyBreakdown energy_E(const StateD& s, const Scenario& sc) {
  require_scenario_grid(s, sc);
  const double w = sc.grid.cell_volume();
  EnergyBreakdown e;
  e.kinetic = 0.5 * w * s.v.values().squaredNorm();
  e.bending = 0.5 * sc.gamma * w * laplacian(s.u).values().squaredNorm();
  e.potential = 0.5 * sc.lambda * w * s.u.values().squaredNorm();
  e.E = e.kinetic + e.bending + e.potential;
  e.L = e.E;
  return e;
}

EnergyBreakdown lyapunov_L(const StateD& s, const Scenario& sc) {
  EnergyBreakdown e = energy_E(s, sc);
  e.local = G_integral(sc.nonlinearity, s.u);
  e.nonlocal = 0.5 * F_value(sc.nonlinearity, compact_gradient_norm_sq(s.u));
  e.forcing = -inner(sc.forcing, s.u);
  e.L = e.E + e.local + e.nonlocal + e.forcing;
  return e;
}

double dissipation(const StateD& s, const Scenario& sc) {
  require_scenario_grid(s, sc);
  const double weak =
      sc.grid.cell_volume() * (sc.coefficients.alpha.values().array() * s.v.values().array().square()).sum();
  const double strong = face_form(s.v, s.v, sc.coefficients.beta);
  return weak + strong;
}

ResidualSeries energy_balance_residual(const TrajectoryRecord& traj, const Scenario& sc) {
  std::vector<double> L;
  std::vector<double> D;
  if (!traj.lyapunov.empty()) {
    L = traj.lyapunov;
    D = traj.dissipation;
  } else if (traj.stride == 1 && traj.has_column("L") && traj.has_column("D")) {
    L = traj.column("L");
    D = traj.column("D");
  } else {
    throw InvalidArgument("energy balance needs L and D at every step (stride 1 or tracked balance)");
  }
  const double dt = traj.dt > 0.0 ? traj.dt : sc.numerics.dt;
  ResidualSeries out;
  out.residuals.reserve(L.size());
  for (std::size_t n = 0; n + 1 < L.size(); ++n) {
    const double rho = L[n + 1] - L[n] + dt * D[n + 1];
    out.residuals.push_back(rho);
    out.max_abs = std::max(out.max_abs, std::abs(rho));
  }
  out.normalized = out.max_abs / std::max(1.0, L.empty() ? 0.0 : L.front());
  return out;
}

std::vector<std::vector<double>> tail_series(const TrajectoryRecord& traj, const std::vector<double>& radii) {
  if (traj.snapshots.empty() && !traj.times.empty())
    throw InvalidArgument("tail series needs recorded snapshots");
  std::vector<std::vector<double>> out;
  for (double r : radii) {
    std::vector<double> series;
    if (!traj.snapshots.empty()) {
      const FieldD eta = cutoff_eta(traj.snapshots.front().grid(), r);
      for (const auto& s : traj.snapshots) series.push_back(tail_norm(s.u, s.v, eta));
    }
    out.push_back(std::move(series));
  }
  return out;
}

QuotientSeries difference_quotient_energy(const TrajectoryRecord& traj, const Scenario& sc, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("difference-quotient lag must be positive");
  if (traj.snapshots.size() < 2) throw InvalidArgument("difference quotient needs recorded snapshots");
  const double tau = traj.dt * traj.stride;
  const double ratio = sigma / tau;
  const long lag = std::lround(ratio);
  if (lag < 1 || std::abs(ratio - static_cast<double>(lag)) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "lag " << sigma << " is not a positive multiple of the sampling interval " << tau;
    throw InvalidArgument(os.str());
  }
  const auto& snaps = traj.snapshots;
  QuotientSeries out;
  const auto n = static_cast<long>(snaps.size());
  const double w = sc.grid.cell_volume();
  for (long j = 0; j + lag + 1 < n; ++j) {
    // only uniformly spaced samples: skip a trailing partial stride
    if (traj.steps[j + lag + 1] - traj.steps[j] != (lag + 1) * traj.stride) continue;
    FieldD q = snaps[j + lag].u - snaps[j].u;
    q *= 1.0 / sigma;
    FieldD q_next = snaps[j + lag + 1].u - snaps[j + 1].u;
    q_next *= 1.0 / sigma;
    const FieldD rate = (1.0 / tau) * (q_next - q);
    const double e = 0.5 * w *
                     (rate.values().squaredNorm() + sc.gamma * laplacian(q).values().squaredNorm() +
                      sc.lambda * q.values().squaredNorm());
    out.times.push_back(traj.times[j]);
    out.energy.push_back(e);
  }
  return out;
}

Observer energy_observer() {
  return {"E", [](const StateD& s, const Scenario& sc) { return energy_E(s, sc).E; }};
}

Observer lyapunov_observer() {
  return {"L", [](const StateD& s, const Scenario& sc) { return lyapunov_L(s, sc).L; }};
}

Observer dissipation_observer() {
  return {"D", [](const StateD& s, const Scenario& sc) { return dissipation(s, sc); }};
}

Observer phase_norm_observer() {
  return {"norm", [](const StateD& s, const Scenario&) { return phase_norm(s); }};
}

Observer tail_observer(const GridD& grid, double r) {
  FieldD eta = cutoff_eta(grid, r);
  std::ostringstream name;
  name.precision(17);
  name << "tail_r=" << r;
  return {name.str(), [eta = std::move(eta)](const StateD& s, const Scenario&) { return tail_norm(s.u, s.v, eta); }};
}

}  // namespace plate
