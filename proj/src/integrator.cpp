#include "plate/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "plate/energetics.hpp"
#include "plate/norms.hpp"

namespace plate {

std::vector<double> TrajectoryRecord::column(const std::string& name) const {
  const auto it = std::find(observer_names.begin(), observer_names.end(), name);
  if (it == observer_names.end()) throw InvalidArgument("trajectory has no observer '" + name + "'");
  const auto c = static_cast<std::size_t>(it - observer_names.begin());
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& row : values) out.push_back(row[c]);
  return out;
}

bool TrajectoryRecord::has_column(const std::string& name) const {
  return std::find(observer_names.begin(), observer_names.end(), name) != observer_names.end();
}

namespace {

std::pair<StateD, StepReport> step_with(const StateD& s, const Scenario& sc, const ImplicitOperatorSpec<double>& spec) {
  s.u.require_same_grid(sc.forcing);
  const double dt = sc.numerics.dt;
  StepReport rep;

  const FieldD lap_u = laplacian(s.u);
  const double grad_norm = std::sqrt(compact_gradient_norm_sq(s.u));
  const double fz = sc.nonlinearity.f.f(grad_norm);
  if (!std::isfinite(fz) || std::abs(fz) > blow_up_threshold)
    throw BlowUpError("blow-up guard: f(|grad u|) = " + std::to_string(fz));
  const FieldD gu = g_apply(sc.nonlinearity, s.u);
  rep.g_norm = norm(gu, NormKind::L2);
  if (!std::isfinite(rep.g_norm) || rep.g_norm > blow_up_threshold)
    throw BlowUpError("blow-up guard: |g(u)|_L2 = " + std::to_string(rep.g_norm));
  rep.kirchhoff_norm = std::abs(fz) * norm(lap_u, NormKind::L2);

  // rhs = v + dt * (f lap u - g(u) + h - (gamma bilap u + lambda u))
  FieldD rhs = laplacian(lap_u);
  rhs.values() = s.v.values() +
                 dt * (fz * lap_u.values() - gu.values() + sc.forcing.values() - sc.gamma * rhs.values() -
                       sc.lambda * s.u.values());
  if (!rhs.is_finite()) throw BlowUpError("blow-up guard: non-finite explicit term");

  auto cg = solve_spd(spec, rhs, sc.numerics.cg_tol);
  rep.cg_iterations = cg.iterations;
  rep.cg_residual = cg.residual;

  FieldD u_next = s.u;
  u_next.values() += dt * cg.solution.values();
  StateD next(std::move(u_next), std::move(cg.solution), s.t + dt);
  if (!next.u.is_finite() || !next.v.is_finite()) throw BlowUpError("blow-up guard: non-finite state");
  rep.energy = energy_E(next, sc).E;
  return {std::move(next), rep};
}

}  // namespace

std::pair<StateD, StepReport> step(const StateD& s, const Scenario& sc) {
  const auto spec = sc.implicit_spec();
  return step_with(s, sc, spec);
}

long steps_for_horizon(double horizon, double dt) {
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const double ratio = horizon / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) return std::max(1L, static_cast<long>(nearest));
  return static_cast<long>(std::ceil(ratio));
}

TrajectoryRecord evolve(const StateD& s0, const Scenario& sc, double horizon, const EvolveOptions& options) {
  if (options.stride < 1) throw InvalidArgument("observer stride must be at least one step");
  if (s0.grid() != sc.grid) throw InvalidArgument("initial state is not on the scenario grid");
  require_finite(s0.u, "initial displacement");
  require_finite(s0.v, "initial velocity");

  TrajectoryRecord rec;
  rec.waived_rules = admit_scenario(sc);
  rec.dt = sc.numerics.dt;
  rec.stride = options.stride;
  for (const auto& o : options.observers) rec.observer_names.push_back(o.name);

  const long n_steps = steps_for_horizon(horizon, sc.numerics.dt);
  const auto spec = sc.implicit_spec();

  auto sample = [&](const StateD& s, long n) {
    rec.times.push_back(s.t);
    rec.steps.push_back(n);
    std::vector<double> row;
    row.reserve(options.observers.size());
    for (const auto& o : options.observers) row.push_back(o.fn(s, sc));
    rec.values.push_back(std::move(row));
    if (options.keep_snapshots) rec.snapshots.push_back(s);
  };
  auto balance = [&](const StateD& s) {
    rec.lyapunov.push_back(lyapunov_L(s, sc).L);
    rec.dissipation.push_back(dissipation(s, sc));
  };

  StateD s = s0;
  sample(s, 0);
  if (options.track_balance) balance(s);
  if (options.keep_step_reports) rec.step_reports.reserve(static_cast<std::size_t>(n_steps));
  for (long n = 1; n <= n_steps; ++n) {
    try {
      auto [next, rep] = step_with(s, sc, spec);
      s = std::move(next);
      if (options.keep_step_reports) rec.step_reports.push_back(rep);
    } catch (const BlowUpError& e) {
      rec.terminal = s;
      throw EvolveError("step " + std::to_string(n) + ": " + e.what(), n, std::move(rec), true);
    } catch (const SolverError& e) {
      rec.terminal = s;
      throw EvolveError("step " + std::to_string(n) + ": " + e.what(), n, std::move(rec), false);
    }
    if (options.track_balance) balance(s);
    if (n % options.stride == 0 || n == n_steps) sample(s, n);
  }
  rec.terminal = std::move(s);
  return rec;
}

DependenceReport continuous_dependence(const StateD& s0, const FieldD& du, const FieldD& dv, const Scenario& sc,
                                       double horizon, int stride) {
  if (stride < 1) throw InvalidArgument("sampling stride must be at least one step");
  admit_scenario(sc);
  StateD a = s0;
  StateD b(s0.u + du, s0.v + dv, s0.t);
  const auto spec = sc.implicit_spec();
  DependenceReport rep;
  auto distance = [](const StateD& x, const StateD& y) { return phase_norm(x.u - y.u, x.v - y.v); };

  rep.initial_distance = distance(a, b);
  rep.sup_distance = rep.initial_distance;
  rep.times.push_back(a.t);
  rep.distances.push_back(rep.initial_distance);
  const long n_steps = steps_for_horizon(horizon, sc.numerics.dt);
  for (long n = 1; n <= n_steps; ++n) {
    a = step_with(a, sc, spec).first;
    b = step_with(b, sc, spec).first;
    if (n % stride == 0 || n == n_steps) {
      const double d = distance(a, b);
      rep.sup_distance = std::max(rep.sup_distance, d);
      rep.times.push_back(a.t);
      rep.distances.push_back(d);
    }
  }
  rep.final_distance = rep.distances.back();
  rep.amplification = rep.initial_distance > 0.0 ? rep.sup_distance / rep.initial_distance : 0.0;
  return rep;
}

}  // namespace plate
