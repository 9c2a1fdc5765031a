#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "plate/model.hpp"

namespace plate {

/// Diagnostics of one IMEX step.
struct StepReport {
  int cg_iterations = 0;
  double cg_residual = 0.0;
  /// |f(|grad u|) lap u|_L2 at the old level.
  double kirchhoff_norm = 0.0;
  /// |g(u)|_L2 at the old level.
  double g_norm = 0.0;
  /// E at the new level.
  double energy = 0.0;
};

/// Explicit terms larger than this halt the run.
inline constexpr double blow_up_threshold = 1e8;

/// One IMEX-Euler step: stiff linear part implicit, nonlocal and local nonlinearities,
/// and forcing explicit at the old level. Assumes the scenario was admitted.
std::pair<StateD, StepReport> step(const StateD& s, const Scenario& sc);

struct Observer {
  std::string name;
  std::function<double(const StateD&, const Scenario&)> fn;
};

struct EvolveOptions {
  std::vector<Observer> observers;
  /// Observers and snapshots are sampled every `stride` steps (and at the last step).
  int stride = 1;
  bool keep_snapshots = false;
  /// Record L and D at every step for the energy-balance residual.
  bool track_balance = false;
  /// Keep one StepReport per step.
  bool keep_step_reports = false;
};

/// Sampled observer values of one run, plus optional snapshots and per-step L, D.
struct TrajectoryRecord {
  std::uint64_t config_hash = 0;
  double dt = 0.0;
  int stride = 1;
  std::vector<double> times;
  std::vector<long> steps;
  std::vector<std::string> observer_names;
  /// values[sample][observer]
  std::vector<std::vector<double>> values;
  std::vector<StateD> snapshots;
  /// Per-step Lyapunov functional and dissipation (index = step), when tracked.
  std::vector<double> lyapunov;
  std::vector<double> dissipation;
  std::vector<StepReport> step_reports;
  std::optional<StateD> terminal;
  std::vector<std::string> waived_rules;

  std::vector<double> column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

/// Carries the partial record of a run that failed at `failed_step`.
class EvolveError : public std::runtime_error {
 public:
  EvolveError(const std::string& what, long failed_step, TrajectoryRecord partial, bool blow_up)
      : std::runtime_error(what), failed_step_(failed_step), partial_(std::move(partial)), blow_up_(blow_up) {}

  long failed_step() const noexcept { return failed_step_; }
  const TrajectoryRecord& partial() const noexcept { return partial_; }
  bool blow_up() const noexcept { return blow_up_; }

 private:
  long failed_step_;
  TrajectoryRecord partial_;
  bool blow_up_;
};

/// Number of steps needed to reach t >= horizon.
long steps_for_horizon(double horizon, double dt);

/// Repeated step from s0 up to t >= horizon. Admits the scenario first (throws on
/// hypothesis violations unless overridden); step failures raise EvolveError.
TrajectoryRecord evolve(const StateD& s0, const Scenario& sc, double horizon, const EvolveOptions& options);

struct DependenceReport {
  double initial_distance = 0.0;
  double sup_distance = 0.0;
  double final_distance = 0.0;
  /// sup_distance / initial_distance.
  double amplification = 0.0;
  std::vector<double> times;
  std::vector<double> distances;
};

/// Twin trajectories from s0 and s0 + (du, dv), compared in H2 x L2 every `stride` steps.
DependenceReport continuous_dependence(const StateD& s0, const FieldD& du, const FieldD& dv, const Scenario& sc,
                                       double horizon, int stride = 1);

}  // namespace plate
