#include "plate/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "plate/norms.hpp"
#include "plate/sampling.hpp"

namespace plate {

namespace {

constexpr double kink_threshold = 1e-12;

/// Quantities frozen at the linearisation point.
struct Linearization {
  FieldD lap_phi;
  FieldD g_prime;
  double f_value;
  double rank_one;  // f'(z) / z, or 0 at the kink
};

Linearization linearize(const FieldD& phi, const Scenario& sc) {
  const double z = std::sqrt(compact_gradient_norm_sq(phi));
  const auto& nl = sc.nonlinearity;
  return {laplacian(phi), g_prime_apply(nl, phi), nl.f.f(z), z > kink_threshold ? nl.f.df(z) / z : 0.0};
}

FieldD apply_jacobian(const Linearization& lin, const FieldD& w, const Scenario& sc) {
  const FieldD lap_w = laplacian(w);
  FieldD out = laplacian(lap_w);
  out.values() = sc.gamma * out.values() + sc.lambda * w.values() - lin.f_value * lap_w.values() +
                 (lin.g_prime.values().array() * w.values().array()).matrix();
  if (lin.rank_one != 0.0) out.values() += (lin.rank_one * inner(lin.lap_phi, w)) * lin.lap_phi.values();
  return out;
}

double residual_norm(const FieldD& phi, const Scenario& sc) {
  return norm(stationary_residual(phi, sc), NormKind::L2);
}

}  // namespace

FieldD stationary_residual(const FieldD& phi, const Scenario& sc) {
  phi.require_same_grid(sc.forcing);
  const FieldD lap = laplacian(phi);
  const double z = std::sqrt(compact_gradient_norm_sq(phi));
  const double fz = sc.nonlinearity.f.f(z);
  FieldD out = laplacian(lap);
  out.values() = sc.gamma * out.values() + sc.lambda * phi.values() - fz * lap.values() +
                 g_apply(sc.nonlinearity, phi).values() - sc.forcing.values();
  return out;
}

FieldD stationary_jacobian(const FieldD& phi, const FieldD& w, const Scenario& sc) {
  phi.require_same_grid(w);
  return apply_jacobian(linearize(phi, sc), w, sc);
}

StationaryResult solve_stationary(const Scenario& sc, const FieldD& guess, const NewtonOptions& opts,
                                  const std::string& tag) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("stationary tolerance must be positive");
  guess.require_same_grid(sc.forcing);
  require_finite(guess, "stationary guess");

  StationaryResult res{guess};
  res.guess_tag = tag;
  FieldD r = stationary_residual(res.phi, sc);
  res.residual = norm(r, NormKind::L2);
  const long cap = 10L * static_cast<long>(sc.grid.size());

  while (res.residual > opts.tol && res.iterations < opts.max_iter) {
    const Linearization lin = linearize(res.phi, sc);
    auto jac = [&](const FieldD& w) { return apply_jacobian(lin, w, sc); };
    // Tighten the inner solve so a single step can land inside the outer tolerance.
    const double inner = std::clamp(0.1 * opts.tol / res.residual, 1e-14, opts.inner_tol);
    const FieldD rhs = -r;
    auto cg = conjugate_gradient<double>(jac, rhs, inner, cap);
    if (cg.status == CgStatus::indefinite) {
      // J is symmetric, so the normal equations read J^2 d = -J r.
      auto jac2 = [&](const FieldD& w) { return jac(jac(w)); };
      cg = conjugate_gradient<double>(jac2, jac(rhs), inner, cap);
    }
    const FieldD& direction = cg.solution;

    double step = 1.0;
    bool accepted = false;
    FieldD trial = res.phi;
    double trial_norm = std::numeric_limits<double>::infinity();
    while (step >= 1.0 / 1048576.0) {
      trial.values() = res.phi.values() + step * direction.values();
      try {
        trial_norm = residual_norm(trial, sc);
      } catch (const BlowUpError&) {
        trial_norm = std::numeric_limits<double>::infinity();
      }
      if (std::isfinite(trial_norm) && trial_norm <= (1.0 - 1e-4 * step) * res.residual) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++res.iterations;
    if (!accepted) {
      res.stalled = true;
      break;
    }
    res.phi = trial;
    r = stationary_residual(res.phi, sc);
    res.residual = norm(r, NormKind::L2);
  }
  res.converged = res.residual <= opts.tol;
  return res;
}

std::vector<StationaryResult> find_stationary_set(const Scenario& sc, int random_guesses, std::uint64_t seed,
                                                  double amplitude, const NewtonOptions& opts,
                                                  double dedup_distance) {
  if (random_guesses < 0) throw InvalidArgument("guess count must be nonnegative");
  std::vector<StationaryResult> found;
  auto consider = [&](StationaryResult r) {
    if (!r.converged) return;
    for (const auto& f : found)
      if (norm(f.phi - r.phi, NormKind::H2) <= dedup_distance) return;
    found.push_back(std::move(r));
  };
  std::vector<std::future<StationaryResult>> solves;
  solves.push_back(std::async(std::launch::async, [&] { return solve_stationary(sc, FieldD(sc.grid), opts, "zero"); }));
  for (int i = 0; i < random_guesses; ++i) {
    solves.push_back(std::async(std::launch::async, [&, i] {
      FieldD guess = random_lowpass_field(sc.grid, derive_seed(seed, static_cast<std::uint64_t>(i)));
      const double n = norm(guess, NormKind::H2);
      if (n > 0.0) guess *= amplitude / n;
      return solve_stationary(sc, guess, opts, "random-" + std::to_string(i));
    }));
  }
  for (auto& f : solves) consider(f.get());
  return found;
}

double distance_to_N(const StateD& s, const std::vector<StationaryResult>& candidates) {
  if (candidates.empty()) throw InvalidArgument("distance_to_N needs at least one stationary point");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) best = std::min(best, phase_norm(s.u - c.phi, s.v));
  return best;
}

}  // namespace plate
