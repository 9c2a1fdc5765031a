// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "plate/harness.hpp"
#include "plate/norms.hpp"

namespace fs = std::filesystem;
using namespace plate;

namespace {

const fs::path config_dir{PLATE_CONFIG_DIR};

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("platelab_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig load_run(const std::string& name, const std::function<void(nlohmann::json&)>& edit = {}) {
  auto cfg = load_config_file(config_dir / name);
  if (edit) edit(cfg);
  return build_run_config(cfg);
}

std::string kirchhoff_config(int dim) { return dim == 1 ? "kirchhoff_1d.json" : "kirchhoff_2d.json"; }

struct BalanceRun {
  double normalized = 0.0;
  double max_abs = 0.0;
  double max_increase = -1e300;
  double L0 = 0.0;
  double LT = 0.0;
};

BalanceRun balance_run(int dim, double dt) {
  const auto cfg = load_run(kirchhoff_config(dim));
  auto sc = cfg.scenario;
  sc.numerics.dt = dt;
  EvolveOptions opt;
  opt.track_balance = true;
  opt.stride = 1000000;
  const auto rec = evolve(make_initial_state(cfg).state, sc, 10.0, opt);
  const auto res = energy_balance_residual(rec, sc);
  BalanceRun out{res.normalized, res.max_abs};
  for (std::size_t n = 0; n + 1 < rec.lyapunov.size(); ++n)
    out.max_increase = std::max(out.max_increase, rec.lyapunov[n + 1] - rec.lyapunov[n]);
  out.L0 = rec.lyapunov.front();
  out.LT = rec.lyapunov.back();
  return out;
}

std::vector<BalanceRun>& balance_runs() {
  static std::vector<BalanceRun> runs;
  if (runs.empty())
    for (int dim : {1, 2})
      for (double dt : {1e-3, 5e-4}) runs.push_back(balance_run(dim, dt));
  return runs;
}

Verdict energy_equality() {
  Verdict v{true, ""};
  const auto& runs = balance_runs();
  for (int d = 0; d < 2; ++d) {
    const auto& coarse = runs[2 * d];
    const auto& fine = runs[2 * d + 1];
    const double reduction = coarse.max_abs / fine.max_abs;
    v.pass = v.pass && coarse.normalized <= 1e-2 && reduction >= 1.8;
    v.detail += "d=" + std::to_string(d + 1) + ": normalized residual " + fmt(coarse.normalized) + " (<= 1e-2), dt/2 reduction " +
                fmt(reduction) + " (>= 1.8); ";
  }
  return v;
}

Verdict lyapunov_monotonicity() {
  Verdict v{true, ""};
  const auto& runs = balance_runs();
  for (int d = 0; d < 2; ++d) {
    const auto& r = runs[2 * d];
    v.pass = v.pass && r.max_increase <= r.max_abs && r.LT <= r.L0;
    v.detail += "d=" + std::to_string(d + 1) + ": max step increase " + fmt(r.max_increase) + " (<= " + fmt(r.max_abs) +
                "), L(T) - L(0) = " + fmt(r.LT - r.L0) + "; ";
  }
  return v;
}

std::vector<StationaryResult> zero_forcing_set(const Scenario& sc) { return find_stationary_set(sc, 4, 17, 1.0); }

Verdict convergence_to_N() {
  const auto cfg = load_run("gradient_zero_forcing_1d.json");
  const auto set = zero_forcing_set(cfg.scenario);
  bool only_zero = set.size() == 1 && norm(set[0].phi, NormKind::H2) < 1e-9;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto s0 = sample_initial_data(cfg.scenario.grid, 1.0, derive_seed(seed, 0)).state;
    EvolveOptions opt;
    opt.stride = 1000000;
    const auto rec = evolve(s0, cfg.scenario, 200.0, opt);
    worst = std::max(worst, distance_to_N(*rec.terminal, set));
  }
  return {only_zero && worst <= 1e-4, "stationary set {0}: " + std::string(only_zero ? "yes" : "no") +
                                           ", max distance to N at T = 200 over 8 seeds " + fmt(worst) + " (<= 1e-4)"};
}

struct EnsembleData {
  double horizon = 0.0;
  std::vector<double> radii;
  EnsembleReport report;
};

const EnsembleData& absorption_ensemble() {
  static EnsembleData data;
  if (!data.report.members.empty()) return data;
  data.horizon = 40.0;
  const auto tmpl = load_run("kirchhoff_1d.json", [&](nlohmann::json& j) {
    j["run"]["horizon"] = data.horizon;
    j["run"]["stride"] = 100;
    j["run"].erase("sigmas");
  });
  data.radii = tmpl.radii;
  data.report = run_ensemble(tmpl, {1, 2, 3, 4, 5, 6, 7, 8}, scratch("ensemble"));
  return data;
}

Verdict uniform_absorption() {
  const auto& data = absorption_ensemble();
  const auto& rep = data.report;
  const auto& t = rep.times;
  const double T = data.horizon;
  double big_sup_late = 0.0, big_initial = 0.0;
  for (const auto& m : rep.members) {
    if (m.norm != 4.0) continue;
    const auto nrm = m.outcome.record.column("norm");
    big_initial = std::max(big_initial, nrm.front());
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] >= T / 2 - 1e-9) big_sup_late = std::max(big_sup_late, nrm[i]);
  }
  double lo = 1e300, hi = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < 0.75 * T - 1e-9) continue;
    lo = std::min(lo, rep.sup_norm[i]);
    hi = std::max(hi, rep.sup_norm[i]);
  }
  const double variation = (hi - lo) / hi;
  return {big_sup_late < big_initial && variation <= 0.05,
          "norm-4 sup on [T/2, T] " + fmt(big_sup_late) + " < initial " + fmt(big_initial) +
              ", ensemble-sup variation on [3T/4, T] " + fmt(variation) + " (<= 0.05)"};
}

Verdict tail_estimate() {
  const auto& data = absorption_ensemble();
  const auto& rep = data.report;
  const std::size_t far = data.radii.size() - 1;  // r = L/3
  const double initial = rep.sup_tail[far].front();
  const double final_ = rep.sup_tail[far].back();
  bool ordered = true;
  for (std::size_t t = 0; t < rep.times.size(); ++t)
    for (std::size_t r = 1; r < data.radii.size(); ++r)
      ordered = ordered && rep.sup_tail[r][t] <= rep.sup_tail[r - 1][t] * (1 + 1e-14);
  for (const auto& m : rep.members)
    for (const auto& row : m.outcome.record.values) {
      const auto& names = m.outcome.record.observer_names;
      double prev = 1e300;
      for (std::size_t c = 0; c < names.size(); ++c) {
        if (names[c].rfind("tail_r=", 0) != 0) continue;
        ordered = ordered && row[c] <= prev * (1 + 1e-14);
        prev = row[c];
      }
    }
  return {final_ <= 0.1 * initial && ordered, "sup tail at r = L/3: T " + fmt(final_) + " vs 0.1 x initial " +
                                                  fmt(0.1 * initial) + ", nonincreasing in r: " +
                                                  (ordered ? "yes" : "no")};
}

struct ProxyWindow {
  double sup = 0.0;
  double median = 0.0;
  double max_change = 0.0;
  double decay_rate = 0.0;
};

ProxyWindow proxy_window(int dim) {
  const auto cfg = load_run(kirchhoff_config(dim), [](nlohmann::json& j) { j["run"]["horizon"] = 10.0; });
  const double dt = cfg.scenario.numerics.dt, T = cfg.horizon;
  const double sigma = 10 * dt;
  EvolveOptions opt;
  opt.stride = 5;
  opt.keep_snapshots = true;
  const auto rec = evolve(make_initial_state(cfg).state, cfg.scenario, T, opt);
  const auto full = difference_quotient_energy(rec, cfg.scenario, sigma);
  const auto half = difference_quotient_energy(rec, cfg.scenario, sigma / 2);
  ProxyWindow out;
  std::vector<double> window, times;
  for (std::size_t i = 0; i < full.times.size(); ++i) {
    if (full.times[i] < T / 2 - 1e-9) continue;
    window.push_back(full.energy[i]);
    times.push_back(full.times[i]);
    out.sup = std::max(out.sup, full.energy[i]);
    out.max_change = std::max(out.max_change, std::abs(full.energy[i] - half.energy[i]) / full.energy[i]);
  }
  std::vector<double> sorted = window;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  out.median = sorted[sorted.size() / 2];
  // least-squares slope of log E over the window
  double st = 0, sl = 0, stt = 0, stl = 0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    const double l = std::log(window[i]);
    st += times[i], sl += l, stt += times[i] * times[i], stl += times[i] * l;
  }
  const double n = static_cast<double>(window.size());
  out.decay_rate = -(n * stl - st * sl) / (n * stt - st * st);
  return out;
}

Verdict regularity_proxy() {
  Verdict v{true, ""};
  for (int dim : {1, 2}) {
    const auto w = proxy_window(dim);
    v.pass = v.pass && w.sup <= 2 * w.median && w.max_change < 0.1;
    v.detail += "d=" + std::to_string(dim) + ": sup on [T/2, T] " + fmt(w.sup) + " vs 2 x median " + fmt(2 * w.median) +
                ", change under sigma/2 " + fmt(w.max_change) + " (< 0.1), fitted decay rate " + fmt(w.decay_rate) +
                "; ";
  }
  return v;
}

Verdict counterexample_mechanism() {
  const auto cfg = load_run("counterexample_mean_mode.json");
  const auto& sc = cfg.scenario;
  const double dt = sc.numerics.dt, lambda = sc.lambda, c = cfg.initial.u_value;
  const double omega = std::sqrt(lambda);
  const long steps = steps_for_horizon(cfg.horizon, dt);
  const oracle::ModeRecurrence rec{dt, 0.0, 1.0, sc.gamma, lambda, 0.0};
  StateD s = make_initial_state(cfg).state;
  double a = c, b = 0.0, max_dev = 0.0;
  const long per_period = std::lround(2 * std::numbers::pi / omega / dt);
  double first_peak = 0.0, last_peak = 0.0;
  for (long n = 1; n <= steps; ++n) {
    s = step(s, sc).first;
    std::tie(a, b) = rec.step(a, b);
    const double mean = s.u.values().mean();
    max_dev = std::max(max_dev, std::abs(mean - a));
    if (n <= per_period) first_peak = std::max(first_peak, std::abs(mean));
    if (n > steps - per_period) last_peak = std::max(last_peak, std::abs(mean));
  }
  const double periods = static_cast<double>(steps - per_period) * dt;
  const double measured_rate = std::log(first_peak / last_peak) / periods;
  const double scheme_rate = std::log1p(dt * dt * lambda) / (2 * dt);
  const double pde_rate = measured_rate - scheme_rate;
  const bool pass = max_dev <= 1e-10 && std::abs(pde_rate) <= 0.05 * scheme_rate;
  return {pass, "max deviation from recurrence " + fmt(max_dev) + " (<= 1e-10), decay rate " + fmt(measured_rate) +
                    " vs scheme-induced " + fmt(scheme_rate) + ", PDE part " + fmt(pde_rate)};
}

Verdict operator_correctness() {
  std::mt19937_64 rng(2026);
  double worst = 0.0;
  bool signs = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + trial % 2;
    const auto g = make_grid(dim, dim == 1 ? 20.0 : 10.0, dim == 1 ? 256 : 64);
    const auto u = oracle::random_field(g, rng), w = oracle::random_field(g, rng);
    const auto beta = oracle::random_nonnegative_field(g, rng);
    auto rel = [&](double x, double y) { return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1.0}); };
    worst = std::max(worst, rel(inner(laplacian(u), w), inner(u, laplacian(w))));
    worst = std::max(worst, rel(inner(bilaplacian(u), w), inner(u, bilaplacian(w))));
    worst = std::max(worst, rel(inner(div_beta_grad(u, beta), w), inner(u, div_beta_grad(w, beta))));
    worst = std::max(worst, rel(-inner(div_beta_grad(u, beta), w), face_form(u, w, beta)));
    signs = signs && inner(laplacian(u), u) <= 0.0 && inner(bilaplacian(u), u) >= 0.0 &&
            inner(div_beta_grad(u, beta), u) <= 0.0;
  }

  auto orders = [](const std::function<FieldD(const GridD&)>& op, const std::function<double(double, double)>& exact) {
    std::vector<double> err;
    for (int n : {32, 64, 128, 256}) {
      const auto g = make_grid(2, std::numbers::pi, n);
      const auto ref = FieldD::from_function(g, [&](const std::array<double, 2>& x) { return exact(x[0], x[1]); });
      err.push_back((op(g) - ref).values().cwiseAbs().maxCoeff());
    }
    double lo = 1e300;
    for (std::size_t i = 1; i < err.size(); ++i) lo = std::min(lo, std::log2(err[i - 1] / err[i]));
    return lo;
  };
  auto field = [](const GridD& g) {
    return FieldD::from_function(g, [](const std::array<double, 2>& x) { return std::sin(2 * x[0]) * std::cos(x[1]); });
  };
  const double lap = orders([&](const GridD& g) { return laplacian(field(g)); },
                            [](double x, double y) { return -5 * std::sin(2 * x) * std::cos(y); });
  const double bilap = orders([&](const GridD& g) { return bilaplacian(field(g)); },
                              [](double x, double y) { return 25 * std::sin(2 * x) * std::cos(y); });
  const double div = orders(
      [&](const GridD& g) {
        const auto beta = FieldD::from_function(g, [](const std::array<double, 2>& x) { return 2 + std::cos(x[0]); });
        return div_beta_grad(field(g), beta);
      },
      [](double x, double y) {
        // d/dx((2 + cos x) 2 cos 2x cos y) + d/dy((2 + cos x)(-sin 2x sin y))
        const double dx = (-std::sin(x) * 2 * std::cos(2 * x) - (2 + std::cos(x)) * 4 * std::sin(2 * x)) * std::cos(y);
        const double dy = -(2 + std::cos(x)) * std::sin(2 * x) * std::cos(y);
        return dx + dy;
      });
  const double order = std::min({lap, bilap, div});
  return {worst <= 1e-12 && signs && order >= 1.9, "max adjointness defect " + fmt(worst) + " (<= 1e-12), signs " +
                                                       (signs ? "ok" : "violated") + ", min consistency order " +
                                                       fmt(order) + " (>= 1.9)"};
}

Verdict stationary_solver() {
  const auto base = load_run("kirchhoff_2d.json").scenario;
  const auto& g = base.grid;

  auto manufactured = base;
  const auto phi_star = FieldD::from_function(g, [](const std::array<double, 2>& x) {
    return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])) * (1 + 0.3 * std::sin(x[0]));
  });
  manufactured.forcing = FieldD(g);
  manufactured.forcing = stationary_residual(phi_star, manufactured);
  const auto rec = solve_stationary(manufactured, FieldD(g));
  const double recovery = norm(rec.phi - phi_star, NormKind::H2);

  auto linear = base;
  linear.nonlinearity = {f_constant(0.0), g_zero()};
  const auto lin = solve_stationary(linear, FieldD(g));

  const auto zero_cfg = load_run("gradient_zero_forcing_1d.json");
  const auto set = zero_forcing_set(zero_cfg.scenario);
  const bool only_zero = set.size() == 1 && norm(set[0].phi, NormKind::H2) < 1e-9;

  const bool pass = rec.converged && rec.residual <= 1e-10 && lin.converged && lin.iterations == 1 && only_zero;
  return {pass, "manufactured residual " + fmt(rec.residual) + " (<= 1e-10), H2 error " + fmt(recovery) +
                    ", linear Newton steps " + std::to_string(lin.iterations) + " (== 1), h = 0 set is {0}: " +
                    (only_zero ? "yes" : "no")};
}

Verdict determinism() {
  bool same = true;
  int configs = 0;
  for (const auto& entry : fs::directory_iterator(config_dir)) {
    ++configs;
    const std::string stem = entry.path().stem().string();
    std::string bytes[2];
    for (int k = 0; k < 2; ++k) {
      const auto out = scratch("determinism_" + stem + "_" + std::to_string(k));
      const std::string cmd = std::string(PLATELAB_EXE) + " run " + entry.path().string() + " --out " + out.string() +
                              " > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      (void)rc;
      bytes[k] = slurp(out / "trajectory.ndjson");
    }
    same = same && !bytes[0].empty() && bytes[0] == bytes[1];
  }
  return {same && configs > 0,
          std::to_string(configs) + " shipped configs, trajectories byte-identical: " + (same ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"discrete energy equality", energy_equality},
      {"Lyapunov monotonicity", lyapunov_monotonicity},
      {"convergence to the stationary set", convergence_to_N},
      {"uniform absorption", uniform_absorption},
      {"tail estimate", tail_estimate},
      {"regularity proxy", regularity_proxy},
      {"counterexample mechanism", counterexample_mechanism},
      {"operator correctness", operator_correctness},
      {"stationary solver", stationary_solver},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first,
                v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
