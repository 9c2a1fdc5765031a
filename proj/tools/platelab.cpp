// platelab: validate, run, ensemble and stationary-search front end.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "plate/harness.hpp"
#include "plate/norms.hpp"

namespace fs = std::filesystem;
using namespace plate;

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<int> stride;
  bool allow = false;
};

void add_common(CLI::App* cmd, Common& c, bool run_flags) {
  cmd->add_option("config", c.config, "config file (or a run manifest)")->required();
  cmd->add_flag("--allow-hypothesis-violation", c.allow, "waive structural hypotheses (counterexample runs)");
  if (!run_flags) return;
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--dt", c.dt, "time step override");
  cmd->add_option("--horizon", c.horizon, "horizon override");
  cmd->add_option("--stride", c.stride, "observer stride override");
}

nlohmann::json load(const Common& c) {
  auto cfg = load_config_file(c.config);
  apply_overrides(cfg, Overrides{c.dt, c.horizon, c.stride, c.allow});
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strongly damped semilinear plate equation laboratory"};
  app.require_subcommand(1);

  Common validate_opts, run_opts, ens_opts, stat_opts;
  auto* validate_cmd = app.add_subcommand("validate", "check every hypothesis and numerics rule without running");
  add_common(validate_cmd, validate_opts, false);

  auto* run_cmd = app.add_subcommand("run", "evolve one trajectory and write its bundle");
  add_common(run_cmd, run_opts, true);

  std::vector<std::uint64_t> seeds;
  int workers = 0;
  auto* ens_cmd = app.add_subcommand("ensemble", "run one trajectory per seed and aggregate");
  add_common(ens_cmd, ens_opts, true);
  ens_cmd->add_option("--seeds", seeds, "member seeds")->required()->delimiter(',');
  ens_cmd->add_option("--workers", workers, "concurrent members (0 = hardware threads)");

  int guesses = 4;
  auto* stat_cmd = app.add_subcommand("stationary", "batch Newton search for stationary points");
  add_common(stat_cmd, stat_opts, true);
  stat_cmd->add_option("--guesses", guesses, "random guesses besides the zero guess");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate_cmd) {
      bool passed = false;
      const auto doc = validate_config(load(validate_opts), &passed);
      std::cout << doc.dump(2) << "\n";
      return passed ? 0 : 2;
    }
    if (*run_cmd) {
      const RunConfig cfg = build_run_config(load(run_opts));
      const RunOutcome out = run_scenario(cfg, run_opts.out);
      std::cout << "status: " << to_string(out.status) << "\n"
                << "steps: " << (out.record.steps.empty() ? 0 : out.record.steps.back()) << "\n"
                << "normalized balance residual: " << format_double(out.balance.normalized) << "\n"
                << "bundle: " << fs::path(run_opts.out).string() << "\n";
      if (!out.message.empty()) std::cout << "message: " << out.message << "\n";
      return exit_code(out.status);
    }
    if (*ens_cmd) {
      const RunConfig cfg = build_run_config(load(ens_opts));
      const auto rep = run_ensemble(cfg, seeds, ens_opts.out, workers);
      std::cout << "members: " << rep.members.size() << "\n"
                << "initial sup norm: " << format_double(rep.sup_norm.front()) << "\n"
                << "final sup norm: " << format_double(rep.sup_norm.back()) << "\n"
                << "max Lyapunov increase: " << format_double(rep.max_lyapunov_increase) << "\n"
                << "max normalized balance residual: " << format_double(rep.max_balance_residual) << "\n";
      return 0;
    }
    if (*stat_cmd) {
      const RunConfig cfg = build_run_config(load(stat_opts));
      const auto found = run_stationary(cfg, guesses, stat_opts.out);
      std::cout << "stationary points: " << found.size() << "\n";
      for (const auto& r : found)
        std::cout << "  " << r.guess_tag << ": residual " << format_double(r.residual) << ", |phi|_H2 "
                  << format_double(norm(r.phi, NormKind::H2)) << ", iterations " << r.iterations << "\n";
      return found.empty() ? 5 : 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "validation failed: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
