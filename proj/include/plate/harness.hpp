#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "plate/energetics.hpp"
#include "plate/sampling.hpp"
#include "plate/stationary.hpp"

namespace plate {

/// Malformed or unknown config content; `where` names the line or the field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

enum class InitialKind { random, zero, constant, bump };

struct InitialSpec {
  InitialKind kind = InitialKind::random;
  /// Target |(u0, u1)|_{H2 x L2} for random draws.
  double norm = 1.0;
  /// Ensemble norm levels; empty means {norm}.
  std::vector<double> norms;
  double u_value = 0.0;
  double v_value = 0.0;
  double amplitude = 1.0;
  double radius = 1.0;
};

struct RunConfig {
  /// Effective config (after command-line overrides), the source of the config hash.
  nlohmann::json source;
  Scenario scenario;
  InitialSpec initial;
  double horizon = 1.0;
  int stride = 1;
  std::vector<double> radii;
  std::vector<double> sigmas;
  std::uint64_t seed = 0;
};

struct Overrides {
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<int> stride;
  bool allow_hypothesis_violation = false;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t h);

/// Parses config text; a run manifest is accepted too (its embedded config is used).
nlohmann::json parse_config_text(const std::string& text);
nlohmann::json load_config_file(const std::filesystem::path& path);
void apply_overrides(nlohmann::json& cfg, const Overrides& o);
/// Strict schema read: unknown keys and wrong types raise ConfigError naming the field.
RunConfig build_run_config(const nlohmann::json& cfg);
std::uint64_t config_hash(const nlohmann::json& cfg);

/// Initial state for the config, with the sub-seed bookkeeping of random draws.
SampledState make_initial_state(const RunConfig& cfg);

/// Hypothesis and numerics rules as a machine-readable document.
nlohmann::ordered_json validation_document(const ValidationReport& rep, bool override_flag);
/// Full validation without running: parse, build, check every rule.
nlohmann::ordered_json validate_config(const nlohmann::json& cfg, bool* passed = nullptr);

enum class RunStatus { ok, halted_blow_up, halted_solver };
std::string to_string(RunStatus s);
int exit_code(RunStatus s);

struct RunOutcome {
  RunStatus status = RunStatus::ok;
  std::string message;
  TrajectoryRecord record;
  ResidualSeries balance;
  std::filesystem::path directory;
};

/// Observers written for every run: E, L, D, norm, norm_u_H2, norm_v_L2, tails.
std::vector<Observer> standard_observers(const RunConfig& cfg);

/// Evolves the config and writes trajectory.ndjson, summary.csv, manifest.json (and
/// quotient.csv when sigmas are set) into `out_dir`. Blow-ups persist the partial run.
RunOutcome run_scenario(const RunConfig& cfg, const std::filesystem::path& out_dir);

struct EnsembleMember {
  std::uint64_t seed = 0;
  double norm = 0.0;
  RunOutcome outcome;
};

struct EnsembleReport {
  std::vector<double> times;
  /// sup over members of |(u, v)|_{H2 x L2} per sampled time.
  std::vector<double> sup_norm;
  /// sup_tail[r][t]
  std::vector<std::vector<double>> sup_tail;
  double max_lyapunov_increase = 0.0;
  double max_balance_residual = 0.0;
  std::vector<EnsembleMember> members;
};

/// One run per (seed, norm) pair, concurrently; members keep their own bundles.
EnsembleReport run_ensemble(const RunConfig& tmpl, const std::vector<std::uint64_t>& seeds,
                            const std::filesystem::path& out_dir, int workers = 0);

/// Batch stationary search; writes stationary.json.
std::vector<StationaryResult> run_stationary(const RunConfig& cfg, int guesses, const std::filesystem::path& out_dir);

/// "%.17g"
std::string format_double(double x);

/// Reads a CSV with a header row into named columns.
std::vector<std::pair<std::string, std::vector<double>>> read_csv(const std::filesystem::path& path);

}  // namespace plate
