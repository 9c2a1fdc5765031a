#include "plate/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "plate/energetics.hpp"
#include "plate/norms.hpp"

namespace plate {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* tool_name = "platelab";
constexpr const char* tool_version = "0.1.0";
constexpr int manifest_version = 1;

/// Strict reader over one config object: remembers consumed keys and rejects the rest.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(label(), "expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  double number(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_number()) throw ConfigError(label(key), "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  long integer(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_number_integer()) throw ConfigError(label(key), "expected an integer");
    return v.get<long>();
  }
  long integer(const std::string& key, long fallback) { return has(key) ? integer(key) : fallback; }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = get(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ConfigError(label(key), "expected a nonnegative integer");
  }

  std::string text(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_string()) throw ConfigError(label(key), "expected a string");
    return v.get<std::string>();
  }
  std::string text(const std::string& key, const std::string& fallback) { return has(key) ? text(key) : fallback; }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = get(key);
    if (!v.is_boolean()) throw ConfigError(label(key), "expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) {
    if (!has(key)) return {};
    const auto& v = get(key);
    if (!v.is_array()) throw ConfigError(label(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(label(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Reader child(const std::string& key) { return Reader(get(key), label(key)); }

  std::optional<Reader> optional_child(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return child(key);
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const { throw ConfigError(label(key), what); }

  /// Rejects every key that was never read.
  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!used_.count(key)) throw ConfigError(label(key), "unknown key");
  }

 private:
  const json& get(const std::string& key) {
    if (!obj_.contains(key)) throw ConfigError(label(key), "missing required field");
    used_.insert(key);
    return obj_.at(key);
  }

  std::string label() const { return path_.empty() ? "config" : path_; }
  std::string label(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

MaskKind parse_mask(Reader& r, const std::string& key) {
  const std::string m = r.text(key, "none");
  if (m == "none") return MaskKind::none;
  if (m == "all") return MaskKind::all;
  if (m == "left_half") return MaskKind::left_half;
  if (m == "right_half") return MaskKind::right_half;
  r.fail(key, "unknown mask '" + m + "' (none, all, left_half, right_half)");
}

/// Coefficient field plus its exterior floor constant.
std::pair<FieldD, double> parse_coefficient(Reader r, const GridD& grid, double r0) {
  const std::string profile = r.text("profile");
  std::pair<FieldD, double> out{FieldD(grid), 0.0};
  if (profile == "constant") {
    const double value = r.number("value");
    if (value < 0.0) r.fail("value", "damping coefficients must be nonnegative");
    out = {FieldD::constant(grid, value), value};
  } else if (profile == "ring") {
    const double floor = r.number("floor");
    if (!(floor > 0.0)) r.fail("floor", "ring floor must be positive");
    if (!(r0 < grid.half_width())) r.fail("floor", "ring profile needs r0 < half_width");
    out = {ring_profile(grid, floor, r0, parse_mask(r, "mask")), floor};
  } else {
    r.fail("profile", "unknown profile '" + profile + "' (constant, ring)");
  }
  r.finish();
  return out;
}

NonlocalPart parse_f(Reader r) {
  const std::string kind = r.text("kind");
  NonlocalPart out;
  if (kind == "constant") {
    out = f_constant(r.number("a"));
  } else if (kind == "kirchhoff") {
    out = f_kirchhoff(r.number("a", 0.0), r.number("b"));
  } else if (kind == "saturating") {
    out = f_saturating(r.number("a", 0.0), r.number("b"), r.number("zc"));
  } else {
    r.fail("kind", "unknown f kind '" + kind + "' (constant, kirchhoff, saturating)");
  }
  r.finish();
  return out;
}

LocalPart parse_g(Reader r) {
  const std::string kind = r.text("kind");
  LocalPart out;
  if (kind == "zero") {
    out = g_zero();
  } else if (kind == "cubic") {
    out = g_cubic();
  } else if (kind == "odd_power") {
    const double p = r.number("p");
    if (!(p >= 1.0)) r.fail("p", "power must be at least 1");
    out = g_odd_power(p);
  } else if (kind == "negative_cubic") {
    out = g_negative_cubic();
  } else {
    r.fail("kind", "unknown g kind '" + kind + "' (zero, cubic, odd_power, negative_cubic)");
  }
  if (auto growth = r.optional_child("growth")) {
    out.p = growth->number("p");
    out.C = growth->number("C");
    growth->finish();
  }
  r.finish();
  return out;
}

InitialSpec parse_initial(std::optional<Reader> r) {
  InitialSpec s;
  if (!r) return s;
  const std::string kind = r->text("kind", "random");
  if (kind == "random") {
    s.kind = InitialKind::random;
    s.norm = r->number("norm", 1.0);
    s.norms = r->numbers("norms");
    if (!(s.norm > 0.0)) r->fail("norm", "target norm must be positive");
    for (double n : s.norms)
      if (!(n > 0.0)) r->fail("norms", "target norms must be positive");
  } else if (kind == "zero") {
    s.kind = InitialKind::zero;
  } else if (kind == "constant") {
    s.kind = InitialKind::constant;
    s.u_value = r->number("u", 0.0);
    s.v_value = r->number("v", 0.0);
  } else if (kind == "bump") {
    s.kind = InitialKind::bump;
    s.amplitude = r->number("amplitude");
    s.radius = r->number("radius");
  } else {
    r->fail("kind", "unknown initial kind '" + kind + "' (random, zero, constant, bump)");
  }
  r->finish();
  return s;
}

std::string to_text(const ojson& j) { return j.dump(2) + "\n"; }

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string tail_name(double r) {
  std::ostringstream os;
  os.precision(17);
  os << "tail_r=" << r;
  return os.str();
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016" PRIx64, h);
  return buf;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col), e.what());
  }
  if (j.is_object() && j.contains("manifest_version") && j.contains("config")) return j.at("config");
  return j;
}

json load_config_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_overrides(json& cfg, const Overrides& o) {
  if (o.dt) cfg["numerics"]["dt"] = *o.dt;
  if (o.horizon) cfg["run"]["horizon"] = *o.horizon;
  if (o.stride) cfg["run"]["stride"] = *o.stride;
  if (o.allow_hypothesis_violation) cfg["allow_hypothesis_violation"] = true;
}

std::uint64_t config_hash(const json& cfg) { return fnv1a64(cfg.dump()); }

RunConfig build_run_config(const json& cfg) {
  Reader top(cfg, "");
  const std::string name = top.text("name", "unnamed");
  const std::uint64_t seed = top.unsigned_integer("seed", 0);

  Reader gr = top.child("grid");
  const long dim = gr.integer("dim");
  const double half_width = gr.number("half_width");
  const long points = gr.integer("points");
  gr.finish();
  std::optional<GridD> grid_opt;
  try {
    grid_opt.emplace(static_cast<int>(dim), half_width, static_cast<int>(points));
  } catch (const InvalidArgument& e) {
    throw ConfigError("grid", e.what());
  }
  const GridD& grid = *grid_opt;

  const double gamma = top.number("gamma", 1.0);
  const double lambda = top.number("lambda", 1.0);

  Reader damp = top.child("damping");
  const double r0 = damp.number("r0");
  if (!(r0 > 0.0)) damp.fail("r0", "exterior radius must be positive");
  auto [alpha, alpha0] = parse_coefficient(damp.child("alpha"), grid, r0);
  auto [beta, beta0] = parse_coefficient(damp.child("beta"), grid, r0);
  damp.finish();

  NonlinearitySpec nl{f_constant(0.0), g_zero()};
  if (auto n = top.optional_child("nonlinearity")) {
    if (n->has("f")) nl.f = parse_f(n->child("f"));
    if (n->has("g")) nl.g = parse_g(n->child("g"));
    n->finish();
  }

  FieldD forcing(grid);
  if (auto f = top.optional_child("forcing")) {
    const std::string kind = f->text("kind", "zero");
    if (kind == "bump") {
      const double rho = f->number("radius");
      if (!(rho > 0.0)) f->fail("radius", "bump radius must be positive");
      forcing = bump_forcing(grid, f->number("amplitude"), rho);
    } else if (kind != "zero") {
      f->fail("kind", "unknown forcing kind '" + kind + "' (zero, bump)");
    }
    f->finish();
  }

  Numerics numerics;
  numerics.dt = default_time_step(grid);
  if (auto n = top.optional_child("numerics")) {
    numerics.dt = n->number("dt", numerics.dt);
    numerics.cg_tol = n->number("cg_tol", numerics.cg_tol);
    n->finish();
  }

  InitialSpec initial = parse_initial(top.optional_child("initial"));

  double horizon = 1.0;
  long stride = 1;
  std::vector<double> radii, sigmas;
  if (auto r = top.optional_child("run")) {
    horizon = r->number("horizon", horizon);
    stride = r->integer("stride", stride);
    radii = r->numbers("radii");
    sigmas = r->numbers("sigmas");
    if (!(horizon > 0.0)) r->fail("horizon", "horizon must be positive");
    if (stride < 1) r->fail("stride", "stride must be at least 1");
    r->finish();
  }
  const bool allow = top.boolean("allow_hypothesis_violation", false);
  top.finish();

  Scenario sc{name, seed, grid, gamma, lambda, CoefficientSet{alpha, beta, alpha0, beta0, r0}, nl, forcing,
              numerics, allow};
  return RunConfig{cfg, std::move(sc), initial, horizon, static_cast<int>(stride), radii, sigmas, seed};
}

SampledState make_initial_state(const RunConfig& cfg) {
  const auto& grid = cfg.scenario.grid;
  switch (cfg.initial.kind) {
    case InitialKind::random:
      return sample_initial_data(grid, cfg.initial.norm, derive_seed(cfg.seed, 0));
    case InitialKind::zero:
      return {StateD::zero(grid), 0, 0};
    case InitialKind::constant:
      return {StateD(FieldD::constant(grid, cfg.initial.u_value), FieldD::constant(grid, cfg.initial.v_value)), 0, 0};
    case InitialKind::bump:
      return {StateD(bump_forcing(grid, cfg.initial.amplitude, cfg.initial.radius), FieldD(grid)), 0, 0};
  }
  throw InvalidArgument("unknown initial-data kind");
}

ojson validation_document(const ValidationReport& rep, bool override_flag) {
  ojson doc;
  bool ok = true;
  ojson rules = ojson::array();
  for (const auto& r : rep.rules) {
    const bool waived = !r.passed && r.waivable && override_flag;
    if (!r.passed && !waived) ok = false;
    ojson item;
    item["rule"] = r.rule;
    item["passed"] = r.passed;
    item["waivable"] = r.waivable;
    item["waived"] = waived;
    item["message"] = r.message;
    if (r.worst_index >= 0) item["worst_sample"] = r.worst_index;
    item["worst_value"] = r.worst_value;
    rules.push_back(item);
  }
  doc["passed"] = ok;
  doc["override"] = override_flag;
  doc["rules"] = rules;
  return doc;
}

namespace {

/// Run-parameter rules (horizon, radii, lags) that only exist at the harness level.
ValidationReport run_parameter_rules(const RunConfig& cfg) {
  ValidationReport rep;
  auto add = [&](const char* id, bool ok, const std::string& msg) {
    RuleResult r;
    r.rule = id;
    r.passed = ok;
    r.message = ok ? "ok" : msg;
    r.waivable = false;
    rep.rules.push_back(r);
  };
  const double L = cfg.scenario.grid.half_width();
  bool radii_ok = true;
  std::string bad;
  for (double r : cfg.radii)
    if (!(r > 0.0 && 2.0 * r < L)) radii_ok = false, bad += format_double(r) + " ";
  add("tail_radii", radii_ok, "tail radii must satisfy 0 < r < L/2: " + bad);

  bool lags_ok = true;
  bad.clear();
  const double tau = cfg.scenario.numerics.dt * cfg.stride;
  for (double s : cfg.sigmas) {
    const double ratio = s / tau;
    if (!(ratio >= 1.0 - 1e-9) || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
      lags_ok = false, bad += format_double(s) + " ";
  }
  add("quotient_lags", lags_ok, "difference-quotient lags must be multiples of stride * dt: " + bad);
  return rep;
}

}  // namespace

ojson validate_config(const json& cfg, bool* passed) {
  const RunConfig rc = build_run_config(cfg);
  ValidationReport rep = validate_scenario(rc.scenario);
  rep.append(run_parameter_rules(rc));
  ojson doc = validation_document(rep, rc.scenario.allow_hypothesis_violation);
  doc["config_hash"] = hex64(config_hash(cfg));
  if (passed) *passed = doc["passed"].get<bool>();
  return doc;
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::halted_blow_up: return "halted: blow-up guard";
    case RunStatus::halted_solver: return "halted: solver failure";
  }
  return "unknown";
}

int exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return 0;
    case RunStatus::halted_blow_up: return 3;
    case RunStatus::halted_solver: return 4;
  }
  return 1;
}

std::vector<Observer> standard_observers(const RunConfig& cfg) {
  std::vector<Observer> obs{energy_observer(), lyapunov_observer(), dissipation_observer(), phase_norm_observer()};
  obs.push_back({"norm_u_H2", [](const StateD& s, const Scenario&) { return norm(s.u, NormKind::H2); }});
  obs.push_back({"norm_v_L2", [](const StateD& s, const Scenario&) { return norm(s.v, NormKind::L2); }});
  for (double r : cfg.radii) obs.push_back(tail_observer(cfg.scenario.grid, r));
  return obs;
}

RunOutcome run_scenario(const RunConfig& cfg, const fs::path& out_dir) {
  {
    const auto extra = run_parameter_rules(cfg);
    if (!extra.passed()) {
      std::string msg;
      for (const auto& r : extra.rules)
        if (!r.passed) msg += r.message + "; ";
      throw InvalidArgument("run parameters rejected: " + msg);
    }
  }
  const SampledState init = make_initial_state(cfg);
  EvolveOptions opts;
  opts.observers = standard_observers(cfg);
  opts.stride = cfg.stride;
  opts.track_balance = true;
  opts.keep_snapshots = !cfg.sigmas.empty();

  RunOutcome out;
  out.directory = out_dir;
  try {
    out.record = evolve(init.state, cfg.scenario, cfg.horizon, opts);
  } catch (const EvolveError& e) {
    out.record = e.partial();
    out.status = e.blow_up() ? RunStatus::halted_blow_up : RunStatus::halted_solver;
    out.message = e.what();
  }
  const std::uint64_t hash = config_hash(cfg.source);
  out.record.config_hash = hash;
  if (out.record.lyapunov.size() >= 2) out.balance = energy_balance_residual(out.record, cfg.scenario);

  fs::create_directories(out_dir);
  const auto& rec = out.record;

  // residual accumulated over each sampling interval
  std::vector<double> interval_residual(rec.times.size(), 0.0);
  for (std::size_t i = 1; i < rec.times.size(); ++i) {
    double acc = 0.0;
    for (long n = rec.steps[i - 1]; n < rec.steps[i] && n < static_cast<long>(out.balance.residuals.size()); ++n)
      acc += out.balance.residuals[static_cast<std::size_t>(n)];
    interval_residual[i] = acc;
  }

  std::string ndjson;
  std::string csv = "time,step";
  for (const auto& name : rec.observer_names) csv += "," + name;
  csv += ",residual\n";
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    ojson line;
    line["t"] = rec.times[i];
    line["step"] = rec.steps[i];
    for (std::size_t c = 0; c < rec.observer_names.size(); ++c) line[rec.observer_names[c]] = rec.values[i][c];
    line["residual"] = interval_residual[i];
    ndjson += line.dump() + "\n";

    csv += format_double(rec.times[i]) + "," + std::to_string(rec.steps[i]);
    for (double v : rec.values[i]) csv += "," + format_double(v);
    csv += "," + format_double(interval_residual[i]) + "\n";
  }
  write_file(out_dir / "trajectory.ndjson", ndjson);
  write_file(out_dir / "summary.csv", csv);

  ojson files;
  files["trajectory.ndjson"] = hex64(fnv1a64(ndjson));
  files["summary.csv"] = hex64(fnv1a64(csv));

  if (!cfg.sigmas.empty() && rec.snapshots.size() >= 2) {
    std::string q = "sigma,time,energy\n";
    for (double sigma : cfg.sigmas) {
      const auto series = difference_quotient_energy(rec, cfg.scenario, sigma);
      for (std::size_t i = 0; i < series.times.size(); ++i)
        q += format_double(sigma) + "," + format_double(series.times[i]) + "," + format_double(series.energy[i]) + "\n";
    }
    write_file(out_dir / "quotient.csv", q);
    files["quotient.csv"] = hex64(fnv1a64(q));
  }

  ojson manifest;
  manifest["manifest_version"] = manifest_version;
  manifest["tool"] = tool_name;
  manifest["version"] = tool_version;
  manifest["status"] = to_string(out.status);
  if (!out.message.empty()) manifest["message"] = out.message;
  manifest["config_hash"] = hex64(hash);
  manifest["master_seed"] = cfg.seed;
  ojson seeds;
  seeds["initial_data"] = init.sub_seed;
  seeds["initial_data_resamples"] = init.resamples;
  manifest["sub_seeds"] = seeds;
  manifest["waived_hypotheses"] = rec.waived_rules;
  manifest["steps"] = rec.steps.empty() ? 0L : rec.steps.back();
  manifest["max_balance_residual"] = out.balance.max_abs;
  manifest["normalized_balance_residual"] = out.balance.normalized;
  manifest["files"] = files;
  manifest["config"] = cfg.source;
  write_file(out_dir / "manifest.json", to_text(manifest));
  return out;
}

EnsembleReport run_ensemble(const RunConfig& tmpl, const std::vector<std::uint64_t>& seeds, const fs::path& out_dir,
                            int workers) {
  if (seeds.size() < 2) throw InvalidArgument("an ensemble needs at least two seeds");
  std::vector<double> norms = tmpl.initial.norms.empty() ? std::vector<double>{tmpl.initial.norm} : tmpl.initial.norms;

  std::vector<RunConfig> configs;
  EnsembleReport rep;
  for (double nrm : norms) {
    for (std::uint64_t seed : seeds) {
      json src = tmpl.source;
      src["seed"] = seed;
      src["initial"]["kind"] = "random";
      src["initial"]["norm"] = nrm;
      src["initial"].erase("norms");
      configs.push_back(build_run_config(src));
      rep.members.push_back({seed, nrm, {}});
    }
  }

  fs::create_directories(out_dir);
  std::vector<std::string> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      std::ostringstream dir;
      dir << "member_" << i << "_seed_" << rep.members[i].seed << "_norm_" << rep.members[i].norm;
      try {
        rep.members[i].outcome = run_scenario(configs[i], out_dir / dir.str());
        if (rep.members[i].outcome.status != RunStatus::ok) errors[i] = rep.members[i].outcome.message;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_workers = std::min<std::size_t>(configs.size(), workers > 0 ? workers : hw);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::string failures;
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) failures += "member " + std::to_string(i) + ": " + errors[i] + "; ";
  if (!failures.empty()) throw std::runtime_error("ensemble aggregation aborted: " + failures);

  const auto& first = rep.members.front().outcome.record;
  rep.times = first.times;
  rep.sup_norm.assign(rep.times.size(), 0.0);
  rep.sup_tail.assign(tmpl.radii.size(), std::vector<double>(rep.times.size(), 0.0));
  for (const auto& m : rep.members) {
    const auto& rec = m.outcome.record;
    if (rec.times.size() != rep.times.size()) throw std::runtime_error("ensemble members sampled different times");
    const auto nrm = rec.column("norm");
    for (std::size_t t = 0; t < nrm.size(); ++t) rep.sup_norm[t] = std::max(rep.sup_norm[t], nrm[t]);
    for (std::size_t r = 0; r < tmpl.radii.size(); ++r) {
      const auto tail = rec.column(tail_name(tmpl.radii[r]));
      for (std::size_t t = 0; t < tail.size(); ++t) rep.sup_tail[r][t] = std::max(rep.sup_tail[r][t], tail[t]);
    }
    for (std::size_t n = 0; n + 1 < rec.lyapunov.size(); ++n)
      rep.max_lyapunov_increase = std::max(rep.max_lyapunov_increase, rec.lyapunov[n + 1] - rec.lyapunov[n]);
    rep.max_balance_residual = std::max(rep.max_balance_residual, m.outcome.balance.normalized);
  }

  std::string csv = "time,sup_norm";
  for (double r : tmpl.radii) csv += ",sup_" + tail_name(r);
  csv += "\n";
  for (std::size_t t = 0; t < rep.times.size(); ++t) {
    csv += format_double(rep.times[t]) + "," + format_double(rep.sup_norm[t]);
    for (const auto& s : rep.sup_tail) csv += "," + format_double(s[t]);
    csv += "\n";
  }
  write_file(out_dir / "aggregate.csv", csv);

  ojson agg;
  agg["tool"] = tool_name;
  agg["version"] = tool_version;
  agg["template_hash"] = hex64(config_hash(tmpl.source));
  agg["max_lyapunov_increase"] = rep.max_lyapunov_increase;
  agg["max_normalized_balance_residual"] = rep.max_balance_residual;
  ojson members = ojson::array();
  for (std::size_t i = 0; i < rep.members.size(); ++i) {
    ojson m;
    m["seed"] = rep.members[i].seed;
    m["norm"] = rep.members[i].norm;
    m["directory"] = rep.members[i].outcome.directory.filename().string();
    m["status"] = to_string(rep.members[i].outcome.status);
    members.push_back(m);
  }
  agg["members"] = members;
  agg["files"]["aggregate.csv"] = hex64(fnv1a64(csv));
  write_file(out_dir / "aggregate.json", to_text(agg));
  return rep;
}

std::vector<StationaryResult> run_stationary(const RunConfig& cfg, int guesses, const fs::path& out_dir) {
  admit_scenario(cfg.scenario);
  NewtonOptions opts;
  auto found = find_stationary_set(cfg.scenario, guesses, derive_seed(cfg.seed, 1), 1.0, opts);
  fs::create_directories(out_dir);
  ojson doc;
  doc["tool"] = tool_name;
  doc["version"] = tool_version;
  doc["config_hash"] = hex64(config_hash(cfg.source));
  doc["guesses"] = guesses + 1;
  doc["guess_seed"] = derive_seed(cfg.seed, 1);
  ojson results = ojson::array();
  for (const auto& r : found) {
    ojson item;
    item["guess"] = r.guess_tag;
    item["converged"] = r.converged;
    item["residual"] = r.residual;
    item["iterations"] = r.iterations;
    item["norm_H2"] = norm(r.phi, NormKind::H2);
    item["phi"] = std::vector<double>(r.phi.values().data(), r.phi.values().data() + r.phi.size());
    results.push_back(item);
  }
  doc["stationary_points"] = results;
  write_file(out_dir / "stationary.json", to_text(doc));
  return found;
}

std::vector<std::pair<std::string, std::vector<double>>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::vector<std::pair<std::string, std::vector<double>>> cols;
  if (!std::getline(in, line)) return cols;
  {
    std::stringstream ss(line);
    std::string name;
    while (std::getline(ss, name, ',')) cols.push_back({name, {}});
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    for (auto& col : cols) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("short CSV row in " + path.string());
      col.second.push_back(std::stod(cell));
    }
  }
  return cols;
}

}  // namespace plate
