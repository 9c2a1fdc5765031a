#include "plate/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace plate {

bool ValidationReport::passed() const {
  return std::all_of(rules.begin(), rules.end(), [](const RuleResult& r) { return r.passed; });
}

const RuleResult* ValidationReport::find(const std::string& id) const {
  for (const auto& r : rules)
    if (r.rule == id) return &r;
  return nullptr;
}

std::vector<std::string> ValidationReport::failed_rules() const {
  std::vector<std::string> out;
  for (const auto& r : rules)
    if (!r.passed) out.push_back(r.rule);
  return out;
}

void ValidationReport::append(const ValidationReport& other) {
  rules.insert(rules.end(), other.rules.begin(), other.rules.end());
}

std::string sample_label(const GridD& grid, Eigen::Index k) {
  std::ostringstream os;
  if (grid.dim() == 1)
    os << "(" << k << ")";
  else
    os << "(" << k / grid.points() << "," << k % grid.points() << ")";
  return os.str();
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

/// Tracks the most negative value of a per-sample margin; a rule passes when all margins pass.
struct WorstSample {
  Eigen::Index index = -1;
  double value = std::numeric_limits<double>::infinity();
  double margin = std::numeric_limits<double>::infinity();

  void offer(Eigen::Index k, double margin_k, double value_k) {
    if (margin_k < margin) {
      margin = margin_k;
      index = k;
      value = value_k;
    }
  }
};

RuleResult sample_rule(const char* id, const GridD& grid, const WorstSample& w, bool passed,
                       const std::string& what) {
  RuleResult r;
  r.rule = id;
  r.passed = passed;
  r.worst_index = w.index;
  r.worst_value = w.index >= 0 ? w.value : 0.0;
  if (passed)
    r.message = "ok";
  else
    r.message = "violates " + std::string(id) + " at sample " + sample_label(grid, w.index) + ": " +
                what + " = " + fmt(w.value);
  return r;
}

}  // namespace

ValidationReport validate_coefficients(const CoefficientSet& cs) {
  cs.alpha.require_same_grid(cs.beta);
  const auto& g = cs.alpha.grid();
  const auto& a = cs.alpha.values();
  const auto& b = cs.beta.values();
  ValidationReport rep;

  WorstSample neg;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    neg.offer(k, a[k], a[k]);
    neg.offer(k, b[k], b[k]);
  }
  const bool finite = a.allFinite() && b.allFinite();
  rep.rules.push_back(sample_rule(rule::damping_nonnegative, g, neg, finite && neg.margin >= 0.0,
                                  "min(alpha, beta)"));

  WorstSample ext_a;
  WorstSample ext_b;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    if (g.radius(k) < cs.r0) continue;
    ext_a.offer(k, a[k] - cs.alpha0, a[k]);
    ext_b.offer(k, b[k] - cs.beta0, b[k]);
  }
  const bool floors_positive = cs.alpha0 > 0.0 && cs.beta0 > 0.0 && cs.r0 > 0.0;
  const bool ext_ok = floors_positive && ext_a.margin >= 0.0 && ext_b.margin >= 0.0;
  RuleResult ext;
  if (!floors_positive) {
    ext.rule = rule::damping_exterior_floor;
    ext.passed = false;
    ext.message = "violates damping_exterior_floor: floors alpha0 = " + fmt(cs.alpha0) +
                  ", beta0 = " + fmt(cs.beta0) + ", r0 = " + fmt(cs.r0) + " must all be positive";
    if (!(cs.alpha0 > 0.0)) ext.message += " (alpha has no exterior floor)";
    if (!(cs.beta0 > 0.0)) ext.message += " (beta has no exterior floor)";
  } else if (ext_a.margin < 0.0) {
    ext = sample_rule(rule::damping_exterior_floor, g, ext_a, false, "alpha below alpha0, alpha");
  } else {
    ext = sample_rule(rule::damping_exterior_floor, g, ext_b, ext_ok, "beta below beta0, beta");
  }
  rep.rules.push_back(ext);

  WorstSample sum;
  for (Eigen::Index k = 0; k < g.size(); ++k) sum.offer(k, a[k] + b[k], a[k] + b[k]);
  rep.rules.push_back(sample_rule(rule::damping_positive_sum, g, sum, sum.margin > 0.0, "alpha + beta"));
  return rep;
}

FieldD make_mask(const GridD& grid, MaskKind kind) {
  return FieldD::from_function(grid, [kind](const std::array<double, 2>& x) {
    switch (kind) {
      case MaskKind::none: return 0.0;
      case MaskKind::all: return 1.0;
      case MaskKind::left_half: return x[0] < 0.0 ? 1.0 : 0.0;
      case MaskKind::right_half: return x[0] >= 0.0 ? 1.0 : 0.0;
    }
    return 0.0;
  });
}

FieldD ring_profile(const GridD& grid, double floor, double r0, const FieldD& mask) {
  mask.require_same_grid(FieldD(grid));
  if (!(floor > 0.0)) throw InvalidArgument("ring profile floor must be positive");
  const FieldD eta = cutoff_eta(grid, 0.5 * r0);
  FieldD out(grid);
  out.values() = floor * (eta.values().array() + (1.0 - eta.values().array()) * mask.values().array()).matrix();
  if ((out.values().array() < 0.0).any())
    throw InvalidArgument("ring profile mask makes the coefficient negative");
  return out;
}

FieldD ring_profile(const GridD& grid, double floor, double r0, MaskKind mask) {
  return ring_profile(grid, floor, r0, make_mask(grid, mask));
}

CoefficientSet complementary_patch(const GridD& grid, double alpha0, double beta0, double r0) {
  return {ring_profile(grid, alpha0, r0, MaskKind::right_half),
          ring_profile(grid, beta0, r0, MaskKind::left_half), alpha0, beta0, r0};
}

CoefficientSet constant_coefficients(const GridD& grid, double alpha, double beta, double r0) {
  return {FieldD::constant(grid, alpha), FieldD::constant(grid, beta), alpha, beta, r0};
}

NonlocalPart f_constant(double a) {
  return {"constant", [a](double) { return a; }, [](double) { return 0.0; },
          ScalarFn([a](double z) { return a * z; })};
}

NonlocalPart f_kirchhoff(double a, double b) {
  return {"kirchhoff", [a, b](double z) { return a + b * z * z; }, [b](double z) { return 2.0 * b * z; },
          ScalarFn([a, b](double z) { return a * z + 0.5 * b * z * z; })};
}

NonlocalPart f_saturating(double a, double b, double zc) {
  if (!(zc > 0.0)) throw InvalidArgument("saturation scale must be positive");
  const double c2 = zc * zc;
  auto log_cosh = [](double x) {
    const double ax = std::abs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
  };
  return {"saturating", [a, b, c2](double z) { return a + b * c2 * std::tanh(z * z / c2); },
          [b, c2](double z) {
            const double sech = 1.0 / std::cosh(z * z / c2);
            return 2.0 * b * z * sech * sech;
          },
          ScalarFn([a, b, c2, log_cosh](double z) { return a * z + b * c2 * c2 * log_cosh(z / c2); })};
}

LocalPart g_zero() {
  return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; },
          ScalarFn([](double) { return 0.0; }), 1.0, 0.0};
}

LocalPart g_cubic() {
  return {"cubic", [](double s) { return s * s * s; }, [](double s) { return 3.0 * s * s; },
          ScalarFn([](double s) { return 0.25 * s * s * s * s; }), 3.0, 3.0};
}

LocalPart g_odd_power(double p) {
  if (!(p >= 1.0)) throw InvalidArgument("power nonlinearity needs p >= 1");
  return {"odd_power",
          [p](double s) { return std::pow(std::abs(s), p - 1.0) * s; },
          [p](double s) { return p * std::pow(std::abs(s), p - 1.0); },
          ScalarFn([p](double s) { return std::pow(std::abs(s), p + 1.0) / (p + 1.0); }), p, p};
}

LocalPart g_negative_cubic() {
  return {"negative_cubic", [](double s) { return -s * s * s; }, [](double s) { return -3.0 * s * s; },
          ScalarFn([](double s) { return -0.25 * s * s * s * s; }), 3.0, 3.0};
}

namespace {

double simpson_step(const ScalarFn& fn, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = fn(lm);
  const double frm = fn(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(fn, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(fn, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const ScalarFn& fn, double a, double b, double abs_tol) {
  if (a == b) return 0.0;
  const double fa = fn(a);
  const double fb = fn(b);
  const double m = 0.5 * (a + b);
  const double fm = fn(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(fn, a, fa, b, fb, m, fm, whole, abs_tol, 50);
}

double f_value(const NonlinearitySpec& spec, double z) {
  if (z < 0.0) throw InvalidArgument("f is defined on z >= 0");
  return spec.f.f(z);
}

double F_value(const NonlinearitySpec& spec, double z) {
  if (z < 0.0) throw InvalidArgument("F is defined on z >= 0");
  if (spec.f.antiderivative) return (*spec.f.antiderivative)(z);
  const auto& f = spec.f.f;
  return adaptive_simpson([&f](double s) { return f(std::sqrt(s)); }, 0.0, z, 1e-10);
}

double G_value(const NonlinearitySpec& spec, double s) {
  if (spec.g.antiderivative) return (*spec.g.antiderivative)(s);
  return adaptive_simpson(spec.g.g, 0.0, s, 1e-10);
}

FieldD g_apply(const NonlinearitySpec& spec, const FieldD& u) {
  FieldD out(u.grid());
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    out[k] = spec.g.g(u[k]);
    if (!std::isfinite(out[k]))
      throw BlowUpError("g overflow at sample " + sample_label(u.grid(), k) + " (u = " + fmt(u[k]) + ")");
  }
  return out;
}

FieldD g_prime_apply(const NonlinearitySpec& spec, const FieldD& u) {
  FieldD out(u.grid());
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    out[k] = spec.g.dg(u[k]);
    if (!std::isfinite(out[k]))
      throw BlowUpError("g' overflow at sample " + sample_label(u.grid(), k) + " (u = " + fmt(u[k]) + ")");
  }
  return out;
}

double G_integral(const NonlinearitySpec& spec, const FieldD& u) {
  double sum = 0.0;
  for (Eigen::Index k = 0; k < u.size(); ++k) sum += G_value(spec, u[k]);
  const double out = u.grid().cell_volume() * sum;
  if (!std::isfinite(out)) throw BlowUpError("G integral overflow");
  return out;
}

ValidationReport validate_nonlinearity(const NonlinearitySpec& spec, double s_min, double s_max,
                                       int samples, int dim) {
  if (samples < 100) throw InvalidArgument("nonlinearity validation needs at least 100 samples");
  if (!(s_max > s_min)) throw InvalidArgument("empty nonlinearity sample range");
  const double z_max = std::max(std::abs(s_min), std::abs(s_max));
  constexpr double step = 1e-5;
  constexpr double fd_tol = 1e-4;

  auto s_at = [&](int i) { return s_min + (s_max - s_min) * i / (samples - 1); };
  auto z_at = [&](int i) { return z_max * i / (samples - 1); };

  ValidationReport rep;
  auto scalar_rule = [](const char* id, bool ok, double where, double value, const std::string& what) {
    RuleResult r;
    r.rule = id;
    r.passed = ok;
    r.worst_value = value;
    r.message = ok ? "ok" : "violates " + std::string(id) + " at " + fmt(where) + ": " + what + " = " + fmt(value);
    return r;
  };

  {
    double worst = std::numeric_limits<double>::infinity(), at = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double z = z_at(i), fz = spec.f.f(z);
      if (!(fz >= worst)) worst = fz, at = z;
    }
    rep.rules.push_back(scalar_rule(rule::f_nonnegative, worst >= 0.0, at, worst, "f(z)"));
  }
  {
    double worst = std::numeric_limits<double>::infinity(), at = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double s = s_at(i), gs = spec.g.g(s) * s;
      if (!(gs >= worst)) worst = gs, at = s;
    }
    rep.rules.push_back(scalar_rule(rule::g_sign, worst >= 0.0, at, worst, "g(s)s"));
  }
  {
    const double p = spec.g.p, C = spec.g.C;
    double worst = -std::numeric_limits<double>::infinity(), at = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double s = s_at(i);
      const double bound = C * (1.0 + std::pow(std::abs(s), p - 1.0));
      const double excess = std::abs(spec.g.dg(s)) - bound * (1.0 + 1e-12);
      if (!(excess <= worst)) worst = excess, at = s;
    }
    const bool exponent_ok = p >= 1.0 && (dim - 4) * p <= dim;
    RuleResult r = scalar_rule(rule::g_growth, exponent_ok && worst <= 0.0, at, worst, "|g'(s)| - C(1+|s|^(p-1))");
    if (!exponent_ok) r.message = "violates g_growth: exponent p = " + fmt(p) + " outside p >= 1, (n-4)p <= n";
    r.message += " [p = " + fmt(p) + ", C = " + fmt(C) + ", dim = " + std::to_string(dim) + "]";
    rep.rules.push_back(r);
  }
  auto fd_rule = [&](const char* id, const ScalarFn& fn, const ScalarFn& dfn, bool nonneg_domain) {
    double worst = 0.0, at = 0.0;
    for (int i = 0; i < samples; ++i) {
      double x = nonneg_domain ? z_at(i) : s_at(i);
      if (nonneg_domain && x < 10.0 * step) continue;
      if (!nonneg_domain && std::abs(x) < 1e-3) continue;
      const double fd = (fn(x + step) - fn(x - step)) / (2.0 * step);
      const double an = dfn(x);
      const double err = std::abs(fd - an) / std::max(1.0, std::abs(an));
      if (!(err <= worst)) worst = err, at = x;
    }
    rep.rules.push_back(scalar_rule(id, worst <= fd_tol, at, worst, "relative derivative error"));
  };
  fd_rule(rule::f_derivative, spec.f.f, spec.f.df, true);
  fd_rule(rule::g_derivative, spec.g.g, spec.g.dg, false);
  return rep;
}

FieldD bump_forcing(const GridD& grid, double amplitude, double rho) {
  if (!(rho > 0.0)) throw InvalidArgument("bump radius must be positive");
  FieldD out(grid);
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const double q = grid.radius(k) / rho;
    out[k] = q < 1.0 ? amplitude * std::exp(1.0 / (q * q - 1.0)) : 0.0;
  }
  return out;
}

double default_time_step(const GridD& grid) {
  const double h = grid.spacing();
  return std::min(1e-3, 0.25 * h * h);
}

ValidationReport validate_scenario(const Scenario& sc) {
  ValidationReport rep;
  auto numerics_rule = [](const char* id, bool ok, const std::string& msg) {
    RuleResult r;
    r.rule = id;
    r.passed = ok;
    r.message = ok ? "ok" : msg;
    r.waivable = false;
    return r;
  };
  rep.rules.push_back(numerics_rule(rule::positive_constants,
                                    sc.gamma > 0.0 && sc.lambda > 0.0 && std::isfinite(sc.gamma) &&
                                        std::isfinite(sc.lambda),
                                    "gamma = " + fmt(sc.gamma) + " and lambda = " + fmt(sc.lambda) +
                                        " must be positive"));
  rep.rules.push_back(numerics_rule(rule::time_step,
                                    sc.numerics.dt > 0.0 && sc.numerics.cg_tol > 0.0 && sc.numerics.cg_tol < 1.0,
                                    "dt = " + fmt(sc.numerics.dt) + " must be positive and cg_tol = " +
                                        fmt(sc.numerics.cg_tol) + " must lie in (0, 1)"));
  rep.rules.push_back(numerics_rule(rule::truncation_margin, sc.grid.half_width() >= 4.0 * sc.coefficients.r0,
                                    "truncation margin: L = " + fmt(sc.grid.half_width()) +
                                        " is below 4 r0 = " + fmt(4.0 * sc.coefficients.r0)));
  const bool grids_ok = sc.coefficients.alpha.grid() == sc.grid && sc.coefficients.beta.grid() == sc.grid &&
                        sc.forcing.grid() == sc.grid;
  if (!grids_ok) throw InvalidArgument("scenario fields do not share the scenario grid");
  rep.rules.push_back(numerics_rule(rule::forcing_finite, sc.forcing.is_finite(), "forcing has non-finite samples"));
  rep.append(validate_coefficients(sc.coefficients));
  rep.append(validate_nonlinearity(sc.nonlinearity, -10.0, 10.0, 1001, sc.grid.dim()));
  return rep;
}

std::vector<std::string> admit_scenario(const Scenario& sc) {
  const auto rep = validate_scenario(sc);
  std::vector<std::string> waived;
  std::string errors;
  for (const auto& r : rep.rules) {
    if (r.passed) continue;
    if (r.waivable && sc.allow_hypothesis_violation) {
      waived.push_back(r.rule);
    } else {
      errors += (errors.empty() ? "" : "; ") + r.message;
    }
  }
  if (!errors.empty()) throw InvalidArgument("scenario rejected: " + errors);
  return waived;
}

}  // namespace plate
