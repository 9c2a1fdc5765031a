#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "plate/operators.hpp"
#include "plate/types.hpp"

namespace plate {

/// Rule identifiers used in validation reports.
namespace rule {
inline constexpr const char* damping_nonnegative = "damping_nonnegative";
inline constexpr const char* damping_exterior_floor = "damping_exterior_floor";
inline constexpr const char* damping_positive_sum = "damping_positive_sum";
inline constexpr const char* f_nonnegative = "f_nonnegative";
inline constexpr const char* g_sign = "g_sign";
inline constexpr const char* g_growth = "g_growth";
inline constexpr const char* f_derivative = "f_derivative";
inline constexpr const char* g_derivative = "g_derivative";
inline constexpr const char* truncation_margin = "truncation_margin";
inline constexpr const char* positive_constants = "positive_constants";
inline constexpr const char* time_step = "time_step";
inline constexpr const char* forcing_finite = "forcing_finite";
}  // namespace rule

struct RuleResult {
  std::string rule;
  bool passed = true;
  std::string message;
  /// Flat index of the worst-offending sample, -1 when not sample-based.
  Eigen::Index worst_index = -1;
  double worst_value = 0.0;
  /// Structural hypotheses may be waived for counterexample runs; numerics rules may not.
  bool waivable = true;
};

struct ValidationReport {
  std::vector<RuleResult> rules;

  bool passed() const;
  const RuleResult* find(const std::string& id) const;
  std::vector<std::string> failed_rules() const;
  void append(const ValidationReport& other);
};

/// Damping coefficients together with the exterior floor constants they must respect.
struct CoefficientSet {
  FieldD alpha;
  FieldD beta;
  double alpha0 = 0.0;
  double beta0 = 0.0;
  double r0 = 0.0;
};

/// Samplewise scan of nonnegativity, the exterior floors on |x| >= r0 and alpha + beta > 0.
ValidationReport validate_coefficients(const CoefficientSet& cs);

enum class MaskKind { none, all, left_half, right_half };

/// 1 where the mask is on, 0 elsewhere; halves split along the first axis at x = 0.
FieldD make_mask(const GridD& grid, MaskKind kind);

/// floor * (eta + (1 - eta) * mask) with eta = cutoff_eta(r0 / 2): equals the floor on
/// |x| >= r0 and follows the mask inside the ball.
FieldD ring_profile(const GridD& grid, double floor, double r0, const FieldD& mask);
FieldD ring_profile(const GridD& grid, double floor, double r0, MaskKind mask);

/// alpha vanishes on the left half of the inner ball, beta on the right half.
CoefficientSet complementary_patch(const GridD& grid, double alpha0, double beta0, double r0);

/// Constant coefficients; r0 only records the exterior radius.
CoefficientSet constant_coefficients(const GridD& grid, double alpha, double beta, double r0);

using ScalarFn = std::function<double(double)>;

/// Nonlocal coefficient f(z), z = |grad u| >= 0, with F(z) = int_0^z f(sqrt(s)) ds.
struct NonlocalPart {
  std::string name;
  ScalarFn f;
  ScalarFn df;
  std::optional<ScalarFn> antiderivative;
};

/// Local nonlinearity g(s) with G(s) = int_0^s g, and growth constants |g'| <= C (1 + |s|^(p-1)).
struct LocalPart {
  std::string name;
  ScalarFn g;
  ScalarFn dg;
  std::optional<ScalarFn> antiderivative;
  double p = 1.0;
  double C = 0.0;
};

struct NonlinearitySpec {
  NonlocalPart f;
  LocalPart g;
};

NonlocalPart f_constant(double a);
/// a + b z^2.
NonlocalPart f_kirchhoff(double a, double b);
/// a + b zc^2 tanh(z^2 / zc^2): Kirchhoff-like near 0, bounded by a + b zc^2.
NonlocalPart f_saturating(double a, double b, double zc);

LocalPart g_zero();
LocalPart g_cubic();
/// |s|^(p-1) s with C = p.
LocalPart g_odd_power(double p);
/// -s^3; violates the sign condition, for blow-up demonstrations only.
LocalPart g_negative_cubic();

double f_value(const NonlinearitySpec& spec, double z);
/// Closed form when registered, else adaptive Simpson to 1e-10 absolute.
double F_value(const NonlinearitySpec& spec, double z);
double G_value(const NonlinearitySpec& spec, double s);

/// Adaptive Simpson quadrature of fn on [a, b].
double adaptive_simpson(const ScalarFn& fn, double a, double b, double abs_tol);

/// Samplewise g(u); throws BlowUpError on non-finite output.
FieldD g_apply(const NonlinearitySpec& spec, const FieldD& u);
FieldD g_prime_apply(const NonlinearitySpec& spec, const FieldD& u);
/// h^d * sum G(u_k), always >= 0 under the sign condition.
double G_integral(const NonlinearitySpec& spec, const FieldD& u);

/// Samples f >= 0, g(s)s >= 0, the growth bound and finite-difference derivative checks.
ValidationReport validate_nonlinearity(const NonlinearitySpec& spec, double s_min, double s_max,
                                       int samples, int dim);

/// A exp(1 / ((|x|/rho)^2 - 1)) inside |x| < rho, 0 outside.
FieldD bump_forcing(const GridD& grid, double amplitude, double rho);

struct Numerics {
  double dt = 1e-3;
  double cg_tol = 1e-10;
};

/// min(1e-3, h^2 / 4).
double default_time_step(const GridD& grid);

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  GridD grid;
  double gamma = 1.0;
  double lambda = 1.0;
  CoefficientSet coefficients;
  NonlinearitySpec nonlinearity;
  FieldD forcing;
  Numerics numerics;
  bool allow_hypothesis_violation = false;

  ImplicitOperatorSpec<double> implicit_spec() const {
    return {numerics.dt, gamma, lambda, coefficients.alpha, coefficients.beta};
  }
};

/// Every hypothesis and numerics rule for a scenario, without running it.
ValidationReport validate_scenario(const Scenario& sc);

/// Throws InvalidArgument unless the scenario validates; with the override flag set,
/// failed waivable rules are returned instead of thrown.
std::vector<std::string> admit_scenario(const Scenario& sc);

/// "(i)" or "(i,j)" for a flat sample index.
std::string sample_label(const GridD& grid, Eigen::Index k);

}  // namespace plate
