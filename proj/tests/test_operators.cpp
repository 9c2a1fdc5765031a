#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "plate/norms.hpp"

using namespace plate;

namespace {

double max_abs(const FieldD& f) { return f.values().cwiseAbs().maxCoeff(); }

/// Independent face-by-face evaluation of h^{d-2} sum_faces beta_face (du)(dw).
double face_sum_oracle(const FieldD& u, const FieldD& w, const FieldD& beta) {
  const auto& g = u.grid();
  const int n = g.points();
  const double h = g.spacing();
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < (g.dim() == 1 ? 1 : n); ++j) {
      for (int axis = 0; axis < g.dim(); ++axis) {
        const int i2 = axis == 0 ? (i + 1) % n : i;
        const int j2 = axis == 1 ? (j + 1) % n : j;
        const auto a = g.flat(i, j), b = g.flat(i2, j2);
        sum += 0.5 * (beta[a] + beta[b]) * (u[b] - u[a]) * (w[b] - w[a]);
      }
    }
  }
  return sum * std::pow(h, g.dim() - 2);
}

/// max-norm error of `op` against `exact` on N = 32, 64, 128, 256; returns the observed orders.
std::vector<double> refinement_orders(int dim, const std::function<FieldD(const GridD&)>& apply_op,
                                      const std::function<double(double, double)>& exact) {
  std::vector<double> errors;
  for (int n : {32, 64, 128, 256}) {
    const auto g = make_grid(dim, std::numbers::pi, n);
    const FieldD approx = apply_op(g);
    const auto ref = FieldD::from_function(g, [&](const std::array<double, 2>& x) { return exact(x[0], x[1]); });
    errors.push_back(max_abs(approx - ref));
  }
  std::vector<double> orders;
  for (std::size_t i = 1; i < errors.size(); ++i) orders.push_back(std::log2(errors[i - 1] / errors[i]));
  return orders;
}

FieldD smooth_u(const GridD& g) {
  return FieldD::from_function(g, [&](const std::array<double, 2>& x) {
    return g.dim() == 1 ? std::sin(2 * x[0]) : std::sin(2 * x[0]) * std::cos(x[1]);
  });
}

FieldD smooth_beta(const GridD& g) {
  return FieldD::from_function(g, [](const std::array<double, 2>& x) { return 2.0 + std::cos(x[0]); });
}

}  // namespace

TEST_CASE("gradient: constants, seam and refinement order") {
  const auto g = make_grid(1, std::numbers::pi, 32);
  for (const auto& c : gradient(FieldD::constant(g, 3.0))) CHECK(max_abs(c) == 0.0);

  FieldD spike(g);
  spike[0] = 1.0;
  const auto gs = gradient(spike)[0];
  CHECK(gs.is_finite());
  CHECK(gs[1] == doctest::Approx(-gs[g.points() - 1]));
  CHECK(gs[1] == doctest::Approx(-1.0 / (2 * g.spacing())));

  for (double order : refinement_orders(
           1, [](const GridD& gr) { return gradient(smooth_u(gr))[0]; },
           [](double x, double) { return 2 * std::cos(2 * x); }))
    CHECK(order >= 1.9);
  for (double order : refinement_orders(
           2, [](const GridD& gr) { return gradient(smooth_u(gr))[1]; },
           [](double x, double y) { return -std::sin(2 * x) * std::sin(y); }))
    CHECK(order >= 1.9);
}

TEST_CASE("laplacian: discrete Fourier eigenfunction") {
  const auto g = make_grid(1, std::numbers::pi, 64);
  CHECK(max_abs(laplacian(FieldD::constant(g, 2.0))) < 1e-12);
  const auto s = oracle::sine_mode(g, 3);
  const double mu = oracle::stencil_mu(oracle::wavenumber(3, g.half_width()), g.spacing());
  CHECK(max_abs(laplacian(s) + mu * s) < 1e-12);
}

TEST_CASE("bilaplacian: squared eigenvalue and nonnegativity") {
  const auto g = make_grid(1, std::numbers::pi, 64);
  CHECK(max_abs(bilaplacian(FieldD::constant(g, 2.0))) < 1e-10);
  const auto s = oracle::sine_mode(g, 3);
  const double mu = oracle::stencil_mu(oracle::wavenumber(3, g.half_width()), g.spacing());
  CHECK(max_abs(bilaplacian(s) - mu * mu * s) < 1e-10 * mu * mu);

  std::mt19937_64 rng(3);
  const auto g2 = make_grid(2, 2.0, 16);
  for (int i = 0; i < 20; ++i) {
    const auto u = oracle::random_field(g2, rng);
    const double lhs = inner(bilaplacian(u), u);
    const double rhs = inner(laplacian(u), laplacian(u));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(lhs >= 0.0);
  }
}

TEST_CASE("div_beta_grad: constant and zero coefficients, negative rejected") {
  std::mt19937_64 rng(17);
  for (int dim : {1, 2}) {
    const auto g = make_grid(dim, 2.0, 16);
    const auto u = oracle::random_field(g, rng);
    const double c = 1.75;
    const FieldD a = div_beta_grad(u, FieldD::constant(g, c));
    const FieldD b = c * laplacian(u);
    CHECK(max_abs(a - b) <= 1e-12 * max_abs(b));
    CHECK(max_abs(div_beta_grad(u, FieldD(g))) == 0.0);
    FieldD bad = FieldD::constant(g, 1.0);
    bad[3] = -1e-3;
    CHECK_THROWS_AS(div_beta_grad(u, bad), InvalidArgument);
  }
}

TEST_CASE("div_beta_grad: summation by parts against the face-sum oracle at N = 16") {
  std::mt19937_64 rng(23);
  for (int dim : {1, 2}) {
    const auto g = make_grid(dim, 2.0, 16);
    for (int i = 0; i < 20; ++i) {
      const auto u = oracle::random_field(g, rng);
      const auto w = oracle::random_field(g, rng);
      const auto beta = oracle::random_nonnegative_field(g, rng, 3.0);
      const double green = face_sum_oracle(u, w, beta);
      const double uw = inner(div_beta_grad(u, beta), w);
      const double wu = inner(u, div_beta_grad(w, beta));
      const double scale = std::abs(green) + 1.0;
      CHECK(std::abs(uw + green) <= 1e-12 * scale);
      CHECK(std::abs(uw - wu) <= 1e-12 * scale);
      CHECK(inner(div_beta_grad(u, beta), u) <= 1e-12 * scale);
      CHECK(face_form(u, w, beta) == doctest::Approx(green).epsilon(1e-12));
    }
  }
}

TEST_CASE("stencil operators are linear, symmetric and signed on random fields") {
  std::mt19937_64 rng(29);
  for (int dim : {1, 2}) {
    const auto g = make_grid(dim, 3.0, dim == 1 ? 64 : 16);
    const auto beta = oracle::random_nonnegative_field(g, rng, 2.0);
    for (int i = 0; i < 25; ++i) {
      const auto u = oracle::random_field(g, rng);
      const auto w = oracle::random_field(g, rng);
      const double a = 0.3, b = -2.1;
      const FieldD comb = a * u + b * w;
      const FieldD lin_l = laplacian(comb) - (a * laplacian(u) + b * laplacian(w));
      CHECK(max_abs(lin_l) <= 1e-12 * max_abs(laplacian(comb)));
      const FieldD lin_d = div_beta_grad(comb, beta) - (a * div_beta_grad(u, beta) + b * div_beta_grad(w, beta));
      CHECK(max_abs(lin_d) <= 1e-12 * max_abs(div_beta_grad(comb, beta)));

      const double s1 = inner(laplacian(u), w), s2 = inner(u, laplacian(w));
      CHECK(std::abs(s1 - s2) <= 1e-12 * (std::abs(s1) + 1.0));
      CHECK(inner(laplacian(u), u) <= 0.0);
      CHECK(inner(div_beta_grad(u, beta), u) <= 0.0);
      CHECK(inner(bilaplacian(u), u) >= 0.0);
    }
  }
}

TEST_CASE("consistency order of laplacian, bilaplacian and div_beta_grad") {
  for (int dim : {1, 2}) {
    const double q = dim == 1 ? 4.0 : 5.0;  // |k|^2
    auto u_exact = [dim](double x, double y) { return dim == 1 ? std::sin(2 * x) : std::sin(2 * x) * std::cos(y); };
    for (double order : refinement_orders(
             dim, [](const GridD& g) { return laplacian(smooth_u(g)); },
             [&](double x, double y) { return -q * u_exact(x, y); }))
      CHECK(order >= 1.9);
    for (double order : refinement_orders(
             dim, [](const GridD& g) { return bilaplacian(smooth_u(g)); },
             [&](double x, double y) { return q * q * u_exact(x, y); }))
      CHECK(order >= 1.9);
    // div((2 + cos x) grad u) = -sin x * u_x + (2 + cos x) lap u
    for (double order : refinement_orders(
             dim, [](const GridD& g) { return div_beta_grad(smooth_u(g), smooth_beta(g)); },
             [&](double x, double y) {
               const double ux = dim == 1 ? 2 * std::cos(2 * x) : 2 * std::cos(2 * x) * std::cos(y);
               return -std::sin(x) * ux + (2 + std::cos(x)) * (-q * u_exact(x, y));
             }))
      CHECK(order >= 1.9);
  }
}

TEST_CASE("compact gradient norm equals -<lap u, u>") {
  std::mt19937_64 rng(31);
  for (int dim : {1, 2}) {
    const auto g = make_grid(dim, 3.0, 16);
    const auto u = oracle::random_field(g, rng);
    CHECK(compact_gradient_norm_sq(u) == doctest::Approx(-inner(laplacian(u), u)).epsilon(1e-12));
  }
}

namespace {

ImplicitOperatorSpec<double> spec_for(const GridD& g, double dt, double alpha, double beta) {
  return {dt, 1.3, 0.7, FieldD::constant(g, alpha), FieldD::constant(g, beta)};
}

}  // namespace

TEST_CASE("apply_implicit: zero, Fourier symbol and coercivity") {
  const auto g = make_grid(1, std::numbers::pi, 64);
  const auto spec = spec_for(g, 0.05, 0.0, 0.0);
  CHECK(max_abs(apply_implicit(spec, FieldD(g))) == 0.0);

  const auto s = oracle::sine_mode(g, 5);
  const double mu = oracle::stencil_mu(oracle::wavenumber(5, g.half_width()), g.spacing());
  const double symbol = 1 + spec.dt * spec.dt * (spec.gamma * mu * mu + spec.lambda);
  CHECK(max_abs(apply_implicit(spec, s) - symbol * s) < 1e-10);

  std::mt19937_64 rng(37);
  const auto g2 = make_grid(2, 3.0, 16);
  for (int i = 0; i < 20; ++i) {
    ImplicitOperatorSpec<double> sp{0.01, 1.0, 2.0, oracle::random_nonnegative_field(g2, rng),
                                    oracle::random_nonnegative_field(g2, rng)};
    const auto w = oracle::random_field(g2, rng);
    CHECK(inner(apply_implicit(sp, w), w) >= (1 + sp.dt * sp.dt * sp.lambda) * inner(w, w));
  }
  CHECK_THROWS_AS(apply_implicit(spec, FieldD(make_grid(1, 1.0, 64))), InvalidArgument);
}

TEST_CASE("solve_spd: recovery, zero rhs, Fourier inverse, iteration cap") {
  std::mt19937_64 rng(41);
  const double tol = 1e-10;
  for (int dim : {1, 2}) {
    const auto g = make_grid(dim, 5.0, dim == 1 ? 128 : 32);
    ImplicitOperatorSpec<double> spec{1e-2, 1.0, 1.0, oracle::random_nonnegative_field(g, rng),
                                      oracle::random_nonnegative_field(g, rng)};
    for (int i = 0; i < 5; ++i) {
      const auto w_star = oracle::random_field(g, rng);
      const auto res = solve_spd(spec, apply_implicit(spec, w_star), tol);
      CHECK(norm(res.solution - w_star, NormKind::L2) <= 10 * tol * norm(w_star, NormKind::L2));
      CHECK(res.residual <= tol);
      // deterministic
      const auto again = solve_spd(spec, apply_implicit(spec, w_star), tol);
      CHECK((again.solution.values().array() == res.solution.values().array()).all());
    }
    const auto zero = solve_spd(spec, FieldD(g), tol);
    CHECK(zero.iterations <= 1);
    CHECK(max_abs(zero.solution) == 0.0);
  }

  const auto g = make_grid(1, std::numbers::pi, 64);
  const auto spec = spec_for(g, 0.05, 0.0, 0.0);
  const auto s = oracle::sine_mode(g, 4);
  const double mu = oracle::stencil_mu(oracle::wavenumber(4, g.half_width()), g.spacing());
  const double symbol = 1 + spec.dt * spec.dt * (spec.gamma * mu * mu + spec.lambda);
  CHECK(max_abs(solve_spd(spec, s, tol).solution - (1.0 / symbol) * s) < 1e-9);

  const auto rough = oracle::random_field(g, rng);
  const auto stiff = spec_for(g, 10.0, 1.0, 1.0);
  try {
    solve_spd(stiff, rough, 1e-300);
    FAIL("expected the iteration cap");
  } catch (const SolverError& e) {
    CHECK(e.iterations() >= 10 * 64);
    CHECK(e.residual() > 0.0);
  }
  CHECK_THROWS_AS(solve_spd(spec, s, 0.0), InvalidArgument);
  CHECK_THROWS_AS(solve_spd(spec, s, 1.0), InvalidArgument);
}
