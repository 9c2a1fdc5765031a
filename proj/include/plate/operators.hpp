#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "plate/grid.hpp"

namespace plate {

// Centered periodic stencils. Every operator is matrix-free and linear.

/// Centered difference per axis, (u[i+1] - u[i-1]) / 2h.
template <typename Scalar>
std::vector<Field<Scalar>> gradient(const Field<Scalar>& u) {
  const auto& g = u.grid();
  const int n = g.points();
  const Scalar c = Scalar(1) / (Scalar(2) * g.spacing());
  std::vector<Field<Scalar>> out(g.dim(), Field<Scalar>(g));
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) out[0][i] = c * (u.at(i + 1) - u.at(i - 1));
    return out;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto k = g.flat(i, j);
      out[0][k] = c * (u.at(i + 1, j) - u.at(i - 1, j));
      out[1][k] = c * (u.at(i, j + 1) - u.at(i, j - 1));
    }
  }
  return out;
}

/// 3-point (1-D) / 5-point (2-D) Laplacian.
template <typename Scalar>
Field<Scalar> laplacian(const Field<Scalar>& u) {
  const auto& g = u.grid();
  const int n = g.points();
  const Scalar c = Scalar(1) / (g.spacing() * g.spacing());
  Field<Scalar> out(g);
  const auto& x = u.values();
  auto& y = out.values();
  if (g.dim() == 1) {
    y[0] = c * (x[n - 1] - Scalar(2) * x[0] + x[1]);
    for (int i = 1; i < n - 1; ++i) y[i] = c * (x[i - 1] - Scalar(2) * x[i] + x[i + 1]);
    y[n - 1] = c * (x[n - 2] - Scalar(2) * x[n - 1] + x[0]);
    return out;
  }
  for (int i = 0; i < n; ++i) {
    const Eigen::Index row = Eigen::Index(i) * n;
    const Eigen::Index up = Eigen::Index(i == 0 ? n - 1 : i - 1) * n;
    const Eigen::Index down = Eigen::Index(i == n - 1 ? 0 : i + 1) * n;
    for (int j = 0; j < n; ++j) {
      const int jl = j == 0 ? n - 1 : j - 1;
      const int jr = j == n - 1 ? 0 : j + 1;
      y[row + j] = c * (x[up + j] + x[down + j] + x[row + jl] + x[row + jr] - Scalar(4) * x[row + j]);
    }
  }
  return out;
}

/// Always laplacian(laplacian(u)), so <bilaplacian(u), u> = |laplacian(u)|^2 exactly.
template <typename Scalar>
Field<Scalar> bilaplacian(const Field<Scalar>& u) {
  return laplacian(laplacian(u));
}

template <typename Scalar>
void require_nonnegative(const Field<Scalar>& c, const char* name) {
  if ((c.values().array() < Scalar(0)).any())
    throw InvalidArgument(std::string(name) + " has a negative sample");
}

/// Flux-form div(beta grad u) with arithmetic face averages of beta.
template <typename Scalar>
Field<Scalar> div_beta_grad(const Field<Scalar>& u, const Field<Scalar>& beta) {
  u.require_same_grid(beta);
  require_nonnegative(beta, "beta");
  const auto& g = u.grid();
  const int n = g.points();
  const Scalar c = Scalar(1) / (g.spacing() * g.spacing());
  Field<Scalar> out(g);
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      const Scalar bp = Scalar(0.5) * (beta.at(i) + beta.at(i + 1));
      const Scalar bm = Scalar(0.5) * (beta.at(i) + beta.at(i - 1));
      out[i] = c * (bp * (u.at(i + 1) - u.at(i)) - bm * (u.at(i) - u.at(i - 1)));
    }
    return out;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Scalar b0 = beta.at(i, j);
      const Scalar u0 = u.at(i, j);
      Scalar acc = Scalar(0.5) * (b0 + beta.at(i + 1, j)) * (u.at(i + 1, j) - u0);
      acc -= Scalar(0.5) * (b0 + beta.at(i - 1, j)) * (u0 - u.at(i - 1, j));
      acc += Scalar(0.5) * (b0 + beta.at(i, j + 1)) * (u.at(i, j + 1) - u0);
      acc -= Scalar(0.5) * (b0 + beta.at(i, j - 1)) * (u0 - u.at(i, j - 1));
      out[g.flat(i, j)] = c * acc;
    }
  }
  return out;
}

/// Face-sum form h^{d-2} * sum_faces beta_face (du)(dw) = -<div_beta_grad(u), w>.
/// With beta = 1 and w = u it is the squared compact gradient norm.
template <typename Scalar>
Scalar face_form(const Field<Scalar>& u, const Field<Scalar>& w, const Field<Scalar>& beta) {
  u.require_same_grid(w);
  u.require_same_grid(beta);
  const auto& g = u.grid();
  const int n = g.points();
  Scalar sum(0);
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i)
      sum += Scalar(0.5) * (beta.at(i) + beta.at(i + 1)) * (u.at(i + 1) - u.at(i)) * (w.at(i + 1) - w.at(i));
    return sum / g.spacing();
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Scalar b0 = beta.at(i, j);
      sum += Scalar(0.5) * (b0 + beta.at(i + 1, j)) * (u.at(i + 1, j) - u.at(i, j)) *
             (w.at(i + 1, j) - w.at(i, j));
      sum += Scalar(0.5) * (b0 + beta.at(i, j + 1)) * (u.at(i, j + 1) - u.at(i, j)) *
             (w.at(i, j + 1) - w.at(i, j));
    }
  }
  return sum;
}

/// Squared forward-difference gradient norm, equal to -<laplacian(u), u>.
/// This is the norm the Kirchhoff coefficient and its antiderivative see.
template <typename Scalar>
Scalar compact_gradient_norm_sq(const Field<Scalar>& u) {
  const auto& g = u.grid();
  const int n = g.points();
  Scalar sum(0);
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      const Scalar d = u.at(i + 1) - u.at(i);
      sum += d * d;
    }
    return sum / g.spacing();
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Scalar a = u.at(i + 1, j) - u.at(i, j);
      const Scalar b = u.at(i, j + 1) - u.at(i, j);
      sum += a * a + b * b;
    }
  }
  return sum;
}

/// A_h w = w + dt*alpha*w - dt*div(beta grad w) + dt^2*(gamma*bilap(w) + lambda*w).
template <typename Scalar>
struct ImplicitOperatorSpec {
  Scalar dt;
  Scalar gamma;
  Scalar lambda;
  Field<Scalar> alpha;
  Field<Scalar> beta;

  void validate() const {
    if (!(dt > Scalar(0))) throw InvalidArgument("time step must be positive");
    if (!(gamma > Scalar(0))) throw InvalidArgument("gamma must be positive");
    if (!(lambda > Scalar(0))) throw InvalidArgument("lambda must be positive");
    alpha.require_same_grid(beta);
    require_nonnegative(alpha, "alpha");
    require_nonnegative(beta, "beta");
  }

  const Grid<Scalar>& grid() const noexcept { return alpha.grid(); }
};

template <typename Scalar>
Field<Scalar> apply_implicit(const ImplicitOperatorSpec<Scalar>& spec, const Field<Scalar>& w) {
  w.require_same_grid(spec.alpha);
  const Scalar dt = spec.dt;
  Field<Scalar> out = bilaplacian(w);
  out.values() *= dt * dt * spec.gamma;
  out.values().array() += (Scalar(1) + dt * dt * spec.lambda + dt * spec.alpha.values().array()) *
                          w.values().array();
  out.values() -= dt * div_beta_grad(w, spec.beta).values();
  return out;
}

enum class CgStatus { converged, iteration_cap, indefinite };

template <typename Scalar>
struct CgResult {
  Field<Scalar> solution;
  int iterations = 0;
  /// Relative residual |A w - rhs| / |rhs| at exit.
  Scalar residual = Scalar(0);
  CgStatus status = CgStatus::converged;
};

/// Unpreconditioned CG from a zero initial guess. `apply` must be symmetric in
/// the grid inner product. The recursive residual is confirmed against the
/// true residual before reporting convergence.
template <typename Scalar, typename Apply>
CgResult<Scalar> conjugate_gradient(Apply&& apply, const Field<Scalar>& rhs, Scalar tol, long max_iter) {
  using Vector = typename Field<Scalar>::Vector;
  const auto& g = rhs.grid();
  CgResult<Scalar> res{Field<Scalar>(g)};
  const Scalar rhs_norm = rhs.values().norm();
  if (rhs_norm == Scalar(0)) return res;

  Vector& x = res.solution.values();
  Vector r = rhs.values();
  Vector p = r;
  Field<Scalar> work(g);
  Scalar rr = r.squaredNorm();
  const Scalar target = tol * rhs_norm;
  long it = 0;
  while (true) {
    if (std::sqrt(rr) <= target) {
      // confirm with the true residual
      const Vector true_r = rhs.values() - apply(res.solution).values();
      const Scalar true_norm = true_r.norm();
      if (true_norm <= target) {
        res.residual = true_norm / rhs_norm;
        break;
      }
      r = true_r;
      p = r;
      rr = r.squaredNorm();
    }
    if (it >= max_iter) {
      res.residual = std::sqrt(rr) / rhs_norm;
      res.status = CgStatus::iteration_cap;
      break;
    }
    work.values() = p;
    const Vector ap = apply(work).values();
    const Scalar curvature = p.dot(ap);
    if (!(curvature > Scalar(0))) {
      res.residual = std::sqrt(rr) / rhs_norm;
      res.status = CgStatus::indefinite;
      break;
    }
    const Scalar step = rr / curvature;
    x.noalias() += step * p;
    r.noalias() -= step * ap;
    const Scalar rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
    ++it;
  }
  res.iterations = static_cast<int>(it);
  return res;
}

/// Solves A_h w = rhs to relative residual `tol`; throws SolverError past 10*N^d iterations.
template <typename Scalar>
CgResult<Scalar> solve_spd(const ImplicitOperatorSpec<Scalar>& spec, const Field<Scalar>& rhs, Scalar tol) {
  if (!(tol > Scalar(0) && tol < Scalar(1))) throw InvalidArgument("CG tolerance must lie in (0, 1)");
  spec.validate();
  rhs.require_same_grid(spec.alpha);
  require_finite(rhs, "solve_spd rhs");
  const long cap = 10L * static_cast<long>(rhs.grid().size());
  auto res = conjugate_gradient<Scalar>(
      [&spec](const Field<Scalar>& w) { return apply_implicit(spec, w); }, rhs, tol, cap);
  if (res.status != CgStatus::converged)
    throw SolverError("implicit solve did not converge (relative residual " +
                          std::to_string(static_cast<double>(res.residual)) + ")",
                      res.iterations, static_cast<double>(res.residual));
  return res;
}

}  // namespace plate
