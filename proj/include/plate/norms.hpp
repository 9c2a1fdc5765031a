#pragma once

#include <cmath>

#include "plate/operators.hpp"

namespace plate {

enum class NormKind { L2, H1, H2, H3 };

/// The H3 norm is only a stencil-Laplacian proxy; callers opt in explicitly.
enum class H3Proxy { reject, accept };

/// Discrete Sobolev norms built from the rectangle rule and the centered stencils:
/// H1^2 = L2^2 + |grad u|^2, H2^2 = H1^2 + |lap u|^2, H3^2 = H2^2 + |grad lap u|^2.
template <typename Scalar>
Scalar norm(const Field<Scalar>& u, NormKind kind, H3Proxy proxy = H3Proxy::reject) {
  require_finite(u, "norm");
  if (kind == NormKind::H3 && proxy != H3Proxy::accept)
    throw InvalidArgument("H3 norm is a discrete proxy; pass H3Proxy::accept to use it");
  const Scalar w = u.grid().cell_volume();
  Scalar sq = w * u.values().squaredNorm();
  if (kind == NormKind::L2) return std::sqrt(sq);
  for (const auto& c : gradient(u)) sq += w * c.values().squaredNorm();
  if (kind == NormKind::H1) return std::sqrt(sq);
  const Field<Scalar> lap = laplacian(u);
  sq += w * lap.values().squaredNorm();
  if (kind == NormKind::H2) return std::sqrt(sq);
  for (const auto& c : gradient(lap)) sq += w * c.values().squaredNorm();
  return std::sqrt(sq);
}

/// |(u, v)| in H2 x L2.
template <typename Scalar>
Scalar phase_norm(const Field<Scalar>& u, const Field<Scalar>& v) {
  const Scalar a = norm(u, NormKind::H2);
  const Scalar b = norm(v, NormKind::L2);
  return std::sqrt(a * a + b * b);
}

template <typename Scalar>
Scalar phase_norm(const State<Scalar>& s) {
  return phase_norm(s.u, s.v);
}

/// Cutoff-weighted exterior norm sqrt(|eta_r u|_H2^2 + |eta_r v|_L2^2).
template <typename Scalar>
Scalar tail_norm(const Field<Scalar>& u, const Field<Scalar>& v, const Field<Scalar>& eta) {
  return phase_norm(hadamard(eta, u), hadamard(eta, v));
}

template <typename Scalar>
Scalar tail_norm(const State<Scalar>& s, Scalar r) {
  return tail_norm(s.u, s.v, cutoff_eta(s.grid(), r));
}

}  // namespace plate
