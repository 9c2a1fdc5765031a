#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "plate/errors.hpp"

namespace plate {

/// Uniform periodic box [-L, L)^d, d in {1, 2}, with N points per axis.
template <typename Scalar>
class Grid {
 public:
  Grid(int dim, Scalar half_width, int points)
      : dim_(dim), half_width_(half_width), points_(points) {
    if (dim != 1 && dim != 2) throw InvalidArgument("grid dimension must be 1 or 2");
    if (!(half_width > Scalar(0)) || !std::isfinite(static_cast<double>(half_width)))
      throw InvalidArgument("grid half-width must be positive");
    if (points < 8) throw InvalidArgument("grid needs at least 8 points per axis");
    if (points % 2 != 0) throw InvalidArgument("grid points per axis must be even");
    spacing_ = Scalar(2) * half_width_ / Scalar(points_);
  }

  int dim() const noexcept { return dim_; }
  Scalar half_width() const noexcept { return half_width_; }
  int points() const noexcept { return points_; }
  Scalar spacing() const noexcept { return spacing_; }

  /// Number of samples, N^d.
  Eigen::Index size() const noexcept {
    return dim_ == 1 ? Eigen::Index(points_) : Eigen::Index(points_) * points_;
  }

  /// Quadrature weight h^d of the rectangle rule.
  Scalar cell_volume() const noexcept {
    return dim_ == 1 ? spacing_ : spacing_ * spacing_;
  }

  /// Box volume (2L)^d.
  Scalar volume() const noexcept {
    const Scalar side = Scalar(2) * half_width_;
    return dim_ == 1 ? side : side * side;
  }

  Scalar coordinate(int i) const noexcept { return -half_width_ + Scalar(wrap(i)) * spacing_; }

  int wrap(int i) const noexcept {
    const int r = i % points_;
    return r < 0 ? r + points_ : r;
  }

  /// Row-major flat index; axis 0 is the slow axis in 2-D.
  Eigen::Index flat(int i, int j = 0) const noexcept {
    return dim_ == 1 ? Eigen::Index(wrap(i))
                     : Eigen::Index(wrap(i)) * points_ + wrap(j);
  }

  /// Physical position of a flat sample (y = 0 in 1-D).
  std::array<Scalar, 2> position(Eigen::Index k) const noexcept {
    if (dim_ == 1) return {coordinate(static_cast<int>(k)), Scalar(0)};
    return {coordinate(static_cast<int>(k / points_)), coordinate(static_cast<int>(k % points_))};
  }

  /// Euclidean distance of a sample from the box centre (minimal image).
  Scalar radius(Eigen::Index k) const noexcept {
    auto p = position(k);
    for (auto& c : p) {
      if (c > half_width_) c -= Scalar(2) * half_width_;
      if (c < -half_width_) c += Scalar(2) * half_width_;
    }
    return std::sqrt(p[0] * p[0] + p[1] * p[1]);
  }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.dim_ == b.dim_ && a.points_ == b.points_ && a.half_width_ == b.half_width_;
  }
  friend bool operator!=(const Grid& a, const Grid& b) noexcept { return !(a == b); }

 private:
  int dim_;
  Scalar half_width_;
  int points_;
  Scalar spacing_{};
};

template <typename Scalar>
Grid<Scalar> make_grid(int dim, Scalar half_width, int points) {
  return Grid<Scalar>(dim, half_width, points);
}

/// Real samples on a grid, stored as an Eigen column vector.
template <typename Scalar>
class Field {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit Field(const Grid<Scalar>& grid) : grid_(grid), values_(Vector::Zero(grid.size())) {}

  Field(const Grid<Scalar>& grid, Vector values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw InvalidArgument("field shape does not match grid");
  }

  static Field constant(const Grid<Scalar>& grid, Scalar c) {
    return Field(grid, Vector::Constant(grid.size(), c));
  }

  /// Samples fn(position) at every grid point.
  template <typename Fn>
  static Field from_function(const Grid<Scalar>& grid, Fn&& fn) {
    Field out(grid);
    for (Eigen::Index k = 0; k < grid.size(); ++k) out.values_[k] = fn(grid.position(k));
    return out;
  }

  const Grid<Scalar>& grid() const noexcept { return grid_; }
  const Vector& values() const noexcept { return values_; }
  Vector& values() noexcept { return values_; }
  Eigen::Index size() const noexcept { return values_.size(); }

  Scalar operator[](Eigen::Index k) const { return values_[k]; }
  Scalar& operator[](Eigen::Index k) { return values_[k]; }

  /// Periodic sample access.
  Scalar at(int i, int j = 0) const { return values_[grid_.flat(i, j)]; }

  bool is_finite() const { return values_.allFinite(); }

  Field& operator+=(const Field& o) {
    require_same_grid(o);
    values_ += o.values_;
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same_grid(o);
    values_ -= o.values_;
    return *this;
  }
  Field& operator*=(Scalar c) {
    values_ *= c;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Scalar c, Field a) { return a *= c; }
  friend Field operator*(Field a, Scalar c) { return a *= c; }
  friend Field operator-(Field a) { return a *= Scalar(-1); }

  /// Samplewise product.
  friend Field hadamard(const Field& a, const Field& b) {
    a.require_same_grid(b);
    return Field(a.grid_, (a.values_.array() * b.values_.array()).matrix());
  }

  void require_same_grid(const Field& o) const {
    if (grid_ != o.grid_) throw InvalidArgument("fields live on different grids");
  }

 private:
  Grid<Scalar> grid_;
  Vector values_;
};

/// Phase-space point (u, u_t) at time t.
template <typename Scalar>
struct State {
  Field<Scalar> u;
  Field<Scalar> v;
  Scalar t = Scalar(0);

  State(Field<Scalar> u_, Field<Scalar> v_, Scalar t_ = Scalar(0))
      : u(std::move(u_)), v(std::move(v_)), t(t_) {
    u.require_same_grid(v);
  }

  static State zero(const Grid<Scalar>& grid) { return State(Field<Scalar>(grid), Field<Scalar>(grid)); }

  const Grid<Scalar>& grid() const noexcept { return u.grid(); }
};

/// Discrete L2 inner product h^d * sum(a_k b_k).
template <typename Scalar>
Scalar inner(const Field<Scalar>& a, const Field<Scalar>& b) {
  a.require_same_grid(b);
  return a.grid().cell_volume() * a.values().dot(b.values());
}

template <typename Scalar>
void require_finite(const Field<Scalar>& u, const char* what) {
  if (!u.is_finite()) throw InvalidArgument(std::string(what) + ": non-finite samples");
}

/// Quintic smoothstep 6s^5 - 15s^4 + 10s^3 on s clamped to [0, 1].
template <typename Scalar>
Scalar smoothstep5(Scalar s) {
  if (s <= Scalar(0)) return Scalar(0);
  if (s >= Scalar(1)) return Scalar(1);
  return s * s * s * (s * (s * Scalar(6) - Scalar(15)) + Scalar(10));
}

/// Radial cutoff: 0 on |x| <= r, 1 on |x| >= 2r, smoothstep in between.
template <typename Scalar>
Field<Scalar> cutoff_eta(const Grid<Scalar>& grid, Scalar r) {
  if (!(r > Scalar(0))) throw InvalidArgument("cutoff radius must be positive");
  if (!(Scalar(2) * r < grid.half_width()))
    throw InvalidArgument("cutoff transition band 2r must fit inside the box (2r < L)");
  Field<Scalar> eta(grid);
  for (Eigen::Index k = 0; k < grid.size(); ++k) eta[k] = smoothstep5(grid.radius(k) / r - Scalar(1));
  return eta;
}

}  // namespace plate
