#include "plate/sampling.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "plate/norms.hpp"

namespace plate {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
  std::uint64_t z = master + counter + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

FieldD random_lowpass_field(const GridD& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int m_max = grid.points() / 8;
  const double k0 = std::numbers::pi / grid.half_width();
  FieldD out(grid);
  const int m_lo = grid.dim() == 1 ? 0 : -m_max;

  // Modes m and -m coincide for a real field, so the first axis runs over m >= 0.
  for (int m1 = 0; m1 <= m_max; ++m1) {
    for (int m2 = m_lo; m2 <= (grid.dim() == 1 ? 0 : m_max); ++m2) {
      if (grid.dim() == 2 && m1 == 0 && m2 < 0) continue;
      const double mag = std::sqrt(double(m1) * m1 + double(m2) * m2);
      if (mag > m_max) continue;
      const double weight = 1.0 / (1.0 + mag * mag * mag);
      const double a = weight * normal(rng);
      const double b = weight * normal(rng);
      for (Eigen::Index k = 0; k < grid.size(); ++k) {
        const auto x = grid.position(k);
        const double phase = k0 * (m1 * x[0] + m2 * x[1]);
        out[k] += a * std::cos(phase) + b * std::sin(phase);
      }
    }
  }
  return out;
}

SampledState sample_initial_data(const GridD& grid, double target_norm, std::uint64_t seed) {
  if (!(target_norm > 0.0)) throw InvalidArgument("target initial-data norm must be positive");
  for (int attempt = 0; attempt < 64; ++attempt) {
    const std::uint64_t sub = derive_seed(seed, static_cast<std::uint64_t>(attempt));
    FieldD u = random_lowpass_field(grid, derive_seed(sub, 0));
    FieldD v = random_lowpass_field(grid, derive_seed(sub, 1));
    const double n = phase_norm(u, v);
    if (!(n > 0.0) || !std::isfinite(n)) continue;
    const double scale = target_norm / n;
    u *= scale;
    v *= scale;
    return {StateD(std::move(u), std::move(v)), sub, attempt};
  }
  throw InvalidArgument("initial-data sampler produced only degenerate draws");
}

}  // namespace plate
