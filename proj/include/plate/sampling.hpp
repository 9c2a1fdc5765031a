#pragma once

#include <cstdint>

#include "plate/types.hpp"

namespace plate {

/// Counter-based sub-seed: splitmix64(master + counter).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter);

/// Random low-pass Fourier superposition: modes |m| <= N/8, amplitudes ~ 1/(1 + |m|^3)
/// times standard normals. Deterministic in `seed`.
FieldD random_lowpass_field(const GridD& grid, std::uint64_t seed);

struct SampledState {
  StateD state;
  /// Sub-seed that produced the accepted draw.
  std::uint64_t sub_seed = 0;
  /// Degenerate draws rejected before acceptance.
  int resamples = 0;
};

/// (u0, u1) from two independent low-pass draws, rescaled so |(u0, u1)|_{H2 x L2} = target.
SampledState sample_initial_data(const GridD& grid, double target_norm, std::uint64_t seed);

}  // namespace plate
