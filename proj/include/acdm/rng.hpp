#pragma once

#include <cstdint>
#include <random>

namespace acdm {

// Every randomized routine takes this generator explicitly; equal seeds give
// bit-identical runs on one platform.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

__extension__ using Uint128 = unsigned __int128;

// Uniform integer in [0, n) via the multiply-high reduction.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<Uint128>(rng()) * n) >> 64);
}

// Uniform integer in [lo, hi].
inline std::uint64_t uniform_between(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + uniform_index(rng, hi - lo + 1);
}

inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

}  // namespace acdm
