#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace monost {

using Rng = std::mt19937_64;

// Derives an independent stream seed from a base seed and a stream label,
// so that components seeded from one user seed do not share sequences.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace monost

namespace monost {

// Standard normal draw via Box-Muller; unlike std::normal_distribution the
// sequence is identical across standard library implementations.
inline double gaussian(Rng& rng) {
  constexpr double kTwoPi = 6.283185307179586476925;
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

// Uniform integer in [0, n).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

}  // namespace monost
