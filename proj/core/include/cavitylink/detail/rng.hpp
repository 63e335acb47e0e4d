#pragma once

#include <cstdint>
#include <random>

namespace cavitylink::detail {

// splitmix64: the standard seed expander. Each call advances the state by the
// golden-gamma increment and returns a well-mixed 64-bit word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform double in [0, 1) from the top 53 bits. Fixed mapping, so streams
// are identical across standard libraries (uniform_real_distribution is not).
inline double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Independent per-trajectory engine derived from (seed, index). The derived
/// stream depends only on those two values, never on scheduling, so ensemble
/// results are reproducible across thread counts.
inline std::mt19937_64 trajectory_engine(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed;
  std::uint64_t mixed = splitmix64(s);
  s ^= 0xd1342543de82ef95ULL * (index + 1);
  mixed ^= splitmix64(s);
  return std::mt19937_64(mixed);
}

}  // namespace cavitylink::detail
