#pragma once

#include <cstdint>
#include <random>

namespace tstat {

// splitmix64 finalizer; used to derive independent stream seeds from a user
// seed so that chunked simulation is reproducible for any worker count.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform draw on the open interval (0,1). mt19937_64 output is fully
// specified by the standard, and the explicit scaling avoids the
// implementation-defined behaviour of uniform_real_distribution.
inline double uniform_open(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace tstat
