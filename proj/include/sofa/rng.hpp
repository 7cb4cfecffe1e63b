#pragma once

#include <cstdint>
#include <random>

namespace sofa {

// One engine per run. mt19937_64 output is fully specified by the standard,
// and uniform01 below avoids the implementation-defined std distributions, so
// a seeded run reproduces bit-for-bit across standard libraries.
using Rng = std::mt19937_64;

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform on [0, 1] (both endpoints reachable).
inline double uniform01_closed(Rng& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740991.0);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for run `index` of an experiment. Depends only on (master, stream,
// index), never on which worker executes the run.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) + index);
}

}  // namespace sofa
