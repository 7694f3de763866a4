#pragma once

#include <cstdint>
#include <random>

namespace qidmrg {

/// mt19937_64 output is fixed by the standard; the two helpers below avoid the
/// implementation-defined distribution classes so seeded runs reproduce
/// bit-for-bit across standard libraries.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Uniform integer in [0, n), n > 0.
inline std::uint64_t bounded(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace qidmrg
