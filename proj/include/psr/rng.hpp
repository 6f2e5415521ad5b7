#pragma once

#include <cstdint>
#include <random>

#include "psr/volume.hpp"

namespace psr {

/// Seeded generator with platform-independent draws: std::mt19937_64 is fully
/// specified by the standard, but the std distributions are not, so every
/// variate here is derived from raw 64-bit outputs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n) by rejection, n >= 1.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller (one value per call, no caching).
  double normal();
  /// Circular complex Gaussian with E|z|^2 = 1.
  cx complex_normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace psr
