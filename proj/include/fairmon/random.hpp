#pragma once

#include <cstdint>
#include <random>

namespace fairmon {

/// Seeded generator with platform-independent derived draws. Standard
/// library distributions are implementation-defined, so every draw here is
/// built directly on the raw 64-bit engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n), n > 0, by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t n);

  /// Poisson(λ): inversion for λ <= 10, PTRS transformed rejection above.
  std::uint64_t poisson(double lambda);

 private:
  std::mt19937_64 engine_;
};

}  // namespace fairmon
