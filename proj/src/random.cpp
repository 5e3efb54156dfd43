#include "fairmon/random.hpp"

#include <cmath>

#include "fairmon/error.hpp"

namespace fairmon {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw usage_error("Rng::below: empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = next();
  } while (r >= limit);
  return r % n;
}

namespace {

std::uint64_t poisson_inversion(Rng& rng, double lambda) {
  const double u = rng.uniform();
  double pmf = std::exp(-lambda);
  double cdf = pmf;
  std::uint64_t k = 0;
  // The cap only matters when u rounds above the representable cdf.
  while (u > cdf && k < 1000) {
    ++k;
    pmf *= lambda / static_cast<double>(k);
    cdf += pmf;
  }
  return k;
}

// Hörmann (1993), "The transformed rejection method for generating Poisson
// random variables".
std::uint64_t poisson_ptrs(Rng& rng, double lambda) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform_open();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace

std::uint64_t Rng::poisson(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw usage_error("poisson: invalid rate");
  if (lambda == 0.0) return 0;
  return lambda <= 10.0 ? poisson_inversion(*this, lambda) : poisson_ptrs(*this, lambda);
}

}  // namespace fairmon
