#include "fairmon/poisson_eta.hpp"

#include <cmath>
#include <string>

#include "fairmon/error.hpp"

namespace fairmon {

namespace {

constexpr double kNearOne = 1e-12;

void check_domain(std::uint64_t y, double lambda) {
  if (y == 0) throw usage_error("eta: attention units y must be at least 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw usage_error("eta: rate must be positive and finite");
  }
  if (lambda > kMaxSupportedRate) {
    throw usage_error("eta: rate " + std::to_string(lambda) + " above supported range");
  }
}

double closed_form(std::uint64_t y, double lambda) {
  const double yd = static_cast<double>(y);
  double term = std::exp(-lambda);  // e^{-λ} λ^k / k!
  double sum = 0.0;
  for (std::uint64_t k = 0; k < y; ++k) {
    const double kp1 = static_cast<double>(k + 1);
    sum += term * (1.0 - yd / kp1);
    term *= lambda / kp1;
  }
  return sum + yd / lambda * -std::expm1(-lambda);
}

// Σ_{k>=y} P(X=k) (k+1-y)/(k+1), summed from the first tail term upward.
double miss_series(std::uint64_t y, double lambda) {
  const double yd = static_cast<double>(y);
  double pmf = std::exp(-lambda + yd * std::log(lambda) - std::lgamma(yd + 1.0));
  double total = 0.0;
  for (std::uint64_t k = y;; ++k) {
    const double kp1 = static_cast<double>(k + 1);
    const double contrib = pmf * (kp1 - yd) / kp1;
    total += contrib;
    // Past the mode the pmf decays geometrically; stop once it is negligible.
    if (static_cast<double>(k) > lambda && pmf <= total * 1e-18) break;
    if (pmf == 0.0 && static_cast<double>(k) > lambda) break;
    pmf *= lambda / kp1;
  }
  return total;
}

}  // namespace

double eta(std::uint64_t y, double lambda) {
  check_domain(y, lambda);
  const double value = closed_form(y, lambda);
  if (1.0 - value < kNearOne) return 1.0 - miss_series(y, lambda);
  return value;
}

double eta_miss(std::uint64_t y, double lambda) {
  check_domain(y, lambda);
  const double value = closed_form(y, lambda);
  if (1.0 - value < 1e-3) return miss_series(y, lambda);
  return 1.0 - value;
}

ConfidenceInterval eta_interval(std::uint64_t y, const ConfidenceInterval& lambda_ci) {
  validate(lambda_ci);
  if (!(lambda_ci.lo > 0.0)) throw data_error("rate interval touches zero");
  return interval_map_decreasing([y](double lambda) { return eta(y, lambda); }, lambda_ci);
}

SubExpParams poisson_subexp_params(double lambda_max) {
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
    throw usage_error("poisson_subexp_params: lambda_max must be positive");
  }
  return {2.0 * lambda_max, 2.0};
}

ParameterFloorTracker::ParameterFloorTracker(double lambda_min) : lambda_min_(lambda_min) {
  if (!(lambda_min > 0.0) || !std::isfinite(lambda_min)) {
    throw usage_error("rate floor check: lambda_min must be positive");
  }
}

void ParameterFloorTracker::push(double shift) {
  cumulative_ += shift;
  if (!(lambda_min_ + cumulative_ > 0.0)) holds_ = false;
}

void ParameterFloorTracker::restore(double cumulative, bool holds) {
  cumulative_ = cumulative;
  holds_ = holds;
}

bool check_parameter_floor(double lambda_min, std::span<const double> cumulative_shifts) {
  ParameterFloorTracker tracker(lambda_min);
  for (double s : cumulative_shifts) tracker.push(s);
  return tracker.holds();
}

}  // namespace fairmon
