#pragma once

// Discovery probability for Poisson incident counts.
//
// With X ~ Poisson(λ) there are X + 1 incidents; y units of attention
// discover min(X + 1, y) of them. eta(y, λ) = E[min(X + 1, y) / (X + 1)],
// evaluated in closed form. It is strictly decreasing in λ, so a rate
// interval maps to a discovery interval by swapping endpoints.

#include <cstdint>
#include <span>

#include "fairmon/estimator.hpp"
#include "fairmon/interval.hpp"

namespace fairmon {

/// Largest rate eta() accepts; beyond it e^{-λ} underflows.
inline constexpr double kMaxSupportedRate = 700.0;

/// Closed form
///   e^{-λ} Σ_{k<y} λ^k/k! (1 - y/(k+1)) + (y/λ)(1 - e^{-λ}).
/// When the miss probability 1 - η drops below 1e-12 the result is formed as
/// 1 - eta_miss(y, λ) so it stays monotone where the closed form cancels.
/// Throws on y = 0, λ <= 0, or λ > kMaxSupportedRate.
double eta(std::uint64_t y, double lambda);

/// 1 - eta(y, λ) with full relative precision, including values far below
/// the double spacing near 1.
double eta_miss(std::uint64_t y, double lambda);

/// [eta(y, hi), eta(y, lo)] at the input confidence.
/// Throws "rate interval touches zero" when lambda_ci.lo <= 0.
ConfidenceInterval eta_interval(std::uint64_t y, const ConfidenceInterval& lambda_ci);

/// Sub-exponential parameters (2·λ_max, 2) of a centered Poisson(λ), λ <= λ_max.
SubExpParams poisson_subexp_params(double lambda_max);

/// Running form of the rate-floor check: lambda_min plus every prefix sum of
/// the pushed shifts must stay strictly positive. Once violated it stays so.
class ParameterFloorTracker {
 public:
  explicit ParameterFloorTracker(double lambda_min);

  void push(double shift);
  bool holds() const { return holds_; }
  double lambda_min() const { return lambda_min_; }
  double cumulative() const { return cumulative_; }

  void restore(double cumulative, bool holds);

 private:
  double lambda_min_;
  double cumulative_ = 0.0;
  bool holds_ = true;
};

/// True iff lambda_min + Σ_{s<=i} shifts[s] > 0 for every prefix i.
bool check_parameter_floor(double lambda_min, std::span<const double> cumulative_shifts);

}  // namespace fairmon
