#include "fairmon/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "fairmon/error.hpp"

namespace fairmon {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw usage_error("invalid confidence: delta must lie in (0,1)");
}

}  // namespace

void validate(const SubExpParams& params) {
  const bool finite = std::isfinite(params.sigma_sq) && std::isfinite(params.nu);
  if (!finite || params.sigma_sq < 0.0 || params.nu < 0.0 ||
      (params.sigma_sq == 0.0 && params.nu == 0.0)) {
    throw usage_error("invalid parameters: need sigma_sq >= 0, nu >= 0, not both zero");
  }
}

double azuma_epsilon(std::uint64_t t, double delta, const SubExpParams& params) {
  if (t == 0) throw usage_error("azuma_epsilon: t must be at least 1");
  check_delta(delta);
  validate(params);
  const double log_term = std::log(2.0 / delta);
  const double td = static_cast<double>(t);
  const double gaussian = std::sqrt(2.0 * params.sigma_sq / td * log_term);
  const double exponential = 2.0 * params.nu / td * log_term;
  return std::max(gaussian, exponential);
}

void CompensatedSum::add(double x) {
  const double s = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - s) + x;
  } else {
    comp_ += (x - s) + sum_;
  }
  sum_ = s;
}

ShiftCorrectedMean::ShiftCorrectedMean(double delta, SubExpParams params)
    : delta_(delta), params_(params) {
  check_delta(delta);
  validate(params);
}

ConfidenceInterval ShiftCorrectedMean::update(double x, double shift) {
  if (!std::isfinite(x) || !std::isfinite(shift)) {
    throw data_error("corrupt observation: non-finite feature or shift");
  }
  ++t_;
  const double td = static_cast<double>(t_);
  const double d = d_.value();
  e1_hat_ = (e1_hat_ * (td - 1.0) + (x - d)) / td;
  const double estimate = e1_hat_ + d;
  d_.add(shift);
  const double eps = azuma_epsilon(t_, delta_, params_);
  return {estimate - eps, estimate + eps, 1.0 - delta_};
}

double ShiftCorrectedMean::point_estimate_initial() const {
  if (t_ == 0) throw data_error("no observations");
  return e1_hat_;
}

ConfidenceInterval ShiftCorrectedMean::current_interval() const {
  if (t_ == 0) throw data_error("no observations");
  const double estimate = e1_hat_ + d_.value();
  const double eps = azuma_epsilon(t_, delta_, params_);
  return {estimate - eps, estimate + eps, 1.0 - delta_};
}

void ShiftCorrectedMean::restore(const Registers& r) {
  if (!std::isfinite(r.e1_hat) || !std::isfinite(r.d_sum) || !std::isfinite(r.d_comp)) {
    throw data_error("corrupt snapshot: non-finite estimator register");
  }
  t_ = r.t;
  e1_hat_ = r.e1_hat;
  d_ = CompensatedSum(r.d_sum, r.d_comp);
}

}  // namespace fairmon
