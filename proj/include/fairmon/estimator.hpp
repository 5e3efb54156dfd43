#pragma once

// Shift-corrected streaming estimator of a group's expected feature.
//
// Each record carries a feature x and a known shift Δ(record) that the record
// causes in the expected value of the next feature. The estimator keeps a
// running estimate of the initial mean E(X_1) from the de-shifted residuals
// x_s - d_{s-1}, and reports E(X_t | o_{t-1}) as that estimate plus the net
// shift seen so far, with a sub-exponential Azuma half-width.

#include <concepts>
#include <cstdint>
#include <functional>
#include <utility>

#include "fairmon/interval.hpp"

namespace fairmon {

/// Tail parameters (σ², ν) of the centered feature. ν = 0 is sub-gaussian.
struct SubExpParams {
  double sigma_sq = 0.0;
  double nu = 0.0;

  friend bool operator==(const SubExpParams&, const SubExpParams&) = default;
};

void validate(const SubExpParams& params);

/// max{ sqrt(2σ²/t · ln(2/δ)), (2ν/t) · ln(2/δ) }.
double azuma_epsilon(std::uint64_t t, double delta, const SubExpParams& params);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  CompensatedSum(double sum, double compensation) : sum_(sum), comp_(compensation) {}

  void add(double x);
  double value() const { return sum_ + comp_; }
  double raw_sum() const { return sum_; }
  double compensation() const { return comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// The numeric registers of one estimator, without the change function.
class ShiftCorrectedMean {
 public:
  /// Full register set, used for snapshots.
  struct Registers {
    std::uint64_t t = 0;
    double e1_hat = 0.0;
    double d_sum = 0.0;
    double d_comp = 0.0;
  };

  ShiftCorrectedMean(double delta, SubExpParams params);

  /// Consumes one record with feature `x` whose own shift is `shift`.
  /// Returns the interval for E(X_t | o_{t-1}); the current shift is applied
  /// to d only after the estimate is formed. Throws "corrupt observation" on
  /// non-finite input and leaves the registers untouched.
  ConfidenceInterval update(double x, double shift);

  /// Running estimate of E(X_1). Throws "no observations" at t = 0.
  double point_estimate_initial() const;

  /// Interval for the expected feature of the next record of this group,
  /// i.e. e1_hat + d with the current ε. Throws at t = 0.
  ConfidenceInterval current_interval() const;

  std::uint64_t t() const { return t_; }
  double e1_hat() const { return e1_hat_; }
  double d() const { return d_.value(); }
  double delta() const { return delta_; }
  const SubExpParams& params() const { return params_; }

  Registers registers() const { return {t_, e1_hat_, d_.raw_sum(), d_.compensation()}; }
  void restore(const Registers& r);

 private:
  double delta_;
  SubExpParams params_;
  std::uint64_t t_ = 0;
  double e1_hat_ = 0.0;
  CompensatedSum d_;
};

/// A record type the estimator can consume: it exposes its scalar feature.
template <typename R>
concept FeatureRecord = requires(const R& r) {
  { r.feature() } -> std::convertible_to<double>;
};

/// Maps a record to the exact shift it causes in the expected feature.
template <typename Record>
using ChangeFunction = std::function<double(const Record&)>;

/// Estimator bound to a change function over one record type.
template <FeatureRecord Record>
class ExpEstimator {
 public:
  ExpEstimator(ChangeFunction<Record> change_fn, double delta, SubExpParams params)
      : change_fn_(std::move(change_fn)), core_(delta, params) {}

  ConfidenceInterval update(const Record& record) {
    return core_.update(static_cast<double>(record.feature()), change_fn_(record));
  }

  double point_estimate_initial() const { return core_.point_estimate_initial(); }
  ConfidenceInterval current_interval() const { return core_.current_interval(); }

  const ShiftCorrectedMean& core() const { return core_; }
  ShiftCorrectedMean& core() { return core_; }

 private:
  ChangeFunction<Record> change_fn_;
  ShiftCorrectedMean core_;
};

}  // namespace fairmon
