#pragma once

// Fairness monitors built from two shift-corrected estimators: one for
// credit-score disparity in lending and one for discovery-probability
// disparity in attention allocation. A single-estimator monitor for the
// drifting coin is included for calibration runs.

#include <array>
#include <cstdint>
#include <optional>

#include "fairmon/estimator.hpp"
#include "fairmon/interval.hpp"
#include "fairmon/poisson_eta.hpp"

namespace fairmon {

enum class Group : std::uint8_t { kA = 0, kB = 1 };

inline constexpr std::size_t index_of(Group g) { return static_cast<std::size_t>(g); }

/// One step of any monitor. `phi` is empty while the monitor is inconclusive.
struct MonitorOutput {
  std::uint64_t t = 0;
  std::optional<ConfidenceInterval> phi;
  std::optional<double> point;
  std::array<std::optional<ConfidenceInterval>, 2> per_group;
  bool clamped = false;
  bool floor_violation = false;

  bool conclusive() const { return phi.has_value(); }
};

// ---------------------------------------------------------------- coin

struct CoinToss {
  int x = 0;
  double feature() const { return x; }
};

struct CoinMonitorConfig {
  double epsilon = 0.0;
  double delta = 0.05;
  SubExpParams params{1.0, 0.0};
};

void validate(const CoinMonitorConfig& cfg);

/// +ε after heads, -ε after tails.
double coin_change(const CoinToss& toss, double epsilon);

class CoinMonitor {
 public:
  explicit CoinMonitor(const CoinMonitorConfig& cfg);

  MonitorOutput update(const CoinToss& toss);

  const CoinMonitorConfig& config() const { return cfg_; }
  ExpEstimator<CoinToss>& estimator() { return estimator_; }
  const ExpEstimator<CoinToss>& estimator() const { return estimator_; }

 private:
  CoinMonitorConfig cfg_;
  ExpEstimator<CoinToss> estimator_;
};

// ---------------------------------------------------------------- lending

struct LendingObservation {
  int x = 0;        ///< credit score of the sampled individual
  Group g = Group::kA;
  int y = 0;        ///< 1 = loan granted
  int z = 0;        ///< 1 = repaid; ignored when y = 0
  double feature() const { return x; }
};

struct LendingConfig {
  std::uint64_t n_a = 0;
  std::uint64_t n_b = 0;
  int c_max = 0;
  double delta = 0.05;

  std::uint64_t group_size(Group g) const { return g == Group::kA ? n_a : n_b; }
};

void validate(const LendingConfig& cfg);
void validate(const LendingObservation& obs, const LendingConfig& cfg);

/// +1/N_g on a repaid loan below c_max, -1/N_g on a default above 0, else 0.
double lending_change(const LendingObservation& obs, const LendingConfig& cfg);

class LendingMonitor {
 public:
  /// Each group's estimator gets budget δ/2 and parameters (c_max², 0).
  explicit LendingMonitor(const LendingConfig& cfg);

  /// Inconclusive until both groups have been observed.
  MonitorOutput update(const LendingObservation& obs);

  const LendingConfig& config() const { return cfg_; }
  std::uint64_t t() const { return t_; }
  ExpEstimator<LendingObservation>& estimator(Group g) { return estimators_[index_of(g)]; }
  const ExpEstimator<LendingObservation>& estimator(Group g) const {
    return estimators_[index_of(g)];
  }
  void set_t(std::uint64_t t) { t_ = t; }

 private:
  LendingConfig cfg_;
  std::array<ExpEstimator<LendingObservation>, 2> estimators_;
  std::uint64_t t_ = 0;
};

// ---------------------------------------------------------------- attention

/// Features and allocations for the monitored pair of locations.
struct AttentionObservation {
  std::uint64_t x_a = 0;
  std::uint64_t x_b = 0;
  std::uint64_t y_a = 0;
  std::uint64_t y_b = 0;
  std::uint64_t k = 1;  ///< total attention capacity
};

/// The per-location slice fed to one estimator.
struct AttentionGroupObservation {
  std::uint64_t x = 0;
  std::uint64_t y = 0;
  double feature() const { return static_cast<double>(x); }
};

struct AttentionConfig {
  double gamma = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double delta = 0.05;
  double lambda_floor = 1e-9;  ///< lower clamp applied to rate intervals
};

void validate(const AttentionConfig& cfg);
void validate(const AttentionObservation& obs);

/// γ when the location got no attention, -γ·y otherwise.
double attention_change(std::uint64_t y_units, double gamma);

/// Expected discovered fraction with y units at rate λ; 0 when y = 0.
double discovery_probability(std::uint64_t y, double lambda);

class AttentionMonitor {
 public:
  /// Each location's estimator gets budget δ/2 and parameters (2·λ_max, 2).
  explicit AttentionMonitor(const AttentionConfig& cfg);

  MonitorOutput update(const AttentionObservation& obs);

  const AttentionConfig& config() const { return cfg_; }
  std::uint64_t t() const { return t_; }
  ExpEstimator<AttentionGroupObservation>& estimator(Group g) {
    return estimators_[index_of(g)];
  }
  const ExpEstimator<AttentionGroupObservation>& estimator(Group g) const {
    return estimators_[index_of(g)];
  }
  ParameterFloorTracker& floor(Group g) { return floors_[index_of(g)]; }
  const ParameterFloorTracker& floor(Group g) const { return floors_[index_of(g)]; }
  void set_t(std::uint64_t t) { t_ = t; }

 private:
  ConfidenceInterval discovery_interval(std::uint64_t y, ConfidenceInterval rate,
                                        bool& clamped) const;

  AttentionConfig cfg_;
  std::array<ExpEstimator<AttentionGroupObservation>, 2> estimators_;
  std::array<ParameterFloorTracker, 2> floors_;
  std::uint64_t t_ = 0;
};

}  // namespace fairmon
