#pragma once

// Two-group credit population. Individuals are exchangeable within a group,
// so the state is a score histogram per group.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fairmon/monitors.hpp"
#include "fairmon/random.hpp"

namespace fairmon::sim {

/// ρ(x) = ρ_min + (ρ_max - ρ_min) · x / c_max.
struct RepaymentModel {
  double rho_min = 0.1;
  double rho_max = 0.95;

  double operator()(int x, int c_max) const {
    return rho_min + (rho_max - rho_min) * static_cast<double>(x) / static_cast<double>(c_max);
  }
};

enum class LendingPolicy { kMaxReward, kEqOpp };

/// Which score distribution the equal-opportunity bank plans against.
enum class DistributionSource { kTrue, kEstimated };

LendingPolicy parse_lending_policy(const std::string& name);
std::string to_string(LendingPolicy p);

struct LendingEnvConfig {
  int c_max = 100;
  std::vector<std::uint64_t> hist_a;  ///< count of group-A individuals per score 0..c_max
  std::vector<std::uint64_t> hist_b;
  RepaymentModel repayment;
  LendingPolicy policy = LendingPolicy::kMaxReward;
  double theta = 0.5;  ///< bank's repayment-probability threshold
  DistributionSource eq_opp_source = DistributionSource::kTrue;
  std::uint64_t seed = 0;
};

void validate(const LendingEnvConfig& cfg);

/// Deterministic histogram for a preset name ("fig2-low-bias",
/// "fig2-mid-bias", "fig2-high-bias") and group.
std::vector<std::uint64_t> preset_histogram(const std::string& preset, Group g,
                                            std::uint64_t n, int c_max);

/// Grants iff ρ(x) >= θ.
int policy_max_reward(int x, int c_max, const RepaymentModel& rho, double theta);

/// Per-group randomized threshold: grant above `threshold`, grant with
/// probability `boundary_prob` at it. Chosen so that the probability of a
/// grant among would-repay individuals is the same in both groups.
struct EqOppRule {
  std::array<int, 2> threshold{0, 0};
  std::array<double, 2> boundary_prob{1.0, 1.0};
  std::array<bool, 2> fallback{false, false};  ///< group fell back to θ thresholding
  double target_tpr = 0.0;
};

/// Target rate is the pooled true-positive rate of the max-reward rule.
EqOppRule compute_eq_opp_rule(const std::vector<std::uint64_t>& hist_a,
                              const std::vector<std::uint64_t>& hist_b, int c_max,
                              const RepaymentModel& rho, double theta);

/// Grant probability of the rule at score x for group g.
double eq_opp_grant_probability(const EqOppRule& rule, int x, Group g, int c_max,
                                const RepaymentModel& rho, double theta);

int policy_eq_opp(int x, Group g, const EqOppRule& rule, int c_max, const RepaymentModel& rho,
                  double theta, Rng& rng);

class LendingEnv {
 public:
  struct Step {
    LendingObservation obs;
    double psi_a = 0.0;  ///< exact group means before the step
    double psi_b = 0.0;
    double phi = 0.0;
    bool fallback = false;
  };

  explicit LendingEnv(const LendingEnvConfig& cfg);

  Step step();

  std::uint64_t group_size(Group g) const { return sizes_[index_of(g)]; }
  /// Exact Σ score over the group; the mean is score_sum / group_size.
  std::uint64_t score_sum(Group g) const { return sums_[index_of(g)]; }
  double mean(Group g) const;
  const std::vector<std::uint64_t>& tallies(Group g) const { return hist_[index_of(g)]; }
  LendingConfig monitor_config(double delta) const;

 private:
  int sample_score(Group g, std::uint64_t index) const;
  int decide(int x, Group g, bool& fallback);

  LendingEnvConfig cfg_;
  Rng rng_;
  std::array<std::vector<std::uint64_t>, 2> hist_;
  std::array<std::vector<std::uint64_t>, 2> seen_;  ///< observed scores, for estimated planning
  std::array<std::uint64_t, 2> sizes_{};
  std::array<std::uint64_t, 2> sums_{};
};

}  // namespace fairmon::sim
