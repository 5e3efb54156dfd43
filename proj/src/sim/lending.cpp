#include "fairmon/sim/lending.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairmon/error.hpp"

namespace fairmon::sim {

LendingPolicy parse_lending_policy(const std::string& name) {
  if (name == "max_reward") return LendingPolicy::kMaxReward;
  if (name == "eq_opp") return LendingPolicy::kEqOpp;
  throw usage_error("unknown lending policy '" + name + "' (expected max_reward | eq_opp)");
}

std::string to_string(LendingPolicy p) {
  return p == LendingPolicy::kMaxReward ? "max_reward" : "eq_opp";
}

void validate(const LendingEnvConfig& cfg) {
  if (cfg.c_max <= 0) throw usage_error("lending: c_max must be positive");
  const auto expected = static_cast<std::size_t>(cfg.c_max) + 1;
  if (cfg.hist_a.size() != expected || cfg.hist_b.size() != expected) {
    throw usage_error("lending: histograms must have c_max + 1 entries");
  }
  auto total = [](const std::vector<std::uint64_t>& h) {
    return std::accumulate(h.begin(), h.end(), std::uint64_t{0});
  };
  if (total(cfg.hist_a) == 0 || total(cfg.hist_b) == 0) {
    throw usage_error("lending: both groups need at least one individual");
  }
  const auto& r = cfg.repayment;
  if (!(r.rho_min >= 0.0 && r.rho_min <= r.rho_max && r.rho_max <= 1.0)) {
    throw usage_error("lending: need 0 <= rho_min <= rho_max <= 1");
  }
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) throw usage_error("lending: theta must lie in [0,1]");
}

namespace {

double normal_quantile(double p) {
  double lo = -12.0;
  double hi = 12.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<std::uint64_t> preset_histogram(const std::string& preset, Group g, std::uint64_t n,
                                            int c_max) {
  // Group A is the same in every preset; group B starts lower by the bias.
  double mean_b = 0.0;
  if (preset == "fig2-low-bias") {
    mean_b = 0.55;
  } else if (preset == "fig2-mid-bias") {
    mean_b = 0.45;
  } else if (preset == "fig2-high-bias") {
    mean_b = 0.30;
  } else {
    throw usage_error("unknown lending preset '" + preset + "'");
  }
  const double c = static_cast<double>(c_max);
  const double mean = (g == Group::kA ? 0.6 : mean_b) * c;
  const double sd = 0.15 * c;

  std::vector<std::uint64_t> hist(static_cast<std::size_t>(c_max) + 1, 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double z = normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    const double score = std::clamp(std::round(mean + sd * z), 0.0, c);
    ++hist[static_cast<std::size_t>(score)];
  }
  return hist;
}

int policy_max_reward(int x, int c_max, const RepaymentModel& rho, double theta) {
  return rho(x, c_max) >= theta ? 1 : 0;
}

EqOppRule compute_eq_opp_rule(const std::vector<std::uint64_t>& hist_a,
                              const std::vector<std::uint64_t>& hist_b, int c_max,
                              const RepaymentModel& rho, double theta) {
  const std::array<const std::vector<std::uint64_t>*, 2> hists{&hist_a, &hist_b};
  auto mass = [&](std::size_t g, int x) {
    return static_cast<double>((*hists[g])[static_cast<std::size_t>(x)]) * rho(x, c_max);
  };

  EqOppRule rule;
  double accepted = 0.0;
  double total = 0.0;
  std::array<double, 2> group_total{0.0, 0.0};
  for (std::size_t g = 0; g < 2; ++g) {
    for (int x = 0; x <= c_max; ++x) {
      const double m = mass(g, x);
      group_total[g] += m;
      if (rho(x, c_max) >= theta) accepted += m;
    }
    total += group_total[g];
  }
  rule.target_tpr = total > 0.0 ? accepted / total : 0.0;

  for (std::size_t g = 0; g < 2; ++g) {
    if (!(group_total[g] > 0.0)) {
      rule.fallback[g] = true;
      continue;
    }
    const double target = rule.target_tpr * group_total[g];
    double above = 0.0;
    int lowest = -1;
    bool placed = false;
    for (int x = c_max; x >= 0 && !placed; --x) {
      const double m = mass(g, x);
      if (m == 0.0) continue;
      lowest = x;
      if (above + m >= target) {
        rule.threshold[g] = x;
        rule.boundary_prob[g] = std::clamp((target - above) / m, 0.0, 1.0);
        placed = true;
      }
      above += m;
    }
    if (!placed) {
      rule.threshold[g] = lowest;
      rule.boundary_prob[g] = 1.0;
    }
  }
  return rule;
}

double eq_opp_grant_probability(const EqOppRule& rule, int x, Group g, int c_max,
                                const RepaymentModel& rho, double theta) {
  const std::size_t i = index_of(g);
  if (rule.fallback[i]) return policy_max_reward(x, c_max, rho, theta);
  if (x > rule.threshold[i]) return 1.0;
  if (x == rule.threshold[i]) return rule.boundary_prob[i];
  return 0.0;
}

int policy_eq_opp(int x, Group g, const EqOppRule& rule, int c_max, const RepaymentModel& rho,
                  double theta, Rng& rng) {
  const double p = eq_opp_grant_probability(rule, x, g, c_max, rho, theta);
  if (p >= 1.0) return 1;
  if (p <= 0.0) return 0;
  return rng.bernoulli(p) ? 1 : 0;
}

LendingEnv::LendingEnv(const LendingEnvConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
  validate(cfg);
  hist_ = {cfg.hist_a, cfg.hist_b};
  for (std::size_t g = 0; g < 2; ++g) {
    seen_[g].assign(hist_[g].size(), 0);
    for (std::size_t x = 0; x < hist_[g].size(); ++x) {
      sizes_[g] += hist_[g][x];
      sums_[g] += hist_[g][x] * x;
    }
  }
}

double LendingEnv::mean(Group g) const {
  return static_cast<double>(sums_[index_of(g)]) / static_cast<double>(sizes_[index_of(g)]);
}

LendingConfig LendingEnv::monitor_config(double delta) const {
  return {sizes_[0], sizes_[1], cfg_.c_max, delta};
}

int LendingEnv::sample_score(Group g, std::uint64_t index) const {
  const auto& h = hist_[index_of(g)];
  for (std::size_t x = 0; x < h.size(); ++x) {
    if (index < h[x]) return static_cast<int>(x);
    index -= h[x];
  }
  throw data_error("lending: tally corruption");
}

int LendingEnv::decide(int x, Group g, bool& fallback) {
  if (cfg_.policy == LendingPolicy::kMaxReward) {
    return policy_max_reward(x, cfg_.c_max, cfg_.repayment, cfg_.theta);
  }
  const auto& plan = cfg_.eq_opp_source == DistributionSource::kTrue ? hist_ : seen_;
  const EqOppRule rule =
      compute_eq_opp_rule(plan[0], plan[1], cfg_.c_max, cfg_.repayment, cfg_.theta);
  fallback = rule.fallback[index_of(g)];
  return policy_eq_opp(x, g, rule, cfg_.c_max, cfg_.repayment, cfg_.theta, rng_);
}

LendingEnv::Step LendingEnv::step() {
  Step s;
  s.psi_a = mean(Group::kA);
  s.psi_b = mean(Group::kB);
  s.phi = s.psi_a - s.psi_b;

  const std::uint64_t u = rng_.below(sizes_[0] + sizes_[1]);
  const Group g = u < sizes_[0] ? Group::kA : Group::kB;
  const std::uint64_t within = g == Group::kA ? u : u - sizes_[0];
  const int x = sample_score(g, within);

  const int y = decide(x, g, s.fallback);
  int z = 0;
  if (y == 1) z = rng_.bernoulli(cfg_.repayment(x, cfg_.c_max)) ? 1 : 0;

  auto& h = hist_[index_of(g)];
  const auto xi = static_cast<std::size_t>(x);
  if (y == 1 && z == 1 && x < cfg_.c_max) {
    --h[xi];
    ++h[xi + 1];
    ++sums_[index_of(g)];
  } else if (y == 1 && z == 0 && x > 0) {
    --h[xi];
    ++h[xi - 1];
    --sums_[index_of(g)];
  }
  ++seen_[index_of(g)][xi];

  s.obs = LendingObservation{x, g, y, z};
  return s;
}

}  // namespace fairmon::sim
