#include "fairmon/sim/attention.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairmon/error.hpp"

namespace fairmon::sim {

Allocator parse_allocator(const std::string& name) {
  if (name == "uniform") return Allocator::kUniform;
  if (name == "greedy") return Allocator::kGreedy;
  if (name == "constrained_greedy") return Allocator::kConstrainedGreedy;
  throw usage_error("unknown allocator '" + name + "' (expected uniform | greedy | constrained_greedy)");
}

std::string to_string(Allocator a) {
  switch (a) {
    case Allocator::kUniform: return "uniform";
    case Allocator::kGreedy: return "greedy";
    case Allocator::kConstrainedGreedy: return "constrained_greedy";
  }
  return "uniform";
}

std::vector<std::uint64_t> alloc_uniform(std::size_t locations, std::uint64_t capacity, Rng& rng) {
  if (locations == 0) throw usage_error("allocation over zero locations");
  const std::uint64_t n = locations;
  std::vector<std::uint64_t> out(locations, capacity / n);
  const std::uint64_t extra = capacity % n;
  const std::uint64_t offset = rng.below(n);
  for (std::uint64_t i = 0; i < extra; ++i) ++out[(offset + i) % n];
  return out;
}

std::vector<std::uint64_t> alloc_greedy(const std::vector<double>& beliefs, std::uint64_t capacity,
                                        Rng& rng) {
  const std::size_t n = beliefs.size();
  if (n == 0) throw usage_error("allocation over zero locations");
  double total = 0.0;
  for (double b : beliefs) total += std::max(b, 0.0);
  if (!(total > 0.0)) return alloc_uniform(n, capacity, rng);

  std::vector<std::uint64_t> out(n, 0);
  std::vector<double> remainder(n, 0.0);
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double share = static_cast<double>(capacity) * std::max(beliefs[i], 0.0) / total;
    out[i] = static_cast<std::uint64_t>(std::floor(share));
    remainder[i] = share - std::floor(share);
    assigned += out[i];
  }
  // Rounding of the shares can overshoot by one unit in degenerate cases.
  while (assigned > capacity) {
    auto it = std::max_element(out.begin(), out.end());
    --*it;
    --assigned;
  }

  const std::uint64_t offset = rng.below(n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = (offset + i) % n;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < capacity; i = (i + 1) % n) {
    ++out[order[i]];
    ++assigned;
  }
  return out;
}

std::vector<std::uint64_t> alloc_constrained_greedy(const std::vector<double>& beliefs,
                                                    std::uint64_t capacity, double alpha, Rng& rng) {
  const std::size_t n = beliefs.size();
  if (n == 0) throw usage_error("allocation over zero locations");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw usage_error("constrained greedy: alpha must lie in [0,1]");
  const auto base = static_cast<std::uint64_t>(
      std::floor(alpha * static_cast<double>(capacity) / static_cast<double>(n)));
  const std::uint64_t rest = capacity - base * n;
  std::vector<std::uint64_t> out = alloc_greedy(beliefs, rest, rng);
  for (auto& u : out) u += base;
  return out;
}

void validate(const AttentionEnvConfig& cfg) {
  const std::size_t n = cfg.initial_rates.size();
  if (n < 2) throw usage_error("attention: need at least two locations");
  if (cfg.capacity == 0) throw usage_error("attention: capacity must be positive");
  if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma)) throw usage_error("attention: gamma must be >= 0");
  for (double r : cfg.initial_rates) {
    if (!(r > 0.0) || !std::isfinite(r)) throw usage_error("attention: initial rates must be positive");
  }
  if (cfg.pair[0] >= n || cfg.pair[1] >= n || cfg.pair[0] == cfg.pair[1]) {
    throw usage_error("attention: monitored pair must name two distinct locations");
  }
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) throw usage_error("attention: alpha must lie in [0,1]");
}

AttentionPreset attention_preset(const std::string& name) {
  AttentionPreset p;
  if (name == "fig3-left" || name == "fig3-middle") {
    p.env.capacity = 6;
    p.env.gamma = name == "fig3-left" ? 0.0 : 0.0025;
    p.env.initial_rates = {8.0, 9.0, 10.0, 11.0, 12.0};
    p.lambda_min = 4.0;
    p.lambda_max = 14.0;
  } else if (name == "fig3-right") {
    p.env.capacity = 10;
    p.env.gamma = 0.0025;
    p.env.initial_rates = {8.0, 8.5, 9.0, 9.5, 10.0, 10.5, 11.0, 11.5, 12.0, 12.5};
    p.lambda_min = 4.0;
    p.lambda_max = 14.0;
  } else {
    throw usage_error("unknown attention preset '" + name + "'");
  }
  return p;
}

AttentionEnv::AttentionEnv(const AttentionEnvConfig& cfg)
    : cfg_(cfg), rng_(cfg.seed), rates_(cfg.initial_rates), count_sums_(cfg.initial_rates.size(), 0.0) {
  validate(cfg);
}

std::vector<double> AttentionEnv::beliefs() const {
  if (cfg_.omniscient) return rates_;
  if (t_ == 0) return std::vector<double>(rates_.size(), 1.0);
  std::vector<double> b(count_sums_);
  for (double& v : b) v /= static_cast<double>(t_);
  return b;
}

AttentionEnv::Step AttentionEnv::step() {
  Step s;
  switch (cfg_.allocator) {
    case Allocator::kUniform:
      s.allocation = alloc_uniform(rates_.size(), cfg_.capacity, rng_);
      break;
    case Allocator::kGreedy:
      s.allocation = alloc_greedy(beliefs(), cfg_.capacity, rng_);
      break;
    case Allocator::kConstrainedGreedy:
      s.allocation = alloc_constrained_greedy(beliefs(), cfg_.capacity, cfg_.alpha, rng_);
      break;
  }

  std::vector<std::uint64_t> counts(rates_.size());
  for (std::size_t g = 0; g < rates_.size(); ++g) counts[g] = rng_.poisson(rates_[g]);

  const std::size_t a = cfg_.pair[0];
  const std::size_t b = cfg_.pair[1];
  s.obs = AttentionObservation{counts[a], counts[b], s.allocation[a], s.allocation[b], cfg_.capacity};
  s.lambda_a = rates_[a];
  s.lambda_b = rates_[b];
  s.omega_a = discovery_probability(s.allocation[a], rates_[a]);
  s.omega_b = discovery_probability(s.allocation[b], rates_[b]);
  s.phi = s.omega_a - s.omega_b;

  ++t_;
  for (std::size_t g = 0; g < rates_.size(); ++g) {
    count_sums_[g] += static_cast<double>(counts[g]);
    const double next = rates_[g] + attention_change(s.allocation[g], cfg_.gamma);
    if (!(next > 0.0)) {
      throw assumption_error("attention: rate of location " + std::to_string(g) +
                             " would reach zero at step " + std::to_string(t_));
    }
    rates_[g] = next;
  }
  return s;
}

}  // namespace fairmon::sim
