#pragma once

// Attention allocation over L locations with Poisson incident counts whose
// rates drift with the attention they receive.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fairmon/monitors.hpp"
#include "fairmon/random.hpp"

namespace fairmon::sim {

enum class Allocator { kUniform, kGreedy, kConstrainedGreedy };

Allocator parse_allocator(const std::string& name);
std::string to_string(Allocator a);

/// Even split of K over L locations; the K mod L extra units go to a
/// contiguous run starting at a seeded offset.
std::vector<std::uint64_t> alloc_uniform(std::size_t locations, std::uint64_t capacity, Rng& rng);

/// K units proportional to `beliefs` with largest-remainder rounding.
/// Remainder ties go in seeded rotation order. Non-positive total belief
/// falls back to alloc_uniform.
std::vector<std::uint64_t> alloc_greedy(const std::vector<double>& beliefs, std::uint64_t capacity,
                                        Rng& rng);

/// floor(α·K/L) units to every location first, the rest greedily.
std::vector<std::uint64_t> alloc_constrained_greedy(const std::vector<double>& beliefs,
                                                    std::uint64_t capacity, double alpha, Rng& rng);

struct AttentionEnvConfig {
  std::uint64_t capacity = 6;
  double gamma = 0.0;
  std::vector<double> initial_rates;  ///< one per location; size is L
  Allocator allocator = Allocator::kUniform;
  double alpha = 0.75;
  bool omniscient = false;  ///< allocator sees true rates instead of empirical means
  std::array<std::size_t, 2> pair{0, 1};  ///< monitored locations A and B
  std::uint64_t seed = 0;
};

void validate(const AttentionEnvConfig& cfg);

/// Named configurations: "fig3-left", "fig3-middle", "fig3-right".
struct AttentionPreset {
  AttentionEnvConfig env;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

AttentionPreset attention_preset(const std::string& name);

class AttentionEnv {
 public:
  struct Step {
    AttentionObservation obs;
    std::vector<std::uint64_t> allocation;
    double lambda_a = 0.0;  ///< rates before the step's shift
    double lambda_b = 0.0;
    double omega_a = 0.0;
    double omega_b = 0.0;
    double phi = 0.0;
  };

  explicit AttentionEnv(const AttentionEnvConfig& cfg);

  /// Allocates from history, draws counts, then shifts every rate.
  /// Throws an assumption error if a rate would become non-positive.
  Step step();

  const std::vector<double>& rates() const { return rates_; }
  std::uint64_t t() const { return t_; }
  std::size_t locations() const { return rates_.size(); }

 private:
  std::vector<double> beliefs() const;

  AttentionEnvConfig cfg_;
  Rng rng_;
  std::vector<double> rates_;
  std::vector<double> count_sums_;
  std::uint64_t t_ = 0;
};

}  // namespace fairmon::sim
