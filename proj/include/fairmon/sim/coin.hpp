#pragma once

#include <cstdint>

#include "fairmon/random.hpp"

namespace fairmon::sim {

struct CoinConfig {
  double p1 = 0.5;
  double epsilon = 0.0;
  std::uint64_t horizon = 0;
  std::uint64_t seed = 0;
};

void validate(const CoinConfig& cfg);

/// A coin whose bias moves by +ε after heads and -ε after tails.
class CoinProcess {
 public:
  struct Step {
    int x = 0;
    double p = 0.0;       ///< bias used for this toss, E(X_t | o_{t-1})
    double p_next = 0.0;
  };

  explicit CoinProcess(const CoinConfig& cfg);

  /// Draws one toss. Throws an assumption error if the bias would leave (0,1).
  Step step();
  /// Applies the shift rule for a given outcome without drawing.
  Step step_forced(int x);

  double p() const { return p_; }
  std::uint64_t t() const { return t_; }

 private:
  CoinConfig cfg_;
  Rng rng_;
  double p_;
  std::uint64_t t_ = 0;
};

}  // namespace fairmon::sim
