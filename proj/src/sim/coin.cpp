#include "fairmon/sim/coin.hpp"

#include <string>

#include "fairmon/error.hpp"

namespace fairmon::sim {

void validate(const CoinConfig& cfg) {
  if (!(cfg.p1 > 0.0 && cfg.p1 < 1.0)) throw usage_error("coin: p1 must lie in (0,1)");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon < 1.0)) throw usage_error("coin: epsilon must lie in [0,1)");
}

CoinProcess::CoinProcess(const CoinConfig& cfg) : cfg_(cfg), rng_(cfg.seed), p_(cfg.p1) {
  validate(cfg);
}

CoinProcess::Step CoinProcess::step() { return step_forced(rng_.bernoulli(p_) ? 1 : 0); }

CoinProcess::Step CoinProcess::step_forced(int x) {
  const double next = x == 1 ? p_ + cfg_.epsilon : p_ - cfg_.epsilon;
  if (!(next > 0.0 && next < 1.0)) {
    throw assumption_error("coin bias left (0,1) after step " + std::to_string(t_ + 1));
  }
  Step s{x, p_, next};
  p_ = next;
  ++t_;
  return s;
}

}  // namespace fairmon::sim
