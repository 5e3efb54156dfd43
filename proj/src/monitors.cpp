#include "fairmon/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairmon/error.hpp"

namespace fairmon {

// ---------------------------------------------------------------- coin

void validate(const CoinMonitorConfig& cfg) {
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon < 1.0)) {
    throw usage_error("coin monitor: epsilon must lie in [0,1)");
  }
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw usage_error("invalid confidence");
  validate(cfg.params);
}

double coin_change(const CoinToss& toss, double epsilon) {
  return toss.x == 1 ? epsilon : -epsilon;
}

namespace {

CoinMonitorConfig checked(const CoinMonitorConfig& cfg) {
  validate(cfg);
  return cfg;
}

LendingConfig checked(const LendingConfig& cfg) {
  validate(cfg);
  return cfg;
}

AttentionConfig checked(const AttentionConfig& cfg) {
  validate(cfg);
  return cfg;
}

}  // namespace

CoinMonitor::CoinMonitor(const CoinMonitorConfig& cfg)
    : cfg_(checked(cfg)),
      estimator_([eps = cfg.epsilon](const CoinToss& c) { return coin_change(c, eps); },
                 cfg.delta, cfg.params) {}

MonitorOutput CoinMonitor::update(const CoinToss& toss) {
  if (toss.x != 0 && toss.x != 1) throw data_error("corrupt observation: coin toss must be 0 or 1");
  const ConfidenceInterval ci = estimator_.update(toss);
  MonitorOutput out;
  out.t = estimator_.core().t();
  out.phi = ci;
  out.point = ci.midpoint();
  out.per_group[0] = ci;
  return out;
}

// ---------------------------------------------------------------- lending

void validate(const LendingConfig& cfg) {
  if (cfg.n_a == 0 || cfg.n_b == 0) throw usage_error("lending: group sizes must be positive");
  if (cfg.c_max <= 0) throw usage_error("lending: c_max must be positive");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw usage_error("invalid confidence");
}

void validate(const LendingObservation& obs, const LendingConfig& cfg) {
  if (obs.x < 0 || obs.x > cfg.c_max) {
    throw data_error("corrupt observation: score " + std::to_string(obs.x) + " outside [0, c_max]");
  }
  if (obs.g != Group::kA && obs.g != Group::kB) throw data_error("corrupt observation: group");
  if (obs.y != 0 && obs.y != 1) throw data_error("corrupt observation: decision must be 0 or 1");
  if (obs.y == 1 && obs.z != 0 && obs.z != 1) {
    throw data_error("corrupt observation: reaction must be 0 or 1");
  }
}

double lending_change(const LendingObservation& obs, const LendingConfig& cfg) {
  const double step = 1.0 / static_cast<double>(cfg.group_size(obs.g));
  if (obs.y != 1) return 0.0;
  if (obs.z == 1 && obs.x < cfg.c_max) return step;
  if (obs.z == 0 && obs.x > 0) return -step;
  return 0.0;
}

namespace {

ExpEstimator<LendingObservation> make_lending_estimator(const LendingConfig& cfg) {
  const double c = static_cast<double>(cfg.c_max);
  return ExpEstimator<LendingObservation>(
      [cfg](const LendingObservation& o) { return lending_change(o, cfg); }, cfg.delta / 2.0,
      SubExpParams{c * c, 0.0});
}

}  // namespace

LendingMonitor::LendingMonitor(const LendingConfig& cfg)
    : cfg_(checked(cfg)),
      estimators_{make_lending_estimator(cfg_), make_lending_estimator(cfg_)} {}

MonitorOutput LendingMonitor::update(const LendingObservation& obs) {
  validate(obs, cfg_);
  const Group other = obs.g == Group::kA ? Group::kB : Group::kA;

  MonitorOutput out;
  out.per_group[index_of(obs.g)] = estimator(obs.g).update(obs);
  out.t = ++t_;
  // The other group's mean has absorbed the shift of its own last record.
  if (estimator(other).core().t() > 0) out.per_group[index_of(other)] = estimator(other).current_interval();

  if (out.per_group[0] && out.per_group[1]) {
    out.phi = interval_sub(*out.per_group[0], *out.per_group[1]);
    out.point = out.per_group[0]->midpoint() - out.per_group[1]->midpoint();
  }
  return out;
}

// ---------------------------------------------------------------- attention

void validate(const AttentionConfig& cfg) {
  if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma)) {
    throw usage_error("attention: gamma must be non-negative");
  }
  if (!(cfg.lambda_min > 0.0 && cfg.lambda_min < cfg.lambda_max) || !std::isfinite(cfg.lambda_max)) {
    throw usage_error("attention: need 0 < lambda_min < lambda_max");
  }
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw usage_error("invalid confidence");
  if (!(cfg.lambda_floor > 0.0)) throw usage_error("attention: lambda_floor must be positive");
}

void validate(const AttentionObservation& obs) {
  if (obs.k == 0) throw data_error("corrupt observation: capacity must be positive");
  if (obs.y_a > obs.k || obs.y_b > obs.k - obs.y_a) {
    throw data_error("corrupt observation: allocation exceeds capacity");
  }
}

double attention_change(std::uint64_t y_units, double gamma) {
  return y_units == 0 ? gamma : -gamma * static_cast<double>(y_units);
}

double discovery_probability(std::uint64_t y, double lambda) {
  return y == 0 ? 0.0 : eta(y, lambda);
}

namespace {

ExpEstimator<AttentionGroupObservation> make_attention_estimator(const AttentionConfig& cfg) {
  return ExpEstimator<AttentionGroupObservation>(
      [gamma = cfg.gamma](const AttentionGroupObservation& o) {
        return attention_change(o.y, gamma);
      },
      cfg.delta / 2.0, poisson_subexp_params(cfg.lambda_max));
}

}  // namespace

AttentionMonitor::AttentionMonitor(const AttentionConfig& cfg)
    : cfg_(checked(cfg)),
      estimators_{make_attention_estimator(cfg_), make_attention_estimator(cfg_)},
      floors_{ParameterFloorTracker(cfg_.lambda_min), ParameterFloorTracker(cfg_.lambda_min)} {}

ConfidenceInterval AttentionMonitor::discovery_interval(std::uint64_t y, ConfidenceInterval rate,
                                                        bool& clamped) const {
  if (y == 0) return {0.0, 0.0, rate.confidence};
  if (rate.lo < cfg_.lambda_floor) {
    rate.lo = cfg_.lambda_floor;
    clamped = true;
  }
  if (rate.hi < rate.lo) rate.hi = rate.lo;

  double upper_rate = rate.lo;
  if (upper_rate > kMaxSupportedRate) {
    upper_rate = kMaxSupportedRate;  // eta is decreasing: this only raises the bound
    clamped = true;
  }
  double lower = 0.0;
  if (rate.hi <= kMaxSupportedRate) {
    lower = eta(y, rate.hi);
  } else {
    clamped = true;
  }
  return {lower, eta(y, upper_rate), rate.confidence};
}

MonitorOutput AttentionMonitor::update(const AttentionObservation& obs) {
  validate(obs);
  const AttentionGroupObservation a{obs.x_a, obs.y_a};
  const AttentionGroupObservation b{obs.x_b, obs.y_b};

  const ConfidenceInterval rate_a = estimator(Group::kA).update(a);
  const ConfidenceInterval rate_b = estimator(Group::kB).update(b);
  floor(Group::kA).push(attention_change(a.y, cfg_.gamma));
  floor(Group::kB).push(attention_change(b.y, cfg_.gamma));

  MonitorOutput out;
  out.t = ++t_;
  const ConfidenceInterval omega_a = discovery_interval(a.y, rate_a, out.clamped);
  const ConfidenceInterval omega_b = discovery_interval(b.y, rate_b, out.clamped);
  out.per_group = {omega_a, omega_b};
  out.phi = interval_sub(omega_a, omega_b);

  auto point_of = [&](std::uint64_t y, const ConfidenceInterval& rate) {
    const double lambda = std::clamp(rate.midpoint(), cfg_.lambda_floor, kMaxSupportedRate);
    return discovery_probability(y, lambda);
  };
  out.point = point_of(a.y, rate_a) - point_of(b.y, rate_b);
  out.floor_violation = !(floor(Group::kA).holds() && floor(Group::kB).holds());
  return out;
}

}  // namespace fairmon
