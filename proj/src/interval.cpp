#include "fairmon/interval.hpp"

#include <algorithm>
#include <cmath>

#include "fairmon/error.hpp"

namespace fairmon {

void validate(const ConfidenceInterval& ci) {
  if (std::isnan(ci.lo) || std::isnan(ci.hi) || ci.lo > ci.hi) {
    throw data_error("invalid interval: lo > hi or NaN endpoint");
  }
  if (!(ci.confidence >= 0.0 && ci.confidence < 1.0)) {
    throw data_error("invalid interval: confidence outside [0,1)");
  }
}

ConfidenceInterval interval_sub(const ConfidenceInterval& a, const ConfidenceInterval& b) {
  validate(a);
  validate(b);
  const double miss = (1.0 - a.confidence) + (1.0 - b.confidence);
  return {a.lo - b.hi, a.hi - b.lo, std::max(0.0, 1.0 - miss)};
}

ConfidenceInterval interval_map_decreasing(const std::function<double(double)>& f,
                                           const ConfidenceInterval& ci) {
  validate(ci);
  return {f(ci.hi), f(ci.lo), ci.confidence};
}

}  // namespace fairmon
