#pragma once

#include <functional>

namespace fairmon {

/// Closed interval [lo, hi] holding its true value with probability
/// at least `confidence`.
struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  double confidence = 0.0;

  double width() const { return hi - lo; }
  double midpoint() const { return lo + 0.5 * (hi - lo); }
  bool contains(double v) const { return lo <= v && v <= hi; }

  friend bool operator==(const ConfidenceInterval&, const ConfidenceInterval&) = default;
};

/// Throws if lo > hi, an endpoint is NaN, or confidence is outside [0,1).
void validate(const ConfidenceInterval& ci);

/// [a.lo - b.hi, a.hi - b.lo]. The miss probabilities add (union bound),
/// so the result's confidence is 1 - (miss_a + miss_b), floored at 0.
ConfidenceInterval interval_sub(const ConfidenceInterval& a, const ConfidenceInterval& b);

/// Image of `ci` under a strictly decreasing `f`: [f(hi), f(lo)].
ConfidenceInterval interval_map_decreasing(const std::function<double(double)>& f,
                                           const ConfidenceInterval& ci);

}  // namespace fairmon
