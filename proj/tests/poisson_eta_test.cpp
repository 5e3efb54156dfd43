#include "fairmon/poisson_eta.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fairmon/error.hpp"
#include "oracle.hpp"

namespace fairmon {
namespace {

TEST(Eta, SingleUnit) {
  EXPECT_NEAR(eta(1, 1.0), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(eta(1, 1.0), 0.6321205588285576784, 1e-15);
  const auto mc = testing::eta_monte_carlo(1, 1.0, 1000000, 1);
  EXPECT_LE(std::abs(eta(1, 1.0) - mc.mean), 4.0 * mc.stderr_);
}

TEST(Eta, TinyRateIsFullyDiscovered) {
  for (std::uint64_t y : {1u, 2u, 5u, 40u}) EXPECT_NEAR(eta(y, 1e-9), 1.0, 1e-6);
}

TEST(Eta, LargeAllocation) {
  EXPECT_NEAR(eta(50, 1.0), 1.0, 1e-10);
  EXPECT_NEAR(eta(50, 1.0), static_cast<double>(testing::eta_series(50, 1.0)), 1e-12);
}

TEST(Eta, ReplayValues) {
  EXPECT_NEAR(eta(3, 0.5), 0.99612205737077425527, 1e-14);
  EXPECT_NEAR(eta(3, 2.0), 0.89099122543524288648, 1e-14);
}

TEST(Eta, DomainErrors) {
  EXPECT_THROW(eta(0, 1.0), Error);
  EXPECT_THROW(eta(1, 0.0), Error);
  EXPECT_THROW(eta(1, -1.0), Error);
  EXPECT_THROW(eta(1, kMaxSupportedRate * 1.01), Error);
  EXPECT_NO_THROW(eta(3, kMaxSupportedRate));
}

TEST(Eta, MatchesSeriesOnGrid) {
  for (std::uint64_t y = 1; y <= 30; ++y) {
    for (double lam = 0.05; lam <= 80.0; lam *= 1.17) {
      const long double ref = testing::eta_series(y, lam);
      ASSERT_NEAR(eta(y, lam), static_cast<double>(ref), 1e-12) << "y=" << y << " lam=" << lam;
      ASSERT_NEAR(eta_miss(y, lam), static_cast<double>(1.0L - ref),
                  1e-12 + 1e-9 * static_cast<double>(1.0L - ref));
    }
  }
}

TEST(Eta, RangeOnGrid) {
  for (std::uint64_t y = 1; y <= 20; ++y) {
    for (double lam = 0.1; lam <= 50.0; lam += 0.1) {
      const double v = eta(y, lam);
      ASSERT_GT(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
}

TEST(Eta, StrictlyDecreasing) {
  for (std::uint64_t y = 1; y <= 20; ++y) {
    double prev_eta = eta(y, 0.05);
    double prev_miss = eta_miss(y, 0.05);
    for (int i = 1; i <= 1000; ++i) {
      const double lam = 0.05 + 0.05 * i;
      const double v = eta(y, lam);
      const double m = eta_miss(y, lam);
      // Below the double spacing near 1 the miss probability carries the order.
      ASSERT_TRUE(v < prev_eta || (v == prev_eta && m > prev_miss)) << "y=" << y << " lam=" << lam;
      ASSERT_GT(m, prev_miss);
      prev_eta = v;
      prev_miss = m;
    }
  }
}

// The two pieces of the closed form.
double tail_term(std::uint64_t y, double lam) { return y / lam * (1.0 - std::exp(-lam)); }
long double sum_term(std::uint64_t y, double lam) {
  long double term = std::exp(-static_cast<long double>(lam));
  long double total = 0.0L;
  for (std::uint64_t k = 0; k < y; ++k) {
    total += term * (1.0L - static_cast<long double>(y) / (k + 1));
    term *= lam / (k + 1);
  }
  return total;
}

TEST(EtaPieces, TailTermStrictlyDecreasing) {
  for (std::uint64_t y = 1; y <= 20; ++y) {
    double prev = tail_term(y, 0.1);
    for (double lam = 0.2; lam <= 50.0; lam += 0.1) {
      const double v = tail_term(y, lam);
      ASSERT_LT(v, prev);
      prev = v;
    }
  }
}

TEST(EtaPieces, SumTermIsNonPositiveAndRisesWithRate) {
  // y = 1 gives an identically zero sum; for y >= 2 the sum is negative and
  // increases toward 0 as λ grows.
  for (std::uint64_t y = 1; y <= 20; ++y) {
    long double prev = sum_term(y, 0.1);
    for (double lam = 0.2; lam <= 50.0; lam += 0.1) {
      const long double v = sum_term(y, lam);
      ASSERT_LE(v, 0.0L);
      if (y == 1) {
        ASSERT_EQ(v, 0.0L);
      } else if (lam < 30.0) {
        ASSERT_GT(v, prev) << "y=" << y << " lam=" << lam;
      } else {
        ASSERT_GE(v, prev);
      }
      prev = v;
    }
  }
}

TEST(EtaInterval, Examples) {
  const auto ci = eta_interval(3, {0.5, 2.0, 0.95});
  EXPECT_EQ(ci.lo, eta(3, 2.0));
  EXPECT_EQ(ci.hi, eta(3, 0.5));
  EXPECT_EQ(ci.confidence, 0.95);
  const auto degenerate = eta_interval(4, {1.5, 1.5, 0.9});
  EXPECT_EQ(degenerate.lo, eta(4, 1.5));
  EXPECT_EQ(degenerate.hi, eta(4, 1.5));
  try {
    eta_interval(3, {0.0, 2.0, 0.95});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("rate interval touches zero"), std::string::npos);
  }
}

TEST(PoissonSubexpParams, Examples) {
  EXPECT_EQ(poisson_subexp_params(3.0), (SubExpParams{6.0, 2.0}));
  EXPECT_EQ(poisson_subexp_params(1.0), (SubExpParams{2.0, 2.0}));
  EXPECT_THROW(poisson_subexp_params(0.0), Error);
  EXPECT_THROW(poisson_subexp_params(-1.0), Error);
}

TEST(PoissonSubexpParams, MgfInequality) {
  for (int i = 0; i <= 10000; ++i) {
    const double c = -0.5 + i * 1e-4;
    ASSERT_LE(std::expm1(c) - c, c * c + 1e-15) << c;
  }
}

TEST(ParameterFloor, Examples) {
  const std::vector<double> ok{-0.05, -0.04};
  const std::vector<double> bad{-0.05, -0.06};
  EXPECT_TRUE(check_parameter_floor(0.1, ok));
  EXPECT_FALSE(check_parameter_floor(0.1, bad));
  EXPECT_TRUE(check_parameter_floor(0.1, {}));
}

TEST(ParameterFloor, TrackerAgreesWithBatchCheck) {
  std::vector<double> shifts;
  ParameterFloorTracker tracker(0.5);
  const double pattern[] = {0.1, -0.3, 0.05, -0.2, -0.1, 0.4, -0.45, -0.2, 0.3};
  for (double s : pattern) {
    shifts.push_back(s);
    tracker.push(s);
    EXPECT_EQ(tracker.holds(), check_parameter_floor(0.5, shifts));
  }
  EXPECT_FALSE(tracker.holds());
}

}  // namespace
}  // namespace fairmon
