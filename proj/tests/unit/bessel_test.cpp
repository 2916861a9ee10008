#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "pacwelfare/bessel.hpp"

namespace pacwelfare {
namespace {

// ln I_{1/2}(k) = ln sqrt(2 / (pi k)) + ln sinh k.
double log_i_half(double k) {
  const double log_sinh = k + std::log1p(-std::exp(-2.0 * k)) - std::numbers::ln2;
  return 0.5 * std::log(2.0 / (std::numbers::pi * k)) + log_sinh;
}

TEST(LogBesselI, ZeroArgument) {
  EXPECT_EQ(log_bessel_i(0.0, 0.0), 0.0);
  EXPECT_EQ(log_bessel_i(0.5, 0.0), -std::numeric_limits<double>::infinity());
}

TEST(LogBesselI, HalfIntegerClosedForm) {
  // sqrt(2/pi) sinh(1) = 0.9376748882...; its log is -0.0643520.
  EXPECT_NEAR(log_bessel_i(0.5, 1.0), std::log(std::sqrt(2.0 / std::numbers::pi) * std::sinh(1.0)),
              1e-14);
  EXPECT_NEAR(log_bessel_i(0.5, 1.0), -0.0643520, 1e-7);
  for (double k : {0.01, 0.3, 2.0, 7.5, 19.0, 20.0, 21.0, 45.0, 300.0, 5000.0, 1e5}) {
    EXPECT_NEAR(log_bessel_i(0.5, k), log_i_half(k), 1e-10 * std::max(1.0, std::abs(log_i_half(k))))
        << "kappa = " << k;
  }
}

TEST(LogBesselI, MatchesStandardLibrary) {
  for (double nu : {0.0, 0.5, 1.0, 1.5, 2.5, 4.0}) {
    for (double k : {0.05, 0.7, 3.0, 12.0, 19.9, 20.1, 35.0, 120.0, 600.0}) {
      const double ref = std::log(std::cyl_bessel_i(nu, k));
      EXPECT_NEAR(log_bessel_i(nu, k), ref, 1e-10 * std::max(1.0, std::abs(ref)))
          << "nu = " << nu << " kappa = " << k;
    }
  }
}

TEST(LogBesselI, RegimesAgreeAtSwitch) {
  for (double nu : {0.0, 0.5, 1.0, 3.0}) {
    const double below = log_bessel_i(nu, 20.0);
    const double above = log_bessel_i(nu, std::nextafter(20.0, 21.0));
    EXPECT_NEAR(below, above, 1e-9) << "nu = " << nu;
  }
}

TEST(BesselRatio, MatchesStandardLibrary) {
  for (double nu : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    for (double k : {1e-3, 0.5, 1.0, 5.0, 30.0, 200.0}) {
      const double ref = std::cyl_bessel_i(nu + 1.0, k) / std::cyl_bessel_i(nu, k);
      EXPECT_NEAR(bessel_i_ratio(nu, k), ref, 1e-12) << "nu = " << nu << " kappa = " << k;
    }
  }
  EXPECT_EQ(bessel_i_ratio(0.5, 0.0), 0.0);
}

TEST(BesselRatio, LargeArgumentStaysBelowOne) {
  for (double k : {1e3, 1e4, 1e6, 1e8}) {
    const double r = bessel_i_ratio(0.5, k);
    EXPECT_LT(r, 1.0);
    EXPECT_NEAR(r, 1.0 / std::tanh(k) - 1.0 / k, 1e-13);
  }
}

TEST(OrderConstants, Dimension) {
  const auto c = BesselOrderConstants::for_dimension(3);
  EXPECT_EQ(c.nu, 0.5);
  EXPECT_EQ(c.c_low, 1.0);
  EXPECT_EQ(c.c_up, 2.0);
  for (std::size_t m = 2; m <= 10; ++m) {
    const auto d = BesselOrderConstants::for_dimension(m);
    EXPECT_EQ(d.c_up, d.c_low + 1.0);
  }
}

}  // namespace
}  // namespace pacwelfare
