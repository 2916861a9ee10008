#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pacwelfare/errors.hpp"
#include "pacwelfare/vmf.hpp"

namespace pacwelfare {
namespace {

using testing::a3;
using testing::kl3;

TEST(BesselRatioM, SphereClosedForm) {
  EXPECT_EQ(bessel_ratio(3, 0.0), 0.0);
  EXPECT_NEAR(bessel_ratio(3, 1.0), 0.313035, 1e-6);
  EXPECT_NEAR(bessel_ratio(3, 10.0), 0.9, 1e-6);
  for (double k = 0.01; k <= 1000.0; k *= 1.07) {
    EXPECT_NEAR(bessel_ratio(3, k), a3(k), 1e-9) << "kappa = " << k;
  }
}

TEST(BesselRatioM, AmosBoundsLattice) {
  for (std::size_t m = 2; m <= 10; ++m) {
    for (double k : {0.0, 1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0, 1e3, 1e4}) {
      const double a = bessel_ratio(m, k);
      EXPECT_LE(bessel_ratio_lower_bound(m, k), a) << m << " " << k;
      EXPECT_LE(a, bessel_ratio_upper_bound(m, k)) << m << " " << k;
      EXPECT_GE(a, 0.0);
      EXPECT_LT(a, 1.0);
    }
  }
}

TEST(KlToUniform, SphereClosedForm) {
  EXPECT_EQ(kl_to_uniform(3, 0.0), 0.0);
  EXPECT_NEAR(kl_to_uniform(3, 1.0), 0.151596, 1e-6);
  for (double k = 0.01; k <= 1000.0; k *= 1.11) {
    EXPECT_NEAR(kl_to_uniform(3, k), kl3(k), 1e-8) << "kappa = " << k;
  }
}

TEST(KlToUniform, CircleMatchesBesselFormula) {
  // m = 2: KL = kappa A - ln I_0(kappa).
  for (double k : {0.1, 1.0, 4.0, 15.0, 60.0}) {
    const double a = std::cyl_bessel_i(1.0, k) / std::cyl_bessel_i(0.0, k);
    EXPECT_NEAR(kl_to_uniform(2, k), k * a - std::log(std::cyl_bessel_i(0.0, k)), 1e-9);
  }
}

TEST(KlToUniform, MonotoneWithLogGrowth) {
  for (std::size_t m : {2u, 3u, 5u, 10u}) {
    double prev = 0.0;
    double worst = 0.0;
    for (double k = 0.0; k <= 1e4; k = k < 1.0 ? k + 0.05 : k * 1.05) {
      const double kl = kl_to_uniform(m, k);
      EXPECT_GE(kl, prev - 1e-12) << m << " " << k;
      prev = kl;
      if (k >= 1.0) worst = std::max(worst, kl / std::log1p(k));
    }
    EXPECT_LT(worst, static_cast<double>(m));
  }
}

TEST(KlUpperBound, Examples) {
  EXPECT_NEAR(kl_upper_bound(3, 1.0),
              std::log((1.0 + std::sqrt(5.0)) / 3.0) + std::sqrt(2.0) - std::sqrt(5.0) + 1.0, 1e-14);
  EXPECT_NEAR(kl_upper_bound(3, 1.0), 0.25390, 1e-5);
  EXPECT_NEAR(kl_upper_bound(3, 0.0), 0.0, 1e-15);
  EXPECT_GE(kl_upper_bound(3, 100.0) - kl_to_uniform(3, 100.0), 0.0);
}

TEST(Bounds, DominateOnLattice) {
  int violations = 0;
  for (std::size_t m = 2; m <= 10; ++m) {
    for (double k = 0.0; k <= 1e4; k = k < 1.0 ? k + 0.01 : k * 1.02) {
      if (kl_upper_bound(m, k) - kl_to_uniform(m, k) < 0.0) ++violations;
      if (cv_upper_bound(m, k) - circular_variance(m, k) < 0.0) ++violations;
    }
  }
  EXPECT_EQ(violations, 0);
}

TEST(CircularVariance, Examples) {
  EXPECT_EQ(circular_variance(3, 0.0), 1.0);
  EXPECT_EQ(cv_upper_bound(3, 0.0), 1.0);
  EXPECT_NEAR(circular_variance(3, 1.0), 0.686965, 1e-6);
  EXPECT_NEAR(cv_upper_bound(3, 1.0), std::sqrt(5.0) / (1.0 + std::sqrt(5.0)), 1e-14);
  EXPECT_NEAR(cv_upper_bound(3, 1.0), 0.69098, 1e-5);
  // O(1/kappa) decay: kappa times the bound stays in [1, 4 (nu + 1)].
  const double scaled = 100.0 * cv_upper_bound(3, 100.0);
  EXPECT_GE(scaled, 1.0);
  EXPECT_LE(scaled, 4.0 * 1.5);
}

TEST(Sampler, UniformAtZeroConcentration) {
  const std::size_t n = 100000;
  const VmfParams v{PolicyVector::from_unit({0.0, 1.0, 0.0}), 0.0};
  const auto xs = sample(v, n, 17);
  std::vector<double> mean(3, 0.0);
  for (const auto& b : xs) {
    for (std::size_t k = 0; k < 3; ++k) mean[k] += b[k] / static_cast<double>(n);
  }
  EXPECT_LE(std::hypot(mean[0], mean[1], mean[2]), 3.0 / std::sqrt(double(n)) * std::sqrt(3.0));
}

TEST(Sampler, ProjectionMomentAndKs) {
  const std::size_t n = 100000;
  const double kappa = 5.0;
  const auto mu = normalize_to_sphere(std::vector<double>{0.3, -0.5, 0.8});
  const VmfSampler sampler(VmfParams{mu, kappa});
  Engine rng = make_engine(2024);
  std::vector<double> beta(3);
  std::vector<double> t(n);
  double s = 0.0;
  double s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sampler.draw(rng, beta);
    EXPECT_NEAR(std::hypot(beta[0], beta[1], beta[2]), 1.0, 1e-12);
    t[i] = mu[0] * beta[0] + mu[1] * beta[1] + mu[2] * beta[2];
    s += t[i];
    s2 += t[i] * t[i];
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  EXPECT_NEAR(a3(kappa), 0.8000908, 1e-7);
  EXPECT_LE(std::abs(mean - a3(kappa)), 3.0 * se);
  const double d = testing::ks_statistic(t, [&](double x) {
    return std::expm1(kappa * (x + 1.0)) / std::expm1(2.0 * kappa);
  });
  EXPECT_LT(d, 1.628 / std::sqrt(double(n)));
}

TEST(Sampler, DeterministicGivenSeed) {
  const VmfParams v{normalize_to_sphere(std::vector<double>{1.0, 2.0, 3.0, 4.0}), 2.5};
  const auto a = sample(v, 50, 99);
  const auto b = sample(v, 50, 99);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a[i] == b[i]);
  const auto c = sample(v, 50, 100);
  EXPECT_FALSE(a[0] == c[0]);
}

TEST(Sampler, HighDimensionAndHugeConcentration) {
  for (std::size_t m : {2u, 3u, 7u}) {
    std::vector<double> raw(m, 1.0);
    const auto mu = normalize_to_sphere(raw);
    const auto xs = sample(VmfParams{mu, 1e6}, 200, 5);
    for (const auto& b : xs) EXPECT_LT(great_circle_distance(b, mu), 0.02);
  }
}

TEST(Moments, IdentitiesAndSampleAgreement) {
  const auto mu = normalize_to_sphere(std::vector<double>{0.2, 0.9, -0.4});
  for (double k : {0.0, 0.3, 1.0, 8.0, 400.0}) {
    const auto mo = moments(VmfParams{mu, k});
    double trace = 0.0;
    double mean2 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      trace += mo.covariance[i * 3 + i];
      mean2 += mo.mean[i] * mo.mean[i];
      for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_DOUBLE_EQ(mo.covariance[i * 3 + j], mo.covariance[j * 3 + i]);
      }
    }
    EXPECT_NEAR(trace + mean2, 1.0, 1e-12) << "kappa = " << k;
  }
  const auto one = moments(VmfParams{mu, 1.0});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(one.mean[i], 0.313035 * mu[i], 1e-6);

  const std::size_t n = 100000;
  const double kappa = 2.0;
  const auto mo = moments(VmfParams{mu, kappa});
  const auto xs = sample(VmfParams{mu, kappa}, n, 7);
  // Second moments E[b_i b_j] against mean and covariance; SE from the sample,
  // widened to 3.5 for six simultaneous comparisons.
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i; j < 3; ++j) {
      double s = 0.0;
      double s2 = 0.0;
      for (const auto& b : xs) {
        const double v = b[i] * b[j];
        s += v;
        s2 += v * v;
      }
      const double m = s / n;
      const double se = std::sqrt((s2 / n - m * m) / n);
      const double expect = mo.covariance[i * 3 + j] + mo.mean[i] * mo.mean[j];
      EXPECT_LE(std::abs(m - expect), 3.5 * se + 1e-12) << i << "," << j;
    }
  }
}

TEST(CircleInversion, MatchesCdfAndQuadrature) {
  const double kappa = 2.0;
  const double mean = 0.7;
  const auto angles = sample_circle_inversion(mean, kappa, 50000, 3);
  std::vector<double> centred;
  centred.reserve(angles.size());
  for (double a : angles) {
    EXPECT_GT(a, -std::numbers::pi);
    EXPECT_LE(a, std::numbers::pi);
    centred.push_back(std::remainder(a - mean, 2.0 * std::numbers::pi));
  }
  const double d = testing::ks_statistic(centred, [&](double x) { return von_mises_cdf(x, kappa); });
  EXPECT_LT(d, 1.628 / std::sqrt(50000.0));
  // CDF against direct quadrature of the density.
  for (double x : {-2.5, -1.0, 0.0, 0.4, 2.0}) {
    const int panels = 20000;
    const double norm = 2.0 * std::numbers::pi * std::cyl_bessel_i(0.0, kappa);
    const double h = (x + std::numbers::pi) / panels;
    double s = 0.0;
    for (int i = 0; i <= panels; ++i) {
      const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += w * std::exp(kappa * std::cos(-std::numbers::pi + i * h));
    }
    EXPECT_NEAR(von_mises_cdf(x, kappa), s * h / 3.0 / norm, 1e-9) << "x = " << x;
  }
}

TEST(VmfParams, Validation) {
  EXPECT_THROW((VmfParams{PolicyVector::from_unit({1.0, 0.0}), -1.0}).validate(), InputError);
  EXPECT_THROW(bessel_ratio(3, -0.5), InputError);
  EXPECT_THROW(sample(VmfParams{PolicyVector::from_unit({1.0, 0.0}), 1.0}, 0, 1), InputError);
}

}  // namespace
}  // namespace pacwelfare
