#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pacwelfare/policy.hpp"
#include "pacwelfare/rng.hpp"
#include "pacwelfare/vmf.hpp"
#include "pacwelfare/welfare.hpp"

namespace pacwelfare {

/// Mean of N(0, sigma^2) truncated to (0, trunc_bound).
double truncated_normal_mean(double sigma, double trunc_bound);

/// Inversion draws from N(0, sigma^2) truncated to (0, trunc_bound); every
/// draw lies strictly inside the interval.
std::vector<double> truncated_normal_sample(double sigma, double trunc_bound, std::size_t count,
                                            std::uint64_t seed);
double truncated_normal_draw(double sigma, double trunc_bound, Engine& rng);

/// Synthetic stand-in for the two-covariate training-programme sample:
/// prior earnings (about 30% zero, lognormal otherwise, capped) and years of
/// education on 7..18.
struct FixtureCovariates {
  double zero_share = 0.3;
  double earnings_median = 2500.0;
  double earnings_log_sd = 1.1;
  double earnings_cap = 63000.0;
  std::array<double, 12> education_weights{2, 4, 7, 12, 20, 38, 6, 5, 2, 2, 1, 1};  // 7..18
};

/// Rows of raw covariates taken from a file and resampled with replacement
/// when the requested n differs from the pool size.
struct EmpiricalCovariates {
  std::vector<std::array<double, 2>> pool;
  std::vector<int> treatment;  // optional; used as-is when n equals the pool size
};

struct BivariateNormalCovariates {
  std::array<double, 2> mean{31500.0, 11.5};
  std::array<double, 2> sd{5714.0, 1.889};
  double correlation = 0.126;
  std::array<double, 2> scale{63000.0, 18.0};  // maps raw values to [0, 1], then clipped
  bool discretize_education = false;           // 12 equal-width bins on [0, 1]
};

using CovariateSource = std::variant<FixtureCovariates, EmpiricalCovariates, BivariateNormalCovariates>;

struct DgpConfig {
  std::array<double, 3> alpha{};     // control: intercept, earnings, education
  std::array<double, 3> lambda_t{};  // treated
  double sigma0 = 1.0;
  double sigma1 = 1.0;
  double trunc_bound = 5.0;
  std::size_t n = 9223;
  CovariateSource covariates = FixtureCovariates{};
  double assignment_prob = 2.0 / 3.0;

  void validate() const;
};

struct ExperimentPreset {
  int id = 0;
  std::string name;
  DgpConfig config;
  std::array<double, 3> reported_mu{};
  double reported_kappa = 0.0;
  std::array<double, 3> reported_oracle{};
};

/// Settings of the ten synthetic experiments. Throws InputError for ids outside 1..10.
ExperimentPreset experiment_preset(int id);

/// (lambda~ - alpha~) / ||.||, tildes adding the truncated-normal means to the intercepts.
PolicyVector oracle_rule(const DgpConfig& config);

struct DgpTruth {
  DgpConfig config;
  std::array<double, 3> alpha_tilde{};
  std::array<double, 3> lambda_tilde{};
  PolicyVector oracle;
  std::array<double, 2> scale{};  // raw covariate / scale = x in the outcome equations
  std::vector<double> y0;
  std::vector<double> y1;
};

struct GeneratedData {
  std::vector<RawObservation> rows;  // raw covariates, propensity left unset
  DgpTruth truth;
};

GeneratedData generate(const DgpConfig& config, std::uint64_t seed);

/// Fits of a synthetic sample evaluate rules on (1, raw / fit_maxima).
using CandidateRule = std::variant<PolicyVector, VmfParams>;

struct RegretEstimate {
  double regret = 0.0;  // currency
  double mcse = 0.0;
};

/// Welfare of the oracle minus welfare of the candidate, on a fresh
/// population of `population` covariate draws. For a vMF candidate the
/// treatment probability of each individual is estimated from `eval_draws`
/// shared rule draws.
RegretEstimate population_regret(const DgpTruth& truth, const CandidateRule& rule,
                                 const std::array<double, 2>& fit_maxima, std::size_t population,
                                 std::size_t eval_draws, std::uint64_t seed);

}  // namespace pacwelfare
