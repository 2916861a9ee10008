#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pacwelfare/policy.hpp"
#include "pacwelfare/vmf.hpp"

namespace pacwelfare {

/// One experimental record before weighting. Covariates exclude the intercept.
struct RawObservation {
  double outcome = 0.0;
  int treatment = 0;
  std::vector<double> covariates;
  std::optional<double> propensity;
};

struct DatasetMeta {
  std::size_t n = 0;
  double outcome_cap = 0.0;  // M: largest outcome in the sample
  double psi = 0.0;          // strict-overlap bound, e in [psi, 1 - psi]
  std::vector<double> covariate_maxima;
  double cost = 0.0;  // already subtracted from treated outcomes upstream
  std::optional<double> constant_propensity;

  void validate() const;
  /// Converts risk units in [0, 1] to outcome (currency) units.
  double currency_scale() const { return outcome_cap / psi; }
};

/// Largest valid overlap bound min(min e, 1 - max e), capped just below 1/2.
double default_psi(std::span<const double> propensities);

struct WeightedObservation {
  double h = 0.0;  // in [0, 1]
  int d = 0;
  std::vector<double> x_aug;  // (1, x / max)
};

struct WeightingResult {
  std::vector<WeightedObservation> rows;
  std::size_t clamped = 0;  // negative outcomes set to zero
};

/// h = (y psi / M) / (e d + (1 - e)(1 - d)); covariates divided by their
/// maxima and prefixed with an intercept. Rejects propensities outside
/// [psi, 1 - psi]; negative outcomes are clamped to zero and counted.
WeightingResult compute_weights(std::span<const RawObservation> rows, const DatasetMeta& meta);

double mean_weight(std::span<const WeightedObservation> ws);

/// W_n(beta) = (M / psi) (1/n) sum h_i 1{f_beta(x_i) = d_i}.
double empirical_welfare(std::span<const WeightedObservation> ws, const DatasetMeta& meta,
                         const PolicyVector& beta);

/// R_S(beta) = (1/n) sum h_i 1{f_beta(x_i) != d_i}, by direct summation.
double empirical_risk_det(std::span<const WeightedObservation> ws, const PolicyVector& beta);

/// Evaluates R_S for many rules. Rows are grouped into strata that agree on
/// every covariate except one sort column; within a stratum the LES
/// predicate is monotone in that column, so each stratum costs one binary
/// search against prefix sums of h. With one low-cardinality covariate (years
/// of education, say) a rule costs O(levels * log n) instead of O(n).
class RiskEvaluator {
 public:
  explicit RiskEvaluator(std::span<const WeightedObservation> ws);

  double risk(std::span<const double> beta) const;
  std::size_t dim() const noexcept { return dim_; }
  std::size_t rows() const noexcept { return n_; }
  std::size_t strata() const noexcept { return strata_.size(); }
  std::size_t sort_column() const noexcept { return sort_col_; }

 private:
  struct Stratum {
    std::size_t begin = 0;  // into the sorted arrays
    std::size_t end = 0;
  };

  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::size_t sort_col_ = 0;
  std::vector<double> x_;          // row-major, sorted by (stratum, sort column)
  std::vector<double> treated_;    // prefix sums of h * d, per stratum, length end - begin + 1
  std::vector<double> control_;    // prefix sums of h * (1 - d)
  std::vector<std::size_t> prefix_offset_;
  std::vector<Stratum> strata_;
};

struct McRisk {
  double risk = 0.0;
  double mcse = 0.0;  // sqrt(across-draw variance of R_S(beta^j) / J)
};

/// Monte-Carlo posterior risk with J draws shared across all rows. Equals
/// (1/n) sum h_i (d_i (1 - P_i) + (1 - d_i) P_i), P_i the share of draws
/// treating row i, computed as the mean of R_S over the draws.
McRisk empirical_risk_posterior_mc(std::span<const WeightedObservation> ws, const VmfParams& vmf,
                                   std::size_t draws, std::uint64_t seed);
McRisk empirical_risk_posterior_mc(const RiskEvaluator& evaluator, const VmfParams& vmf,
                                   std::size_t draws, std::uint64_t seed);

struct PropensitySummary {
  std::vector<double> per_row;
  double min = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

/// Per-individual treatment propensity P_i under the vMF rule, using the same
/// draws as empirical_risk_posterior_mc for an identical seed.
PropensitySummary individual_propensities(std::span<const WeightedObservation> ws,
                                          const VmfParams& vmf, std::size_t draws,
                                          std::uint64_t seed);

/// Linear-interpolation quantile of an unsorted sample, p in [0, 1].
double quantile(std::vector<double> values, double p);

}  // namespace pacwelfare
