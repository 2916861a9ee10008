#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pacwelfare/gibbs.hpp"
#include "pacwelfare/policy.hpp"
#include "pacwelfare/vmf.hpp"
#include "pacwelfare/welfare.hpp"

namespace pacwelfare {

struct FitConfig {
  std::size_t sphere_count = 10116;
  double kappa_max = 5.0;
  double kappa_step = 0.01;
  std::size_t draws = 1000;
  double epsilon = 0.05;
  std::uint64_t master_seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency; never changes results
  bool keep_trace = true;

  void validate() const;
  /// 0, step, 2 step, ... up to kappa_max (inclusive within rounding).
  std::vector<double> kappa_grid() const;
};

/// One evaluation of the PAC-Bayes objective at a vMF rule.
struct ObjectiveTerms {
  double objective = 0.0;
  double risk = 0.0;  // Monte-Carlo posterior risk
  double mcse = 0.0;
  double kl = 0.0;
  double penalty = 0.0;
};

/// Seed for the Monte-Carlo draws at (mu, kappa). Depends on the rule itself,
/// not on its position in any grid; at kappa = 0 mu is ignored, since the
/// uniform distribution does not depend on it.
std::uint64_t point_seed(std::uint64_t master, const VmfParams& vmf);

ObjectiveTerms evaluate_objective(const RiskEvaluator& evaluator, const VmfParams& vmf,
                                  const BoundInputs& bounds, std::size_t draws,
                                  std::uint64_t seed);

/// R_hat(mu, kappa) + sqrt((KL + ln(2 sqrt(n)/eps)) / (2n)).
double objective(std::span<const WeightedObservation> ws, const VmfParams& vmf,
                 const BoundInputs& bounds, std::size_t draws, std::uint64_t seed);

struct TracePoint {
  std::uint32_t mu_index = 0;
  std::uint32_t kappa_index = 0;
  double objective = 0.0;
  double risk = 0.0;
  double mcse = 0.0;
  double kl = 0.0;
};

struct FitResult {
  PolicyVector mu_star;
  double kappa_star = 0.0;
  ObjectiveTerms best;
  std::vector<PolicyVector> grid;
  std::vector<double> kappas;
  std::vector<TracePoint> trace;  // mu-major, kappa-minor
};

/// Exhaustive search over sphere grid x kappa grid. Ties are broken by
/// smaller kappa, then canonical_less on mu; the result does not depend on
/// grid order or thread count.
FitResult fit(std::span<const WeightedObservation> ws, const FitConfig& config,
              const BoundInputs& bounds);
FitResult fit(const RiskEvaluator& evaluator, std::span<const PolicyVector> grid,
              const FitConfig& config, const BoundInputs& bounds);

struct ProfileRow {
  double kappa = 0.0;
  ObjectiveTerms terms;
};

/// Objective along the kappa grid at fixed mu, with the same seeds fit uses.
std::vector<ProfileRow> kappa_profile(const RiskEvaluator& evaluator, const PolicyVector& mu,
                                      const FitConfig& config, const BoundInputs& bounds);

enum class HeatmapMode { deterministic, posterior };

struct HeatmapCell {
  SphericalCoords coords;
  double risk = 0.0;
  double mcse = 0.0;
};

/// Risk over the sphere grid (m = 3 only): R_S(beta) in deterministic mode,
/// Monte-Carlo risk of vMF(beta, kappa) in posterior mode.
std::vector<HeatmapCell> risk_heatmap(const RiskEvaluator& evaluator,
                                      std::span<const PolicyVector> grid, const FitConfig& config,
                                      HeatmapMode mode, double kappa);

struct DeterministicBest {
  PolicyVector beta;
  double risk = 0.0;
};

/// Empirical welfare maximiser over a finite grid.
DeterministicBest best_deterministic(const RiskEvaluator& evaluator,
                                     std::span<const PolicyVector> grid);

struct RateBoundParams {
  double margin_c = 1.0;
};

struct RateBound {
  double constant = 0.0;  // M
  double bound = 0.0;     // M ln(n) / sqrt(n), risk units
};

RateBound regret_rate_bound(std::size_t n, std::size_t m, const RateBoundParams& params,
                            double epsilon);

}  // namespace pacwelfare
