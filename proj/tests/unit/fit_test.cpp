#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pacwelfare/errors.hpp"
#include "pacwelfare/fit.hpp"

namespace pacwelfare {
namespace {

FitConfig small_config() {
  FitConfig c;
  c.sphere_count = 200;
  c.kappa_max = 3.0;
  c.kappa_step = 0.5;
  c.draws = 200;
  c.master_seed = 12345;
  c.threads = 1;
  return c;
}

TEST(FitConfig, KappaGrid) {
  FitConfig c;
  const auto k = c.kappa_grid();
  ASSERT_EQ(k.size(), 501u);
  EXPECT_EQ(k.front(), 0.0);
  EXPECT_NEAR(k.back(), 5.0, 1e-12);
  EXPECT_NEAR(k[185], 1.85, 1e-12);
  c.kappa_step = 0.0;
  EXPECT_THROW(c.kappa_grid(), InputError);
}

TEST(Objective, Decomposition) {
  std::mt19937_64 g(1);
  const auto ws = testing::random_sample(g, 120, 3);
  const BoundInputs b{ws.size(), 0.05};
  const RiskEvaluator ev(ws);
  const auto mu = testing::random_direction(g, 3);
  const auto uniform = evaluate_objective(ev, VmfParams{mu, 0.0}, b, 300, 8);
  const double pen0 = std::sqrt(std::log(2.0 * std::sqrt(120.0) / 0.05) / 240.0);
  EXPECT_NEAR(uniform.objective - uniform.risk, pen0, 1e-12);
  for (double k : {0.5, 2.0, 4.0}) {
    const auto t = evaluate_objective(ev, VmfParams{mu, k}, b, 300, 8);
    EXPECT_NEAR(t.objective - t.risk, pac_penalty(kl_to_uniform(3, k), b), 1e-12);
    EXPECT_GE(t.risk, 0.0);
    EXPECT_GE(t.objective, t.risk);
    EXPECT_EQ(objective(ws, VmfParams{mu, k}, b, 300, 8), t.objective);
  }
  EXPECT_THROW(objective(testing::random_sample(g, 7, 3), VmfParams{mu, 1.0}, {7, 0.05}, 10, 1),
               InputError);
}

TEST(PointSeed, IgnoresMuAtZeroConcentration) {
  const auto a = PolicyVector::from_unit({1.0, 0.0, 0.0});
  const auto b = PolicyVector::from_unit({0.0, 1.0, 0.0});
  EXPECT_EQ(point_seed(7, VmfParams{a, 0.0}), point_seed(7, VmfParams{b, 0.0}));
  EXPECT_NE(point_seed(7, VmfParams{a, 0.5}), point_seed(7, VmfParams{b, 0.5}));
  EXPECT_NE(point_seed(7, VmfParams{a, 0.5}), point_seed(8, VmfParams{a, 0.5}));
}

// Two-covariate data where the rule x1 >= x2 has zero risk.
std::vector<WeightedObservation> separable(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<WeightedObservation> ws(n);
  for (auto& w : ws) {
    double x1 = u(g);
    double x2 = u(g);
    while (std::abs(x1 - x2) < 0.05) x2 = u(g);
    w = {0.5 + 0.5 * u(g), x1 >= x2 ? 1 : 0, {1.0, x1, x2}};
  }
  return ws;
}

TEST(Fit, SeparableFixtureSelectsZeroRiskRuleAtMaxConcentration) {
  const auto ws = separable(2000, 5);
  FitConfig c = small_config();
  c.sphere_count = 600;
  c.kappa_max = 20.0;
  c.kappa_step = 2.0;
  const auto truth = normalize_to_sphere(std::vector<double>{0.0, 1.0, -1.0});
  auto grid = build_grid(3, c.sphere_count).points;
  grid.push_back(truth);
  const BoundInputs b{ws.size(), 0.05};
  const auto r = fit(RiskEvaluator(ws), grid, c, b);
  EXPECT_LT(great_circle_distance(r.mu_star, truth), 0.1);
  EXPECT_EQ(r.kappa_star, 20.0);
  EXPECT_NEAR(r.best.objective, r.best.risk + pac_penalty(r.best.kl, b), 1e-15);
}

TEST(Fit, ZeroWeightsGiveUniformRule) {
  std::mt19937_64 g(2);
  auto ws = testing::random_sample(g, 50, 3);
  for (auto& w : ws) w.h = 0.0;
  const auto r = fit(ws, small_config(), {ws.size(), 0.05});
  EXPECT_EQ(r.kappa_star, 0.0);
  EXPECT_EQ(r.best.risk, 0.0);
}

TEST(Fit, NeverWorseThanUniformAndMatchesTrace) {
  std::mt19937_64 g(3);
  const auto ws = testing::random_sample(g, 300, 3, 6);
  const auto c = small_config();
  const auto r = fit(ws, c, {ws.size(), 0.05});
  ASSERT_EQ(r.trace.size(), r.grid.size() * r.kappas.size());
  double best = 1e9;
  for (const auto& t : r.trace) {
    best = std::min(best, t.objective);
    if (t.kappa_index == 0) EXPECT_GE(t.objective, r.best.objective);
  }
  EXPECT_EQ(best, r.best.objective);
}

TEST(Fit, InvariantToGridOrderAndThreads) {
  std::mt19937_64 g(4);
  const auto ws = testing::random_sample(g, 250, 3, 5);
  const RiskEvaluator ev(ws);
  auto c = small_config();
  const BoundInputs b{ws.size(), 0.05};
  auto grid = build_grid(3, c.sphere_count).points;
  const auto a = fit(ev, grid, c, b);
  std::shuffle(grid.begin(), grid.end(), g);
  c.threads = 4;
  const auto s = fit(ev, grid, c, b);
  EXPECT_TRUE(a.mu_star == s.mu_star);
  EXPECT_EQ(a.kappa_star, s.kappa_star);
  EXPECT_EQ(a.best.objective, s.best.objective);
  EXPECT_EQ(a.best.risk, s.best.risk);
}

TEST(Fit, ThreadCountDoesNotChangeTrace) {
  std::mt19937_64 g(5);
  const auto ws = testing::random_sample(g, 200, 3);
  auto c = small_config();
  const auto one = fit(ws, c, {ws.size(), 0.05});
  c.threads = 3;
  const auto three = fit(ws, c, {ws.size(), 0.05});
  ASSERT_EQ(one.trace.size(), three.trace.size());
  for (std::size_t i = 0; i < one.trace.size(); ++i) {
    EXPECT_EQ(one.trace[i].objective, three.trace[i].objective);
    EXPECT_EQ(one.trace[i].mcse, three.trace[i].mcse);
  }
}

TEST(Fit, NotBelowDiscreteGibbsOracle) {
  std::mt19937_64 g(6);
  const auto ws = testing::random_sample(g, 400, 3, 8);
  const RiskEvaluator ev(ws);
  auto c = small_config();
  c.sphere_count = 400;
  c.kappa_max = 10.0;
  c.draws = 400;
  const BoundInputs b{ws.size(), 0.05};
  const auto grid = build_grid(3, c.sphere_count).points;
  const auto r = fit(ev, grid, c, b);
  DiscretePolicySet set;
  for (const auto& p : grid) {
    set.atoms.push_back(p);
    set.prior.push_back(1.0 / grid.size());
    set.risks.push_back(ev.risk(p.values()));
  }
  double total = 0.0;
  for (double p : set.prior) total += p;
  set.prior.back() += 1.0 - total;
  const auto gibbs = solve_chi(set, b);
  const double gibbs_obj = objective_value(gibbs.posterior_risk, gibbs.kl, b);
  EXPECT_GE(r.best.objective, gibbs_obj - 2.0 * r.best.mcse);
}

TEST(KappaProfile, ConsistentWithFitAndHigherDrawRerun) {
  std::mt19937_64 g(7);
  const auto ws = testing::random_sample(g, 300, 3, 10);
  const RiskEvaluator ev(ws);
  auto c = small_config();
  c.kappa_step = 0.25;
  const BoundInputs b{ws.size(), 0.05};
  const auto mu = testing::random_direction(g, 3);
  const auto rows = kappa_profile(ev, mu, c, b);
  ASSERT_EQ(rows.size(), c.kappa_grid().size());
  EXPECT_EQ(rows[0].terms.objective,
            evaluate_objective(ev, VmfParams{mu, 0.0}, b, c.draws,
                               point_seed(c.master_seed, VmfParams{mu, 0.0}))
                .objective);
  auto hi = c;
  hi.draws = c.draws * 10;
  const auto rerun = kappa_profile(ev, mu, hi, b);
  int within2 = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double diff = std::abs(rows[k].terms.risk - rerun[k].terms.risk);
    if (diff <= 2.0 * rows[k].terms.mcse) ++within2;
    EXPECT_LE(diff, 4.0 * rows[k].terms.mcse + 1e-15) << "kappa = " << rows[k].kappa;
  }
  EXPECT_GE(within2, static_cast<int>(0.8 * rows.size()));
}

TEST(Heatmap, ComplementUniformAndSmoothness) {
  std::mt19937_64 g(8);
  const auto ws = testing::random_sample(g, 300, 3, 12);
  const RiskEvaluator ev(ws);
  auto c = small_config();
  c.draws = 500;
  const double hbar = mean_weight(ws);
  const auto grid = build_grid(3, 800).points;

  const auto det = risk_heatmap(ev, grid, c, HeatmapMode::deterministic, 0.0);
  ASSERT_EQ(det.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(det[i].risk + ev.risk((-grid[i]).values()), hbar, 1e-12);
  }
  const auto flat = risk_heatmap(ev, grid, c, HeatmapMode::posterior, 0.0);
  for (const auto& cell : flat) EXPECT_EQ(cell.risk, flat[0].risk);

  const auto smooth = risk_heatmap(ev, grid, c, HeatmapMode::posterior, 2.0);
  double max_det = 0.0;
  double max_post = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double nearest = 10.0;
    std::size_t j_best = i;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (j == i) continue;
      const double d = great_circle_distance(grid[i], grid[j]);
      if (d < nearest) {
        nearest = d;
        j_best = j;
      }
    }
    max_det = std::max(max_det, std::abs(det[i].risk - det[j_best].risk));
    max_post = std::max(max_post, std::abs(smooth[i].risk - smooth[j_best].risk));
  }
  EXPECT_LT(max_post, 0.5 * max_det);

  const auto ws2 = testing::random_sample(g, 50, 2);
  EXPECT_THROW(risk_heatmap(RiskEvaluator(ws2), build_grid(2, 10).points, c,
                            HeatmapMode::deterministic, 0.0),
               InputError);
}

TEST(BestDeterministic, ExhaustiveScanAndZeroRiskRule) {
  std::mt19937_64 g(9);
  const auto ws = testing::random_sample(g, 200, 3);
  const RiskEvaluator ev(ws);
  const auto grid = build_grid(3, 100).points;
  const auto best = best_deterministic(ev, grid);
  double min_r = 1e9;
  for (const auto& p : grid) min_r = std::min(min_r, testing::brute_risk(ws, p.values()));
  EXPECT_NEAR(best.risk, min_r, 1e-15);

  const auto sep = separable(500, 3);
  auto pts = build_grid(3, 100).points;
  const auto zero = normalize_to_sphere(std::vector<double>{0.0, 1.0, -1.0});
  pts.push_back(zero);
  const auto b2 = best_deterministic(RiskEvaluator(sep), pts);
  EXPECT_TRUE(b2.beta == zero);
  EXPECT_EQ(b2.risk, 0.0);
}

TEST(RateBound, ConstantAndShape) {
  const auto r = regret_rate_bound(100, 3, {1.0}, 0.05);
  const double e = std::numbers::e;
  const double ln8 = std::log(8.0);
  const double expect = 4.0 * std::sqrt(1.5) + 1.0 + std::log(9.0) / ln8 + std::log(2.0 * e / 0.05) +
                        std::sqrt(std::log(9.0) / (2.0 * ln8)) +
                        std::sqrt(0.5 * std::log(4.0 * e / 0.05)) +
                        std::sqrt(ln8) / (std::sqrt(2.0) * ln8);
  EXPECT_NEAR(r.constant, expect, 1e-12);
  EXPECT_NEAR(r.constant, 14.5021, 1e-4);
  EXPECT_NEAR(r.bound, r.constant * std::log(100.0) / 10.0, 1e-12);

  const auto doubled = regret_rate_bound(100, 3, {2.0}, 0.05);
  EXPECT_NEAR(doubled.constant - r.constant, 4.0 * std::sqrt(1.5), 1e-12);

  EXPECT_GE(regret_rate_bound(8, 3, {1.0}, 0.05).bound, regret_rate_bound(100, 3, {1.0}, 0.05).bound);
  EXPECT_GE(regret_rate_bound(100, 3, {1.0}, 0.05).bound,
            regret_rate_bound(10000, 3, {1.0}, 0.05).bound);
  EXPECT_THROW(regret_rate_bound(7, 3, {1.0}, 0.05), InputError);
  EXPECT_THROW(regret_rate_bound(100, 3, {0.0}, 0.05), InputError);
}

}  // namespace
}  // namespace pacwelfare
