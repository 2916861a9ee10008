#include "pacwelfare/fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "pacwelfare/errors.hpp"
#include "pacwelfare/rng.hpp"

namespace pacwelfare {
namespace {

unsigned resolve_threads(unsigned requested, std::size_t tasks) {
  unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(tasks, 1)));
}

// Runs body(i) for i in [0, count). Each index writes only its own output
// slots, so scheduling cannot affect results.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  const unsigned t = resolve_threads(threads, count);
  if (t <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Strict weak order for the reduction: objective, then kappa, then mu.
bool better(double obj_a, double kappa_a, const PolicyVector& mu_a, double obj_b, double kappa_b,
            const PolicyVector& mu_b) {
  if (obj_a != obj_b) return obj_a < obj_b;
  if (kappa_a != kappa_b) return kappa_a < kappa_b;
  return canonical_less(mu_a, mu_b);
}

}  // namespace

void FitConfig::validate() const {
  if (sphere_count < 2) throw InputError("sphere grid needs at least 2 points");
  if (!(kappa_max >= 0.0) || !std::isfinite(kappa_max)) throw InputError("kappa_max must be >= 0");
  if (!(kappa_step > 0.0)) throw InputError("kappa_step must be > 0");
  if (draws == 0) throw InputError("draw count J must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in (0, 1)");
}

std::vector<double> FitConfig::kappa_grid() const {
  validate();
  const auto steps = static_cast<std::size_t>(std::floor(kappa_max / kappa_step + 1e-9));
  std::vector<double> out;
  out.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) out.push_back(static_cast<double>(i) * kappa_step);
  return out;
}

std::uint64_t point_seed(std::uint64_t master, const VmfParams& vmf) {
  std::uint64_t h = mix64(master ^ 0x6b617070615f6d75ULL);
  h = mix64(h ^ mix64(bits_of(vmf.kappa)));
  if (vmf.kappa == 0.0) return h;
  for (double c : vmf.mu.values()) h = mix64(h ^ mix64(bits_of(c)));
  return h;
}

ObjectiveTerms evaluate_objective(const RiskEvaluator& evaluator, const VmfParams& vmf,
                                  const BoundInputs& bounds, std::size_t draws,
                                  std::uint64_t seed) {
  const McRisk mc = empirical_risk_posterior_mc(evaluator, vmf, draws, seed);
  ObjectiveTerms t;
  t.risk = mc.risk;
  t.mcse = mc.mcse;
  t.kl = kl_to_uniform(vmf.dim(), vmf.kappa);
  t.penalty = pac_penalty(t.kl, bounds);
  t.objective = t.risk + t.penalty;
  return t;
}

double objective(std::span<const WeightedObservation> ws, const VmfParams& vmf,
                 const BoundInputs& bounds, std::size_t draws, std::uint64_t seed) {
  bounds.validate();
  return evaluate_objective(RiskEvaluator(ws), vmf, bounds, draws, seed).objective;
}

FitResult fit(std::span<const WeightedObservation> ws, const FitConfig& config,
              const BoundInputs& bounds) {
  config.validate();
  RiskEvaluator evaluator(ws);
  const SphereGrid grid = build_grid(evaluator.dim(), config.sphere_count);
  return fit(evaluator, grid.points, config, bounds);
}

FitResult fit(const RiskEvaluator& evaluator, std::span<const PolicyVector> grid,
              const FitConfig& config, const BoundInputs& bounds) {
  config.validate();
  bounds.validate();
  if (grid.empty()) throw InputError("sphere grid is empty");
  if (bounds.n != evaluator.rows()) throw InputError("bound sample size differs from the data");
  for (const auto& p : grid) {
    if (p.dim() != evaluator.dim()) throw InputError("grid dimension does not match covariates");
  }

  FitResult out;
  out.kappas = config.kappa_grid();
  out.grid.assign(grid.begin(), grid.end());
  const std::size_t nk = out.kappas.size();
  const std::size_t nmu = grid.size();

  std::vector<ObjectiveTerms> terms(nmu * nk);

  // kappa = 0 is the same uniform rule for every mu.
  const ObjectiveTerms uniform = evaluate_objective(
      evaluator, VmfParams{grid[0], 0.0}, bounds, config.draws,
      point_seed(config.master_seed, VmfParams{grid[0], 0.0}));

  parallel_for(nmu, config.threads, [&](std::size_t i) {
    for (std::size_t k = 0; k < nk; ++k) {
      const VmfParams vmf{grid[i], out.kappas[k]};
      terms[i * nk + k] = vmf.kappa == 0.0
                              ? uniform
                              : evaluate_objective(evaluator, vmf, bounds, config.draws,
                                                   point_seed(config.master_seed, vmf));
    }
  });

  std::size_t best = 0;
  for (std::size_t idx = 1; idx < terms.size(); ++idx) {
    const std::size_t i = idx / nk;
    const std::size_t k = idx % nk;
    const std::size_t bi = best / nk;
    const std::size_t bk = best % nk;
    if (better(terms[idx].objective, out.kappas[k], grid[i], terms[best].objective,
               out.kappas[bk], grid[bi])) {
      best = idx;
    }
  }
  out.mu_star = grid[best / nk];
  out.kappa_star = out.kappas[best % nk];
  out.best = terms[best];

  if (config.keep_trace) {
    out.trace.reserve(terms.size());
    for (std::size_t idx = 0; idx < terms.size(); ++idx) {
      const auto& t = terms[idx];
      out.trace.push_back({static_cast<std::uint32_t>(idx / nk),
                           static_cast<std::uint32_t>(idx % nk), t.objective, t.risk, t.mcse,
                           t.kl});
    }
  }
  return out;
}

std::vector<ProfileRow> kappa_profile(const RiskEvaluator& evaluator, const PolicyVector& mu,
                                      const FitConfig& config, const BoundInputs& bounds) {
  config.validate();
  bounds.validate();
  const auto kappas = config.kappa_grid();
  std::vector<ProfileRow> rows(kappas.size());
  parallel_for(kappas.size(), config.threads, [&](std::size_t k) {
    const VmfParams vmf{mu, kappas[k]};
    rows[k] = {kappas[k], evaluate_objective(evaluator, vmf, bounds, config.draws,
                                             point_seed(config.master_seed, vmf))};
  });
  return rows;
}

std::vector<HeatmapCell> risk_heatmap(const RiskEvaluator& evaluator,
                                      std::span<const PolicyVector> grid, const FitConfig& config,
                                      HeatmapMode mode, double kappa) {
  if (evaluator.dim() != 3) throw InputError("heatmaps are defined for m = 3 only");
  if (mode == HeatmapMode::posterior && (!(kappa >= 0.0) || !std::isfinite(kappa))) {
    throw InputError("heatmap kappa must be finite and >= 0");
  }
  std::vector<HeatmapCell> cells(grid.size());
  parallel_for(grid.size(), config.threads, [&](std::size_t i) {
    HeatmapCell c;
    c.coords = to_spherical(grid[i]);
    if (mode == HeatmapMode::deterministic) {
      c.risk = evaluator.risk(grid[i].values());
    } else {
      const VmfParams vmf{grid[i], kappa};
      const McRisk mc = empirical_risk_posterior_mc(evaluator, vmf, config.draws,
                                                    point_seed(config.master_seed, vmf));
      c.risk = mc.risk;
      c.mcse = mc.mcse;
    }
    cells[i] = c;
  });
  return cells;
}

DeterministicBest best_deterministic(const RiskEvaluator& evaluator,
                                     std::span<const PolicyVector> grid) {
  if (grid.empty()) throw InputError("grid is empty");
  std::size_t best = 0;
  double best_risk = evaluator.risk(grid[0].values());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double r = evaluator.risk(grid[i].values());
    if (r < best_risk || (r == best_risk && canonical_less(grid[i], grid[best]))) {
      best = i;
      best_risk = r;
    }
  }
  return {grid[best], best_risk};
}

RateBound regret_rate_bound(std::size_t n, std::size_t m, const RateBoundParams& params,
                            double epsilon) {
  if (n < 8) throw InputError("the rate bound requires n >= 8");
  if (m < 2) throw InputError("dimension must be >= 2");
  if (!(params.margin_c > 0.0)) throw InputError("margin constant c must be > 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in (0, 1)");
  const auto orders = BesselOrderConstants::for_dimension(m);
  const double e = std::numbers::e;
  const double ln8 = std::log(8.0);
  const double c_low = orders.c_low;
  RateBound out;
  out.constant = 4.0 * params.margin_c * std::sqrt(orders.nu + 1.0) + 1.0 +
                 c_low * std::log(9.0) / ln8 + std::log(2.0 * e / epsilon) +
                 std::sqrt(c_low * std::log(9.0) / (2.0 * ln8)) +
                 std::sqrt(0.5 * std::log(4.0 * e / epsilon)) +
                 std::sqrt(ln8) / (std::sqrt(2.0) * ln8);
  const double nd = static_cast<double>(n);
  out.bound = out.constant * std::log(nd) / std::sqrt(nd);
  return out;
}

}  // namespace pacwelfare
