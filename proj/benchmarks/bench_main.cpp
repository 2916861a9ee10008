#include <benchmark/benchmark.h>

#include <random>
#include <sstream>
#include <vector>

#include "pacwelfare/dgp.hpp"
#include "pacwelfare/fit.hpp"
#include "pacwelfare/io.hpp"
#include "pacwelfare/vmf.hpp"
#include "pacwelfare/welfare.hpp"

namespace {

using namespace pacwelfare;

// Weighted sample shaped like the training-programme data.
const std::vector<WeightedObservation>& workload(std::size_t n) {
  static std::vector<std::vector<WeightedObservation>> cache(2);
  auto& ws = cache[n > 1000 ? 1 : 0];
  if (ws.empty()) {
    auto c = experiment_preset(1).config;
    c.n = n;
    auto g = generate(c, 1);
    for (auto& r : g.rows) r.propensity = c.assignment_prob;
    std::ostringstream csv;
    write_dataset(csv, g.rows, {"earnings", "education"});
    const auto ds = parse_dataset(csv.str(), {});
    ws = compute_weights(ds.rows, ds.meta).rows;
  }
  return ws;
}

void BM_RiskEvaluator(benchmark::State& state) {
  const auto& ws = workload(static_cast<std::size_t>(state.range(0)));
  const RiskEvaluator ev(ws);
  const auto grid = build_grid(3, 256).points;
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ev.risk(grid[i++ % grid.size()].values()));
}
BENCHMARK(BM_RiskEvaluator)->Arg(500)->Arg(9223);

void BM_RiskDirectSum(benchmark::State& state) {
  const auto& ws = workload(static_cast<std::size_t>(state.range(0)));
  const auto grid = build_grid(3, 256).points;
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(empirical_risk_det(ws, grid[i++ % grid.size()]));
}
BENCHMARK(BM_RiskDirectSum)->Arg(500)->Arg(9223);

void BM_VmfDraw(benchmark::State& state) {
  const VmfParams v{normalize_to_sphere(std::vector<double>{0.8, 0.5, 0.1}),
                    static_cast<double>(state.range(0))};
  const VmfSampler sampler(v);
  Engine rng = make_engine(3);
  std::vector<double> out(3);
  for (auto _ : state) {
    sampler.draw(rng, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_VmfDraw)->Arg(0)->Arg(2)->Arg(1000);

void BM_BesselRatio(benchmark::State& state) {
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  double k = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_ratio(m, k));
    k = k > 500.0 ? 0.5 : k * 1.3;
  }
}
BENCHMARK(BM_BesselRatio)->Arg(3)->Arg(10);

void BM_Objective(benchmark::State& state) {
  const auto& ws = workload(9223);
  const RiskEvaluator ev(ws);
  const VmfParams v{normalize_to_sphere(std::vector<double>{0.8, 0.5, 0.1}), 1.85};
  const BoundInputs b{ws.size(), 0.05};
  const auto draws = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_objective(ev, v, b, draws, 7).objective);
}
BENCHMARK(BM_Objective)->Arg(100)->Arg(1000);

}  // namespace
BENCHMARK_MAIN();
