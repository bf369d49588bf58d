#include <benchmark/benchmark.h>

#include <vector>

#include "spareopt/ahp.hpp"
#include "spareopt/demandgen.hpp"
#include "spareopt/distfit.hpp"
#include "spareopt/optimizer.hpp"
#include "spareopt/pipeline.hpp"
#include "spareopt/rng.hpp"
#include "spareopt/simcore.hpp"
#include "spareopt/svclevel.hpp"

using namespace spareopt;

static void BM_AhpEigenvector(benchmark::State& state) {
  const auto doc = ahp::parse_criteria_json(pipeline::default_criteria_json());
  for (auto _ : state) benchmark::DoNotOptimize(ahp::compute_weights(doc.matrix));
}
BENCHMARK(BM_AhpEigenvector);

static void BM_SelectBest(benchmark::State& state) {
  Rng rng(1);
  const auto dist = distfit::make_distribution(distfit::Family::gamma, {2.0, 3.0});
  std::vector<double> xs(static_cast<std::size_t>(state.range(0)));
  for (auto& x : xs) x = distfit::sample(dist, rng);
  for (auto _ : state) benchmark::DoNotOptimize(distfit::select_best(xs));
}
BENCHMARK(BM_SelectBest)->Arg(12)->Arg(108)->Arg(1000);

static void BM_SimulateTenYears(benchmark::State& state) {
  const demandgen::FittedMonthlyDemand demand(distfit::make_distribution(distfit::Family::poisson, {8.0}));
  const simcore::ConstantLeadTime lead(2);
  simcore::SimConfig cfg;
  cfg.horizon_years = 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simcore::simulate({20, 40}, demand, lead, {2, 50, 20}, cfg));
    ++cfg.seed;
  }
}
BENCHMARK(BM_SimulateTenYears);

static void BM_OptimizeRoulette(benchmark::State& state) {
  const demandgen::RouletteDemand demand(demandgen::build_histogram(std::vector<double>{60, 95, 80, 120, 70}));
  const simcore::ConstantLeadTime lead(2);
  simcore::SimConfig base;
  base.horizon_years = 5;
  const auto ev = optimizer::simulation_evaluator(demand, lead, {2, 50, 20}, base);
  for (auto _ : state) benchmark::DoNotOptimize(optimizer::optimize({{0, 60}, {1, 200}}, ev, {20, 100, std::nullopt, 7}));
}
BENCHMARK(BM_OptimizeRoulette)->Unit(benchmark::kMillisecond);

static void BM_RopForAlpha(benchmark::State& state) {
  const auto ltd = svclevel::lead_time_demand(distfit::make_distribution(distfit::Family::gamma, {2.0, 3.0}), 2.5);
  for (auto _ : state) benchmark::DoNotOptimize(svclevel::rop_for_alpha(ltd, 0.99));
}
BENCHMARK(BM_RopForAlpha);
BENCHMARK_MAIN();
