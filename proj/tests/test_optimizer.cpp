#include <gtest/gtest.h>

#include <cmath>

#include "spareopt/demandgen.hpp"
#include "spareopt/error.hpp"
#include "spareopt/optimizer.hpp"
#include "spareopt/rng.hpp"

using namespace spareopt;
using namespace spareopt::optimizer;

namespace {

Estimate convex(const InventoryPolicy& p, std::size_t, std::uint64_t) {
  const double dr = static_cast<double>(p.rop - 7), dq = static_cast<double>(p.roq - 5);
  return {dr * dr + dq * dq + 10.0, 0.0};
}

// Noisy cost whose noise depends only on (policy, reps, seed).
Estimate noisy(const InventoryPolicy& p, std::size_t reps, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "noise", static_cast<std::uint64_t>(p.rop * 1000 + p.roq)));
  double s = 0.0;
  for (std::size_t i = 0; i < reps; ++i) s += rng.standard_normal();
  const double dr = static_cast<double>(p.rop) - 2.3, dq = static_cast<double>(p.roq) - 3.6;
  return {dr * dr + 0.5 * dq * dq + 3.0 * s / static_cast<double>(reps), 0.1};
}

}  // namespace

TEST(Optimize, SinglePointSpace) {
  const SearchSpace space{{4, 4}, {9, 9}};
  const auto r = optimize(space, convex, {});
  EXPECT_EQ(r.best, (InventoryPolicy{4, 9}));
  EXPECT_EQ(r.evaluation_count, 2u);
  const auto e = exhaustive(space, convex, 5, 0);
  EXPECT_EQ(e.best, (InventoryPolicy{4, 9}));
  EXPECT_EQ(e.evaluation_count, 1u);
}

TEST(Optimize, ConvexToy) {
  const SearchSpace space{{0, 20}, {1, 20}};
  const auto r = optimize(space, convex, {});
  EXPECT_EQ(r.best, (InventoryPolicy{7, 5}));
  EXPECT_EQ(r.best_cost_mean, 10.0);
  const auto e = exhaustive(space, convex, 1, 0);
  EXPECT_EQ(e.best, (InventoryPolicy{7, 5}));
  EXPECT_EQ(e.evaluation_count, 420u);
}

TEST(Optimize, StochasticSmallCaseMatchesExhaustive) {
  const SearchSpace space{{0, 4}, {1, 5}};
  const OptimizerConfig cfg{50, 50, std::nullopt, 31337};
  const auto a = optimize(space, noisy, cfg);
  const auto b = optimize(space, noisy, cfg);
  EXPECT_EQ(evaluation_log_csv(a), evaluation_log_csv(b));
  const auto e = exhaustive(space, noisy, 50, 31337);
  EXPECT_EQ(a.best, e.best);
  EXPECT_EQ(a.best_cost_mean, e.best_cost_mean);
}

TEST(Optimize, CommonRandomNumbersAndAudit) {
  const SearchSpace space{{0, 30}, {1, 25}};
  const OptimizerConfig cfg{20, 100, std::nullopt, 77};
  const auto r = optimize(space, noisy, cfg);
  bool best_logged = false;
  for (const auto& e : r.evaluations) {
    EXPECT_EQ(e.seed, 77u);
    EXPECT_TRUE(space.contains(e.policy));
    EXPECT_EQ(noisy(e.policy, e.reps, e.seed).mean_cost, e.mean_cost);
    if (e.policy == r.best && e.reps == cfg.refine_reps) best_logged = true;
    if (e.reps == cfg.refine_reps) EXPECT_LE(r.best_cost_mean, e.mean_cost + 0.0);
  }
  EXPECT_TRUE(best_logged);
  EXPECT_EQ(r.evaluation_count, r.evaluations.size());
}

TEST(Optimize, StaysInsideSpace) {
  const SearchSpace space{{3, 9}, {2, 6}};
  const Evaluator guarded = [&](const InventoryPolicy& p, std::size_t, std::uint64_t) {
    if (!space.contains(p)) throw std::logic_error("outside");
    return Estimate{static_cast<double>(-p.rop - p.roq), 0.0};
  };
  const auto r = optimize(space, guarded, {});
  EXPECT_EQ(r.best, (InventoryPolicy{9, 6}));
}

TEST(Optimize, TiesGoToSmallerPolicy) {
  const Evaluator flat = [](const InventoryPolicy&, std::size_t, std::uint64_t) { return Estimate{1.0, 0.0}; };
  const SearchSpace space{{2, 6}, {3, 8}};
  EXPECT_EQ(exhaustive(space, flat, 1, 0).best, (InventoryPolicy{2, 3}));
  EXPECT_EQ(optimize(space, flat, {}).best, (InventoryPolicy{2, 3}));
  const Evaluator two = [](const InventoryPolicy& p, std::size_t, std::uint64_t) {
    return Estimate{(p == InventoryPolicy{4, 4} || p == InventoryPolicy{3, 7}) ? 0.0 : 1.0, 0.0};
  };
  EXPECT_EQ(exhaustive(space, two, 1, 0).best, (InventoryPolicy{3, 7}));
}

TEST(Optimize, EvaluationFailureCarriesPolicy) {
  const Evaluator failing = [](const InventoryPolicy& p, std::size_t, std::uint64_t) -> Estimate {
    if (p.rop == 2) throw ModelError("boom");
    return {1.0, 0.0};
  };
  try {
    optimize({{0, 5}, {1, 1}}, failing, {});
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.policy(), (InventoryPolicy{2, 1}));
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
  }
}

TEST(Optimize, Rejections) {
  EXPECT_THROW(optimize({{5, 4}, {1, 2}}, convex, {}), InvalidInput);
  EXPECT_THROW(optimize({{-1, 4}, {1, 2}}, convex, {}), InvalidInput);
  EXPECT_THROW(optimize({{0, 4}, {0, 2}}, convex, {}), InvalidInput);
  EXPECT_THROW(optimize({{0, 4}, {1, 2}}, convex, {0, 1, std::nullopt, 0}), InvalidInput);
  EXPECT_THROW(optimize({{0, 4}, {1, 2}}, convex, {1, 1, 0, 0}), InvalidInput);
  EXPECT_THROW(exhaustive({{0, 200}, {1, 100}}, convex, 1, 0), InvalidInput);
  EXPECT_NO_THROW(exhaustive({{0, 200}, {1, 100}}, convex, 1, 0, 20100));
}

TEST(Optimize, DefaultGridStride) {
  std::vector<InventoryPolicy> screened;
  const Evaluator rec = [&](const InventoryPolicy& p, std::size_t reps, std::uint64_t) {
    if (reps == 3) screened.push_back(p);
    return Estimate{0.0, 0.0};
  };
  optimize({{0, 100}, {1, 21}}, rec, {3, 4, std::nullopt, 0});
  EXPECT_EQ(screened.size(), 11u * 11u);
  EXPECT_EQ(screened[1], (InventoryPolicy{0, 3}));
  EXPECT_EQ(screened[11], (InventoryPolicy{10, 1}));
}

TEST(Optimize, SimulationEvaluatorIsPure) {
  const demandgen::RouletteDemand demand(demandgen::build_histogram(std::vector<double>{30, 50, 20, 44}, 2));
  const simcore::ConstantLeadTime lead(1);
  simcore::SimConfig base;
  base.horizon_years = 3;
  const auto ev = simulation_evaluator(demand, lead, {1, 20, 15}, base);
  const auto a = ev({4, 10}, 12, 9), b = ev({4, 10}, 12, 9), c = ev({4, 10}, 12, 10);
  EXPECT_EQ(a.mean_cost, b.mean_cost);
  EXPECT_NE(a.mean_cost, c.mean_cost);
  EXPECT_GT(a.ci_halfwidth, 0.0);
}

TEST(Optimize, LogCsv) {
  const auto r = exhaustive({{1, 1}, {2, 2}}, convex, 3, 0);
  EXPECT_EQ(evaluation_log_csv(r), "rop,roq,phase,reps,mean_cost,ci_halfwidth\n1,2,exhaustive,3,55,0\n");
}
