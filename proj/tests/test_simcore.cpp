#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "spareopt/csv.hpp"
#include "spareopt/error.hpp"
#include "spareopt/pipeline.hpp"
#include "spareopt/rng.hpp"
#include "spareopt/simcore.hpp"

using namespace spareopt;
using namespace spareopt::simcore;
using demandgen::ConstantDemand;
using demandgen::FittedMonthlyDemand;

namespace {

const std::filesystem::path kGolden = SPAREOPT_GOLDEN_DIR;

struct GoldenRun {
  SimOutcome outcome;
  std::string trace;
};

GoldenRun run_golden(const std::string& name) {
  const auto m = pipeline::load_item_model(kGolden / (name + ".json"));
  EventTrace trace;
  const auto out = simulate(m.policy, *m.demand, *m.lead_time, m.costs, m.sim, &trace);
  return {out, trace_csv(trace)};
}

void expect_invariants(const SimOutcome& o, const InventoryPolicy& p, const EventTrace& trace) {
  EXPECT_EQ(o.total_cost, o.holding_cost + o.ordering_cost + o.shortage_cost);
  EXPECT_EQ(o.units_met + o.units_short, o.units_demanded);
  const auto& l = o.ledger;
  EXPECT_EQ(l.initial_on_hand + l.delivered, l.final_on_hand + l.met);
  EXPECT_EQ(l.final_on_order, p.roq * (l.orders_placed - l.orders_delivered));
  EXPECT_GE(l.min_on_hand, 0);
  std::int64_t placed = 0, delivered = 0;
  for (const auto& e : trace) {
    ASSERT_GE(e.on_hand, 0);
    if (e.kind == EventKind::order) ++placed;
    if (e.kind == EventKind::arrival) ++delivered;
    ASSERT_EQ(e.on_order, p.roq * (placed - delivered));
  }
  if (o.units_demanded == 0) EXPECT_EQ(o.fill_rate, 1.0);
  EXPECT_GE(o.fill_rate, 0.0);
  EXPECT_LE(o.fill_rate, 1.0);
  EXPECT_GE(o.cycle_service_level, 0.0);
  EXPECT_LE(o.cycle_service_level, 1.0);
}

}  // namespace

TEST(GoldenTrace, ZeroDemand) {
  const auto r = run_golden("zero_demand");
  EXPECT_EQ(r.trace, read_text_file(kGolden / "zero_demand_trace.csv"));
  EXPECT_EQ(r.outcome.total_cost, 30.0 * 2.0);
  EXPECT_EQ(r.outcome.orders_placed, 0);
  EXPECT_EQ(r.outcome.fill_rate, 1.0);
}

TEST(GoldenTrace, DeterministicOneUnitPerMonth) {
  const auto r = run_golden("deterministic");
  EXPECT_EQ(r.trace, read_text_file(kGolden / "deterministic_trace.csv"));
  EXPECT_EQ(r.outcome.orders_placed, 1);
  EXPECT_EQ(r.outcome.holding_cost, 12.0);
  EXPECT_EQ(r.outcome.ordering_cost, 5.0);
  EXPECT_EQ(r.outcome.shortage_cost, 0.0);
  EXPECT_EQ(r.outcome.total_cost, 17.0);
  EXPECT_EQ(r.outcome.units_demanded, 12);
  EXPECT_EQ(r.outcome.fill_rate, 1.0);
}

TEST(GoldenTrace, SpikeShortage) {
  const auto r = run_golden("spike");
  EXPECT_EQ(r.trace, read_text_file(kGolden / "spike_trace.csv"));
  EXPECT_EQ(r.outcome.units_short, 10);
  EXPECT_EQ(r.outcome.shortage_cost, 10 * 100.0);
  EXPECT_EQ(r.outcome.total_cost, 1005.0);
  EXPECT_EQ(r.outcome.fill_rate, 0.0);
  EXPECT_EQ(r.outcome.cycles, 1);
  EXPECT_EQ(r.outcome.ledger.final_on_order, 10);
}

TEST(Simulate, StockoutCycleCounting) {
  // Month 1 opens two cycles that the month-2 shortage hits; month 4 opens two clean ones.
  const std::vector<std::int64_t> months{1, 5, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0};
  const auto demand = demandgen::ScheduledDemand::from_months(months);
  const ConstantLeadTime lead(2);
  SimConfig cfg;
  cfg.initial_on_hand = 1;
  const auto o = simulate({1, 1}, demand, lead, {0, 0, 1}, cfg);
  EXPECT_EQ(o.units_short, 5);
  EXPECT_EQ(o.cycles, 4);
  EXPECT_EQ(o.stockout_cycles, 2);
  EXPECT_EQ(o.cycle_service_level, 0.5);
}

TEST(Simulate, MultipleOrdersInOneMonth) {
  const std::vector<std::int64_t> months{30, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  const auto demand = demandgen::ScheduledDemand::from_months(months);
  const ConstantLeadTime lead(1);
  SimConfig cfg;
  cfg.initial_on_hand = 10;
  EventTrace trace;
  const auto o = simulate({5, 4}, demand, lead, {1, 2, 3}, cfg, &trace);
  EXPECT_EQ(o.orders_placed, 2);
  EXPECT_EQ(o.ledger.delivered, 8);
  expect_invariants(o, {5, 4}, trace);
}

TEST(Simulate, WarmupExcludedFromStatistics) {
  const ConstantDemand demand(1);
  const ConstantLeadTime lead(0);
  SimConfig cfg;
  cfg.horizon_years = 2;
  cfg.warmup_years = 1;
  cfg.initial_on_hand = 12;
  EventTrace trace;
  const auto o = simulate({0, 12}, demand, lead, {1, 5, 100}, cfg, &trace);
  EXPECT_EQ(o.units_demanded, 12);
  EXPECT_EQ(o.orders_placed, 1);
  EXPECT_EQ(o.total_cost, 17.0);
  EXPECT_EQ(o.ledger.orders_placed, 2);
  for (const auto& e : trace) {
    if (e.t_month <= 12) EXPECT_EQ(e.cost_delta, 0.0);
  }
  expect_invariants(o, {0, 12}, trace);
}

TEST(Simulate, TimeAverageHolding) {
  const ConstantDemand demand(1);
  const ConstantLeadTime lead(0);
  SimConfig cfg;
  cfg.initial_on_hand = 12;
  cfg.holding_mode = HoldingMode::time_average;
  const auto o = simulate({0, 12}, demand, lead, {12, 0, 0}, cfg);
  // Month-end on-hand 11, 10, ..., 1, 12.
  EXPECT_NEAR(o.holding_cost, 66.0 + 12.0, 1e-12);
  EXPECT_NEAR(o.avg_on_hand, 78.0 / 12.0, 1e-12);
}

TEST(Simulate, InitialOnHandDefaultsToRopPlusRoq) {
  const ConstantDemand demand(0);
  const ConstantLeadTime lead(1);
  const auto o = simulate({3, 4}, demand, lead, {1, 0, 0}, {});
  EXPECT_EQ(o.ledger.initial_on_hand, 7);
  EXPECT_EQ(o.holding_cost, 7.0);
}

TEST(Simulate, Rejections) {
  const ConstantDemand demand(1);
  const ConstantLeadTime lead(1);
  EXPECT_THROW(simulate({0, 0}, demand, lead, {1, 1, 1}, {}), InvalidInput);
  EXPECT_THROW(simulate({-1, 1}, demand, lead, {1, 1, 1}, {}), InvalidInput);
  EXPECT_THROW(simulate({0, 1}, demand, lead, {-1, 1, 1}, {}), InvalidInput);
  SimConfig bad;
  bad.horizon_years = 0;
  EXPECT_THROW(simulate({0, 1}, demand, lead, {1, 1, 1}, bad), InvalidInput);
  const std::vector<std::int64_t> months(12, 1);
  const auto sched = demandgen::ScheduledDemand::from_months(months);
  SimConfig two;
  two.horizon_years = 2;
  EXPECT_THROW(simulate({0, 1}, sched, lead, {1, 1, 1}, two), ModelError);
  const FittedLeadTime negative(distfit::make_distribution(distfit::Family::normal, {-5.0, 0.1}));
  EXPECT_THROW(simulate({0, 1}, demand, negative, {1, 1, 1}, {}), ModelError);
  EXPECT_THROW(ConstantLeadTime(-1), InvalidInput);
}

TEST(LeadTime, Models) {
  Rng rng(3);
  const EmpiricalLeadTime e({1.0, 2.5, 4.0});
  EXPECT_NEAR(e.mean_months(), (1.0 + 3.0 + 4.0) / 3.0, 1e-15);
  for (int i = 0; i < 100; ++i) {
    const auto v = e.sample_months(rng);
    EXPECT_TRUE(v == 1 || v == 3 || v == 4);
  }
  const FittedLeadTime f(distfit::make_distribution(distfit::Family::uniform, {1.0, 3.0}));
  EXPECT_EQ(f.mean_months(), 2.0);
  for (int i = 0; i < 100; ++i) {
    const auto v = f.sample_months(rng);
    EXPECT_GE(v, 1);
    EXPECT_LE(v, 3);
  }
  EXPECT_THROW(EmpiricalLeadTime({}), InvalidInput);
}

TEST(Simulate, RandomizedPropertiesAndDeterminism) {
  Rng meta(555);
  const auto hist = demandgen::build_histogram(std::vector<double>{10, 40, 25, 60, 5, 33, 18}, 3);
  const demandgen::RouletteDemand roulette(hist);
  const EmpiricalLeadTime lead({0, 1, 2, 3, 5});
  for (int trial = 0; trial < 200; ++trial) {
    const InventoryPolicy p{meta.uniform_int(0, 30), meta.uniform_int(1, 40)};
    const CostRates c{meta.uniform(0, 5), meta.uniform(0, 50), meta.uniform(0, 100)};
    SimConfig cfg;
    cfg.horizon_years = static_cast<int>(meta.uniform_int(1, 6));
    cfg.warmup_years = static_cast<int>(meta.uniform_int(0, cfg.horizon_years - 1));
    cfg.seed = meta.next_u64();
    if (meta.uniform01() < 0.5) cfg.initial_on_hand = meta.uniform_int(0, 50);
    EventTrace t1, t2;
    const auto a = simulate(p, roulette, lead, c, cfg, &t1);
    const auto b = simulate(p, roulette, lead, c, cfg, &t2);
    expect_invariants(a, p, t1);
    ASSERT_EQ(trace_csv(t1), trace_csv(t2));
    ASSERT_EQ(a.total_cost, b.total_cost);
  }
}

TEST(Simulate, DemandPathIndependentOfPolicy) {
  const demandgen::RouletteDemand roulette(demandgen::build_histogram(std::vector<double>{10, 40, 25, 60}, 2));
  const ConstantLeadTime lead(1);
  SimConfig cfg;
  cfg.horizon_years = 4;
  cfg.seed = 99;
  const auto a = simulate({0, 5}, roulette, lead, {1, 1, 1}, cfg);
  const auto b = simulate({30, 50}, roulette, lead, {1, 1, 1}, cfg);
  EXPECT_EQ(a.units_demanded, b.units_demanded);
}

TEST(Simulate, HigherRopHoldsMoreAndShortsLess) {
  const FittedMonthlyDemand demand(distfit::make_distribution(distfit::Family::poisson, {6.0}));
  const ConstantLeadTime lead(2);
  SimConfig cfg;
  cfg.horizon_years = 5;
  cfg.seed = 1234;
  cfg.initial_on_hand = 20;
  const auto low = replicate({0, 20}, demand, lead, {1, 10, 20}, cfg, 40);
  const auto high = replicate({30, 20}, demand, lead, {1, 10, 20}, cfg, 40);
  EXPECT_GT(high.mean_of(Metric::holding_cost), low.mean_of(Metric::holding_cost));
  EXPECT_LT(high.mean_of(Metric::shortage_cost), low.mean_of(Metric::shortage_cost));
  EXPECT_EQ(high.mean_of(Metric::units_demanded), low.mean_of(Metric::units_demanded));
}

TEST(ServiceLevels, Arithmetic) {
  const auto a = measured_service_levels(0, 0, 0, 0);
  EXPECT_EQ(a.fill_rate, 1.0);
  EXPECT_EQ(a.cycle_service_level, 1.0);
  const auto b = measured_service_levels(50, 50, 5, 0);
  EXPECT_EQ(b.fill_rate, 1.0);
  EXPECT_EQ(b.cycle_service_level, 1.0);
  const auto c = measured_service_levels(100, 90, 4, 1);
  EXPECT_EQ(c.fill_rate, 0.9);
  EXPECT_EQ(c.cycle_service_level, 0.75);
}

TEST(Replicate, SingleRunHasUndefinedInterval) {
  const ConstantDemand demand(2);
  const ConstantLeadTime lead(1);
  SimConfig cfg;
  cfg.seed = 5;
  std::vector<SimOutcome> runs;
  const auto s = replicate({3, 10}, demand, lead, {1, 2, 3}, cfg, 1, &runs);
  EXPECT_FALSE(s.ci_defined);
  EXPECT_EQ(s.ci_halfwidth[0], 0.0);
  EXPECT_EQ(s.mean[0], runs[0].total_cost);
  EXPECT_THROW(replicate({3, 10}, demand, lead, {1, 2, 3}, cfg, 0), InvalidInput);
}

TEST(Replicate, DeterministicModelHasZeroVariance) {
  const ConstantDemand demand(2);
  const ConstantLeadTime lead(1);
  const auto s = replicate({3, 10}, demand, lead, {1, 2, 3}, {}, 10);
  EXPECT_TRUE(s.ci_defined);
  for (std::size_t k = 0; k < kMetricCount; ++k) {
    EXPECT_EQ(s.stddev[k], 0.0);
    EXPECT_EQ(s.ci_halfwidth[k], 0.0);
  }
}

TEST(Replicate, StochasticReplayIdentical) {
  const demandgen::RouletteDemand roulette(demandgen::build_histogram(std::vector<double>{3, 9, 14, 2, 7}, 3));
  const EmpiricalLeadTime lead({1, 2});
  SimConfig cfg;
  cfg.seed = 2718;
  cfg.horizon_years = 3;
  std::vector<SimOutcome> runs;
  const auto a = replicate({4, 6}, roulette, lead, {1, 5, 9}, cfg, 25, &runs);
  const auto b = replicate({4, 6}, roulette, lead, {1, 5, 9}, cfg, 25);
  EXPECT_EQ(outcome_row("x", {4, 6}, a), outcome_row("x", {4, 6}, b));
  SimConfig first = cfg;
  first.seed = replication_seed(cfg.seed, 3);
  EXPECT_EQ(simulate({4, 6}, roulette, lead, {1, 5, 9}, first).total_cost, runs[3].total_cost);
  const auto direct = summarize(runs);
  EXPECT_EQ(direct.mean, a.mean);
  EXPECT_NE(a.stddev[0], 0.0);
  EXPECT_NEAR(a.ci_halfwidth[0], t_critical_95(24) * a.stddev[0] / 5.0, 1e-9);
}

TEST(Replicate, StudentTCriticalValues) {
  EXPECT_NEAR(t_critical_95(1), 12.706204736432095, 1e-9);
  EXPECT_NEAR(t_critical_95(9), 2.2621571628540993, 1e-9);
  EXPECT_NEAR(t_critical_95(199), 1.971956544249395, 1e-9);
}
