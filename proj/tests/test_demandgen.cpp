#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "spareopt/demandgen.hpp"
#include "spareopt/error.hpp"
#include "spareopt/rng.hpp"

using namespace spareopt;
using namespace spareopt::demandgen;

namespace {

// Eleven annual totals that fall into five equal-width bins as (4,1,2,3,1).
const std::vector<double> kEleven{0, 1, 2, 3, 5, 9, 10, 12, 13, 14, 20};

}  // namespace

TEST(Histogram, ElevenObservationsFiveBins) {
  const auto h = build_histogram(kEleven, 5);
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{4, 1, 2, 3, 1}));
  const double expected[] = {4.0 / 11, 1.0 / 11, 2.0 / 11, 3.0 / 11, 1.0 / 11};
  for (std::size_t b = 0; b < 5; ++b) EXPECT_EQ(h.probabilities[b], expected[b]);
  EXPECT_EQ(h.edges.front(), 0.0);
  EXPECT_EQ(h.edges.back(), 20.0);
}

TEST(Histogram, DegenerateAndTwoPoint) {
  const std::vector<double> same{7, 7, 7};
  const auto h = build_histogram(same);
  EXPECT_EQ(h.bins(), 1u);
  EXPECT_EQ(h.probabilities[0], 1.0);
  const std::vector<double> two{0, 10};
  const auto h2 = build_histogram(two, 2);
  EXPECT_EQ(h2.counts, (std::vector<std::uint64_t>{1, 1}));
  EXPECT_EQ(h2.probabilities, (std::vector<double>{0.5, 0.5}));
}

TEST(Histogram, RightEdgeClosedAndRounding) {
  const std::vector<double> xs{0, 2.5, 4, 10};
  const auto h = build_histogram(xs, 2);
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{3, 1}));
  const std::vector<double> halves{0.5, 1.5};
  const auto hr = build_histogram(halves, 1);
  EXPECT_EQ(hr.edges, (std::vector<double>{0, 2}));
}

TEST(Histogram, Rejections) {
  const std::vector<double> empty;
  EXPECT_THROW(build_histogram(empty), InvalidInput);
  EXPECT_THROW(build_histogram(kEleven, 0), InvalidInput);
  const std::vector<double> neg{-1, 2};
  EXPECT_THROW(build_histogram(neg), InvalidInput);
}

TEST(Histogram, SturgesCappedByDistinctValues) {
  EXPECT_EQ(sturges_bins(1), 1u);
  EXPECT_EQ(sturges_bins(11), 5u);
  EXPECT_EQ(sturges_bins(16), 5u);
  EXPECT_EQ(sturges_bins(17), 6u);
  const std::vector<double> xs{1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2};
  EXPECT_EQ(build_histogram(xs).bins(), 2u);
}

TEST(Spin, SingleBinAndZeroProbability) {
  Rng rng(1);
  const std::vector<double> same{7, 7, 7};
  const auto h = build_histogram(same);
  for (int i = 0; i < 100; ++i) {
    const auto d = spin(h, rng);
    EXPECT_EQ(d.bin, 0u);
    EXPECT_EQ(d.quantity, 7);
  }
  const auto h2 = histogram_from_counts({0, 5, 10}, {3, 0});
  for (int i = 0; i < 1000; ++i) {
    const auto d = spin(h2, rng);
    EXPECT_EQ(d.bin, 0u);
    EXPECT_GE(d.quantity, 0);
    EXPECT_LE(d.quantity, 5);
  }
}

TEST(Spin, FrequenciesWithinThreeStandardErrors) {
  const auto h = build_histogram(kEleven, 5);
  Rng rng(8);
  const int n = 100000;
  std::vector<int> seen(5, 0);
  for (int i = 0; i < n; ++i) ++seen[spin(h, rng).bin];
  double chi2 = 0.0;
  for (std::size_t b = 0; b < 5; ++b) {
    const double p = h.probabilities[b];
    const double se = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(seen[b] / static_cast<double>(n), p, 3 * se);
    chi2 += std::pow(seen[b] - n * p, 2) / (n * p);
  }
  EXPECT_GT(oracle::chi2_sf_df4(chi2), 0.01);
}

TEST(Spin, QuantityWithinRoundedEdges) {
  const auto h = histogram_from_counts({0.0, 2.5, 5.0}, {1, 1});
  Rng rng(2);
  std::vector<int> hits(6, 0);
  for (int i = 0; i < 20000; ++i) {
    const auto d = spin(h, rng);
    if (d.bin == 0) {
      ASSERT_GE(d.quantity, 0);
      ASSERT_LE(d.quantity, 3);
    } else {
      ASSERT_GE(d.quantity, 2);
      ASSERT_LE(d.quantity, 5);
    }
    ++hits[static_cast<std::size_t>(d.quantity)];
  }
  for (int h2 : hits) EXPECT_GT(h2, 0);
}

TEST(Spin, DeterministicPerSeed) {
  const auto h = build_histogram(kEleven, 5);
  Rng a(77), b(77);
  for (int i = 0; i < 500; ++i) {
    const auto x = spin(h, a), y = spin(h, b);
    ASSERT_EQ(x.bin, y.bin);
    ASSERT_EQ(x.quantity, y.quantity);
  }
}

TEST(MonthlySpread, ConservationAndMarginals) {
  Rng rng(4);
  MonthlyDemandSchedule zero = monthly_spread(0, rng);
  for (auto q : zero.quantities) EXPECT_EQ(q, 0);
  std::array<double, 12> sums{};
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const auto s = monthly_spread(120, rng);
    EXPECT_EQ(std::accumulate(s.quantities.begin(), s.quantities.end(), std::int64_t{0}), 120);
    EXPECT_EQ(s.annual_total, 120);
    for (std::size_t m = 0; m < 12; ++m) sums[m] += static_cast<double>(s.quantities[m]);
  }
  for (double s : sums) EXPECT_NEAR(s / trials, 10.0, 0.5);
  EXPECT_THROW(monthly_spread(-1, rng), InvalidInput);
}

TEST(Sources, RouletteConservesAnnualDraw) {
  const RouletteDemand src(build_histogram(kEleven, 5));
  Rng rng(12);
  for (int y = 0; y < 2000; ++y) {
    const auto s = src.year(y, rng);
    ASSERT_EQ(std::accumulate(s.quantities.begin(), s.quantities.end(), std::int64_t{0}), s.annual_total);
    ASSERT_GE(s.annual_total, 0);
    ASSERT_LE(s.annual_total, 20);
  }
}

TEST(Sources, ConstantScheduledAndFitted) {
  Rng rng(1);
  const auto c = ConstantDemand(3).year(0, rng);
  EXPECT_EQ(c.annual_total, 36);
  const std::vector<std::int64_t> months{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  const auto sched = ScheduledDemand::from_months(months);
  EXPECT_EQ(sched.year(0, rng).quantities[11], 12);
  EXPECT_THROW(sched.year(1, rng), ModelError);
  const std::vector<std::int64_t> bad{1, 2};
  EXPECT_THROW(ScheduledDemand::from_months(bad), InvalidInput);

  const FittedMonthlyDemand f(distfit::make_distribution(distfit::Family::normal, {1.0, 5.0}));
  for (int y = 0; y < 200; ++y) {
    for (auto q : f.year(y, rng).quantities) ASSERT_GE(q, 0);
  }
}

TEST(Sources, ScheduleRows) {
  const std::vector<std::int64_t> months{1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2};
  Rng rng(1);
  const auto s = ScheduledDemand::from_months(months).year(0, rng);
  const std::vector<MonthlyDemandSchedule> years{s};
  const auto rows = schedule_rows("P", years);
  EXPECT_EQ(rows.substr(0, rows.find('\n')), "P,1,1,1");
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 12);
  EXPECT_NE(rows.find("P,1,12,2\n"), std::string::npos);
}
