#pragma once

// Demand synthesis from annual consumption history: histogram, roulette-wheel
// spin for the annual quantity, and a uniform spread over the twelve months.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spareopt/distfit.hpp"

namespace spareopt {
class Rng;
}

namespace spareopt::demandgen {

inline constexpr int kMonthsPerYear = 12;

struct ConsumptionHistogram {
  std::vector<double> edges;           // size = bins + 1, ascending
  std::vector<std::uint64_t> counts;   // per bin
  std::vector<double> probabilities;   // counts / total

  std::size_t bins() const { return counts.size(); }
};

/// Histogram over [min, max] with equal-width bins, the right-most bin
/// closed on both ends. Values are rounded half-to-even first. A single
/// degenerate bin when min == max.
/// num_bins = nullopt picks Sturges' rule capped at the number of distinct
/// values. Throws InvalidInput for an empty series or num_bins == 0.
ConsumptionHistogram build_histogram(std::span<const double> annual_series,
                                     std::optional<std::size_t> num_bins = std::nullopt);

/// Histogram from explicit edges and counts (counts need not be positive).
ConsumptionHistogram histogram_from_counts(std::vector<double> edges,
                                           std::vector<std::uint64_t> counts);

std::size_t sturges_bins(std::size_t n);

struct AnnualDraw {
  std::size_t bin = 0;
  std::int64_t quantity = 0;
};

/// Roulette wheel: one uniform variate picks the bin by inverse CDF, then the
/// quantity is uniform over the integers in [floor(lo edge), ceil(hi edge)].
AnnualDraw spin(const ConsumptionHistogram& h, Rng& rng);

struct MonthlyDemandSchedule {
  std::array<std::int64_t, kMonthsPerYear> quantities{};
  std::int64_t annual_total = 0;
};

/// Each of the annual units lands in a month drawn uniformly at random.
MonthlyDemandSchedule monthly_spread(std::int64_t annual_qty, Rng& rng);

// Yearly source of monthly demand for the simulator. Sources hold no
// per-run state; every draw comes from the caller's stream.
class DemandSource {
 public:
  virtual ~DemandSource() = default;
  /// Demand for simulated year `year` (0-based). Throws ModelError when the
  /// source cannot supply that year.
  virtual MonthlyDemandSchedule year(int year, Rng& rng) const = 0;
};

class RouletteDemand final : public DemandSource {
 public:
  explicit RouletteDemand(ConsumptionHistogram histogram) : histogram_(std::move(histogram)) {}
  MonthlyDemandSchedule year(int year, Rng& rng) const override;
  const ConsumptionHistogram& histogram() const { return histogram_; }

 private:
  ConsumptionHistogram histogram_;
};

// Independent monthly draws from a fitted distribution, rounded half-to-even
// and floored at zero.
class FittedMonthlyDemand final : public DemandSource {
 public:
  explicit FittedMonthlyDemand(distfit::FittedDistribution monthly);
  MonthlyDemandSchedule year(int year, Rng& rng) const override;

 private:
  distfit::FittedDistribution monthly_;
};

class ConstantDemand final : public DemandSource {
 public:
  explicit ConstantDemand(std::int64_t per_month);
  MonthlyDemandSchedule year(int year, Rng& rng) const override;

 private:
  std::int64_t per_month_;
};

// Fixed schedules, one per year; exhausted after the last one.
class ScheduledDemand final : public DemandSource {
 public:
  explicit ScheduledDemand(std::vector<MonthlyDemandSchedule> years);
  /// Splits a flat month-by-month list into years (size must be a multiple of 12).
  static ScheduledDemand from_months(std::span<const std::int64_t> months);
  MonthlyDemandSchedule year(int year, Rng& rng) const override;

 private:
  std::vector<MonthlyDemandSchedule> years_;
};

/// Rows item_id,year,month,qty (1-based year and month) for audit dumps.
std::string schedule_rows(std::string_view item_id,
                          std::span<const MonthlyDemandSchedule> years);

}  // namespace spareopt::demandgen
