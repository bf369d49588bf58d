#include "spareopt/demandgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "spareopt/csv.hpp"
#include "spareopt/error.hpp"
#include "spareopt/rng.hpp"

namespace spareopt::demandgen {
namespace {

void fill_probabilities(ConsumptionHistogram& h) {
  const std::uint64_t total = std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0});
  if (total == 0) throw InvalidInput("histogram has no observations");
  h.probabilities.resize(h.counts.size());
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    h.probabilities[b] = static_cast<double>(h.counts[b]) / static_cast<double>(total);
  }
}

}  // namespace

std::size_t sturges_bins(std::size_t n) {
  if (n <= 1) return 1;
  return static_cast<std::size_t>(std::ceil(1.0 + std::log2(static_cast<double>(n))));
}

ConsumptionHistogram build_histogram(std::span<const double> annual_series,
                                     std::optional<std::size_t> num_bins) {
  if (annual_series.empty()) throw InvalidInput("build_histogram: empty series");
  if (num_bins && *num_bins == 0) throw InvalidInput("build_histogram: num_bins must be positive");

  std::vector<double> values;
  values.reserve(annual_series.size());
  for (double x : annual_series) {
    if (!std::isfinite(x) || x < 0.0) {
      throw InvalidInput("build_histogram: observations must be finite and nonnegative");
    }
    values.push_back(std::nearbyint(x));  // default rounding mode: half to even
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  ConsumptionHistogram h;
  if (lo == hi) {
    h.edges = {lo, hi};
    h.counts = {values.size()};
    fill_probabilities(h);
    return h;
  }

  std::size_t bins = num_bins.value_or(0);
  if (!num_bins) {
    const std::size_t distinct = std::set<double>(values.begin(), values.end()).size();
    bins = std::min(sturges_bins(values.size()), distinct);
  }
  const double range = hi - lo;
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k < bins; ++k) {
    h.edges[k] = lo + range * static_cast<double>(k) / static_cast<double>(bins);
  }
  h.edges[bins] = hi;
  h.counts.assign(bins, 0);
  for (double x : values) {
    auto b = static_cast<std::size_t>(std::floor((x - lo) * static_cast<double>(bins) / range));
    h.counts[std::min(b, bins - 1)] += 1;
  }
  fill_probabilities(h);
  return h;
}

ConsumptionHistogram histogram_from_counts(std::vector<double> edges,
                                           std::vector<std::uint64_t> counts) {
  if (counts.empty() || edges.size() != counts.size() + 1) {
    throw InvalidInput("histogram needs bins + 1 edges");
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!std::isfinite(edges[i]) || edges[i] < 0.0 || (i > 0 && edges[i] < edges[i - 1])) {
      throw InvalidInput("histogram edges must be finite, nonnegative, and ascending");
    }
  }
  ConsumptionHistogram h;
  h.edges = std::move(edges);
  h.counts = std::move(counts);
  fill_probabilities(h);
  return h;
}

AnnualDraw spin(const ConsumptionHistogram& h, Rng& rng) {
  const double u = rng.uniform01();
  std::size_t chosen = h.bins();
  double cumulative = 0.0;
  for (std::size_t b = 0; b < h.bins(); ++b) {
    if (h.probabilities[b] <= 0.0) continue;
    cumulative += h.probabilities[b];
    chosen = b;
    if (u < cumulative) break;
  }
  if (chosen == h.bins()) throw InvalidInput("spin: histogram has no mass");
  const auto lo = static_cast<std::int64_t>(std::floor(h.edges[chosen]));
  const auto hi = static_cast<std::int64_t>(std::ceil(h.edges[chosen + 1]));
  return {chosen, rng.uniform_int(lo, hi)};
}

MonthlyDemandSchedule monthly_spread(std::int64_t annual_qty, Rng& rng) {
  if (annual_qty < 0) throw InvalidInput("monthly_spread: negative annual quantity");
  MonthlyDemandSchedule s;
  s.annual_total = annual_qty;
  for (std::int64_t unit = 0; unit < annual_qty; ++unit) {
    s.quantities[static_cast<std::size_t>(rng.uniform_int(0, kMonthsPerYear - 1))] += 1;
  }
  return s;
}

MonthlyDemandSchedule RouletteDemand::year(int, Rng& rng) const {
  const auto draw = spin(histogram_, rng);
  return monthly_spread(draw.quantity, rng);
}

FittedMonthlyDemand::FittedMonthlyDemand(distfit::FittedDistribution monthly)
    : monthly_(std::move(monthly)) {
  distfit::check_params(monthly_.family, monthly_.params);
}

MonthlyDemandSchedule FittedMonthlyDemand::year(int, Rng& rng) const {
  MonthlyDemandSchedule s;
  for (auto& q : s.quantities) {
    q = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::nearbyint(distfit::sample(monthly_, rng))));
    s.annual_total += q;
  }
  return s;
}

ConstantDemand::ConstantDemand(std::int64_t per_month) : per_month_(per_month) {
  if (per_month < 0) throw InvalidInput("constant demand must be nonnegative");
}

MonthlyDemandSchedule ConstantDemand::year(int, Rng&) const {
  MonthlyDemandSchedule s;
  s.quantities.fill(per_month_);
  s.annual_total = per_month_ * kMonthsPerYear;
  return s;
}

ScheduledDemand::ScheduledDemand(std::vector<MonthlyDemandSchedule> years) : years_(std::move(years)) {
  for (const auto& y : years_) {
    std::int64_t sum = 0;
    for (auto q : y.quantities) {
      if (q < 0) throw InvalidInput("scheduled demand must be nonnegative");
      sum += q;
    }
    if (sum != y.annual_total) throw InvalidInput("scheduled demand total does not match its months");
  }
}

ScheduledDemand ScheduledDemand::from_months(std::span<const std::int64_t> months) {
  if (months.size() % kMonthsPerYear != 0) {
    throw InvalidInput("schedule length must be a multiple of 12 months");
  }
  std::vector<MonthlyDemandSchedule> years(months.size() / kMonthsPerYear);
  for (std::size_t i = 0; i < months.size(); ++i) {
    auto& y = years[i / kMonthsPerYear];
    y.quantities[i % kMonthsPerYear] = months[i];
    y.annual_total += months[i];
  }
  return ScheduledDemand(std::move(years));
}

MonthlyDemandSchedule ScheduledDemand::year(int year, Rng&) const {
  if (year < 0 || static_cast<std::size_t>(year) >= years_.size()) {
    throw ModelError("demand schedule exhausted: no data for year " + std::to_string(year + 1));
  }
  return years_[static_cast<std::size_t>(year)];
}

std::string schedule_rows(std::string_view item_id, std::span<const MonthlyDemandSchedule> years) {
  check_csv_identifier(item_id);
  std::string out;
  for (std::size_t y = 0; y < years.size(); ++y) {
    for (int m = 0; m < kMonthsPerYear; ++m) {
      out += csv_line({std::string(item_id), std::to_string(y + 1), std::to_string(m + 1),
                       std::to_string(years[y].quantities[static_cast<std::size_t>(m)])});
    }
  }
  return out;
}

}  // namespace spareopt::demandgen
