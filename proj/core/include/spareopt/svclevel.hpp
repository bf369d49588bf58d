#pragma once

// Analytic reorder points from lead-time demand quantiles and the simulated
// service-level versus cost curve.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spareopt/demandgen.hpp"
#include "spareopt/distfit.hpp"
#include "spareopt/simcore.hpp"

namespace spareopt::svclevel {

inline constexpr double kDefaultAlphas[] = {0.50, 0.70, 0.80, 0.90, 0.95, 0.98, 0.99, 0.9999};

struct LeadTimeDemand {
  double mean = 0.0;
  double variance = 0.0;
  distfit::FittedDistribution matched;
  bool fallback_used = false;
};

/// Scales per-period demand X by the lead time a: mean a E[X], variance
/// a^2 Var[X]. Two-parameter families keep their family; poisson and
/// exponential fall back to a normal with those moments. a == 1 returns the
/// input unchanged. Throws InvalidInput for a <= 0 or non-finite moments.
LeadTimeDemand lead_time_demand(const distfit::FittedDistribution& demand, double a);

/// Unrounded alpha-quantile. Closed form for exponential and uniform,
/// bisection on the CDF (to 1e-9 in probability) otherwise; the smallest
/// integer with F(x) >= alpha for poisson. Throws for alpha outside (0, 1).
double quantile(const distfit::FittedDistribution& d, double alpha);

/// Smallest nonnegative integer x >= quantile (within 1e-9 in probability)
/// with F(x) >= alpha. Never rounds down past the target.
std::int64_t rop_for_alpha(const LeadTimeDemand& ltd, double alpha);

struct ServiceCurvePoint {
  double alpha = 0.0;
  std::int64_t rop = 0;
  bool capped = false;
  double total_cost_mean = 0.0;
  double total_cost_ci = 0.0;
  double holding_mean = 0.0;
  double ordering_mean = 0.0;
  double shortage_mean = 0.0;
  double fill_rate_mean = 0.0;
  double cycle_service_level_mean = 0.0;
};

struct CurveModels {
  const demandgen::DemandSource& demand;
  const simcore::LeadTimeModel& lead_time;
  LeadTimeDemand ltd;
};

/// For each alpha (sorted ascending, duplicates rejected) sets rop from the
/// quantile, capped at 10 x max(rop(0.99), 1), and estimates cost by
/// replicated simulation at (rop, roq) with the same seeds for every alpha.
std::vector<ServiceCurvePoint> service_curve(const CurveModels& models,
                                             const simcore::CostRates& costs, std::int64_t roq,
                                             std::span<const double> alphas,
                                             const simcore::SimConfig& config,
                                             std::size_t replications);

inline constexpr std::string_view kCurveHeader =
    "item_id,alpha,rop,capped,total_cost_mean,holding,ordering,shortage,ci_halfwidth\n";
std::string curve_rows(std::string_view item_id, std::span<const ServiceCurvePoint> points);

/// Static SVG line chart of mean total cost against alpha.
std::string curve_svg(std::string_view title, std::span<const ServiceCurvePoint> points);

}  // namespace spareopt::svclevel
