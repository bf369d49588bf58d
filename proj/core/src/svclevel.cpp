#include "spareopt/svclevel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "spareopt/csv.hpp"
#include "spareopt/error.hpp"

namespace spareopt::svclevel {
namespace {

using distfit::Family;
using distfit::FittedDistribution;

constexpr double kProbabilityTolerance = 1e-9;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("service level alpha must lie in (0, 1), got " + format_number(alpha));
  }
}

double bisect_quantile(const FittedDistribution& d, double alpha) {
  const double mu = distfit::mean(d);
  const double sd = std::sqrt(distfit::variance(d));
  const bool nonnegative = d.family != Family::normal;
  double lo = nonnegative ? 0.0 : mu - sd;
  double hi = mu + sd;
  for (int i = 0; i < 200 && distfit::cdf(d, lo) > alpha; ++i) lo -= sd * std::ldexp(1.0, i);
  for (int i = 0; i < 200 && distfit::cdf(d, hi) < alpha; ++i) hi += sd * std::ldexp(1.0, i);
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (distfit::cdf(d, mid) < alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

std::int64_t poisson_quantile(const FittedDistribution& d, double alpha) {
  // Smallest k with F(k) >= alpha: bracket by doubling, then bisect.
  std::int64_t hi = 1;
  while (distfit::cdf(d, static_cast<double>(hi)) < alpha) hi *= 2;
  std::int64_t lo = -1;  // F(lo) < alpha by convention
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (distfit::cdf(d, static_cast<double>(mid)) >= alpha) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

LeadTimeDemand lead_time_demand(const FittedDistribution& demand, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidInput("lead time must be positive and finite");
  distfit::check_params(demand.family, demand.params);
  const double m = distfit::mean(demand);
  const double v = distfit::variance(demand);
  if (!std::isfinite(m) || !std::isfinite(v)) {
    throw InvalidInput("demand distribution needs finite mean and variance");
  }
  LeadTimeDemand ltd;
  ltd.mean = a * m;
  ltd.variance = a * a * v;
  if (a == 1.0) {
    ltd.matched = demand;
    return ltd;
  }
  const auto& p = demand.params;
  switch (demand.family) {
    case Family::normal:
      ltd.matched = distfit::make_distribution(Family::normal, {a * p[0], a * p[1]});
      break;
    case Family::lognormal:
      ltd.matched = distfit::make_distribution(Family::lognormal, {p[0] + std::log(a), p[1]});
      break;
    case Family::gamma:
      ltd.matched = distfit::make_distribution(Family::gamma, {p[0], a * p[1]});
      break;
    case Family::uniform:
      ltd.matched = distfit::make_distribution(Family::uniform, {a * p[0], a * p[1]});
      break;
    case Family::poisson:
    case Family::exponential:
      ltd.matched = distfit::make_distribution(Family::normal, {ltd.mean, std::sqrt(ltd.variance)});
      ltd.fallback_used = true;
      break;
  }
  return ltd;
}

double quantile(const FittedDistribution& d, double alpha) {
  check_alpha(alpha);
  distfit::check_params(d.family, d.params);
  const auto& p = d.params;
  switch (d.family) {
    case Family::exponential: return -p[0] * std::log1p(-alpha);
    case Family::uniform: return p[0] + alpha * (p[1] - p[0]);
    case Family::poisson: return static_cast<double>(poisson_quantile(d, alpha));
    case Family::normal:
    case Family::lognormal:
    case Family::gamma: return bisect_quantile(d, alpha);
  }
  return 0.0;
}

std::int64_t rop_for_alpha(const LeadTimeDemand& ltd, double alpha) {
  const double x = quantile(ltd.matched, alpha);
  if (x <= 0.0) return 0;
  auto rop = static_cast<std::int64_t>(std::ceil(x));
  // Step back only when the lower integer already meets the target within
  // tolerance (x sits on an integer up to bisection noise).
  if (rop >= 1 && distfit::cdf(ltd.matched, static_cast<double>(rop - 1)) >= alpha - kProbabilityTolerance &&
      !distfit::is_discrete(ltd.matched.family)) {
    --rop;
  }
  return rop;
}

std::vector<ServiceCurvePoint> service_curve(const CurveModels& models, const simcore::CostRates& costs,
                                             std::int64_t roq, std::span<const double> alphas,
                                             const simcore::SimConfig& config, std::size_t replications) {
  if (alphas.empty()) throw InvalidInput("service curve needs at least one alpha");
  if (roq < 1) throw InvalidInput("service curve roq must be >= 1");
  std::vector<double> sorted(alphas.begin(), alphas.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    check_alpha(sorted[i]);
    if (i > 0 && sorted[i] == sorted[i - 1]) throw InvalidInput("duplicate alpha in service curve");
  }

  const std::int64_t cap = 10 * std::max<std::int64_t>(rop_for_alpha(models.ltd, 0.99), 1);
  std::vector<ServiceCurvePoint> points;
  points.reserve(sorted.size());
  for (double alpha : sorted) {
    ServiceCurvePoint pt;
    pt.alpha = alpha;
    pt.rop = rop_for_alpha(models.ltd, alpha);
    if (pt.rop > cap) {
      pt.rop = cap;
      pt.capped = true;
    }
    // Same master seed for every alpha: common random numbers.
    const auto s = simcore::replicate({pt.rop, roq}, models.demand, models.lead_time, costs, config,
                                      replications);
    using simcore::Metric;
    pt.total_cost_mean = s.mean_of(Metric::total_cost);
    pt.total_cost_ci = s.ci_of(Metric::total_cost);
    pt.holding_mean = s.mean_of(Metric::holding_cost);
    pt.ordering_mean = s.mean_of(Metric::ordering_cost);
    pt.shortage_mean = s.mean_of(Metric::shortage_cost);
    pt.fill_rate_mean = s.mean_of(Metric::fill_rate);
    pt.cycle_service_level_mean = s.mean_of(Metric::cycle_service_level);
    points.push_back(pt);
  }
  return points;
}

std::string curve_rows(std::string_view item_id, std::span<const ServiceCurvePoint> points) {
  check_csv_identifier(item_id);
  std::string out;
  for (const auto& p : points) {
    out += csv_line({std::string(item_id), format_number(p.alpha), std::to_string(p.rop),
                     p.capped ? "1" : "0", format_number(p.total_cost_mean),
                     format_number(p.holding_mean), format_number(p.ordering_mean),
                     format_number(p.shortage_mean), format_number(p.total_cost_ci)});
  }
  return out;
}

std::string curve_svg(std::string_view title, std::span<const ServiceCurvePoint> points) {
  constexpr double kWidth = 640, kHeight = 400, kLeft = 80, kRight = 20, kTop = 40, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  if (!points.empty()) {
    x_min = points.front().alpha;
    x_max = points.back().alpha;
    y_max = 0.0;
    for (const auto& p : points) y_max = std::max(y_max, p.total_cost_mean);
    if (y_max <= 0.0) y_max = 1.0;
    if (x_max <= x_min) x_max = x_min + 1e-3;
  }
  auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double y) { return kTop + plot_h - (y - y_min) / (y_max - y_min) * plot_h; };
  auto num = [](double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return std::string(buf);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
         "viewBox=\"0 0 640 400\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">";
  for (char c : title) {
    switch (c) {
      case '<': svg += "&lt;"; break;
      case '>': svg += "&gt;"; break;
      case '&': svg += "&amp;"; break;
      default: svg += c;
    }
  }
  svg += "</text>\n";
  svg += "<line x1=\"" + num(kLeft, 1) + "\" y1=\"" + num(kTop + plot_h, 1) + "\" x2=\"" +
         num(kLeft + plot_w, 1) + "\" y2=\"" + num(kTop + plot_h, 1) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(kLeft, 1) + "\" y1=\"" + num(kTop, 1) + "\" x2=\"" + num(kLeft, 1) +
         "\" y2=\"" + num(kTop + plot_h, 1) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = y_min + (y_max - y_min) * i / 4.0;
    svg += "<text x=\"" + num(kLeft - 6, 1) + "\" y=\"" + num(sy(y) + 4, 1) +
           "\" text-anchor=\"end\">" + num(y, 1) + "</text>\n";
  }
  for (const auto& p : points) {
    svg += "<text x=\"" + num(sx(p.alpha), 1) + "\" y=\"" + num(kTop + plot_h + 16, 1) +
           "\" text-anchor=\"middle\" font-size=\"10\">" + format_number(p.alpha) + "</text>\n";
  }
  svg += "<text x=\"" + num(kLeft + plot_w / 2, 1) + "\" y=\"" + num(kHeight - 10, 1) +
         "\" text-anchor=\"middle\">service level (alpha)</text>\n";
  svg += "<text x=\"16\" y=\"" + num(kTop + plot_h / 2, 1) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num(kTop + plot_h / 2, 1) + ")\">mean total cost</text>\n";
  if (!points.empty()) {
    svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (i) svg += ' ';
      svg += num(sx(points[i].alpha), 2) + "," + num(sy(points[i].total_cost_mean), 2);
    }
    svg += "\"/>\n";
    for (const auto& p : points) {
      svg += "<circle cx=\"" + num(sx(p.alpha), 2) + "\" cy=\"" + num(sy(p.total_cost_mean), 2) +
             "\" r=\"3\" fill=\"" + (p.capped ? "firebrick" : "steelblue") + "\"/>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace spareopt::svclevel
