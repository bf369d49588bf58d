#include "spareopt/distfit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "spareopt/csv.hpp"
#include "spareopt/error.hpp"
#include "spareopt/rng.hpp"

namespace spareopt::distfit {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // ln(sqrt(2 pi))

double sample_mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Population (n-denominator) variance, two-pass.
double mle_variance(std::span<const double> xs, double mu) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return ss / static_cast<double>(xs.size());
}

bool has_spread(std::span<const double> xs) {
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return *hi > *lo;
}

void check_series(std::span<const double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x) || x < 0.0) {
      throw InvalidInput("observations must be finite and nonnegative");
    }
  }
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double fit_gamma_shape(double s, const GammaSolverOptions& options) {
  // Closed-form starting point, then Newton on ln k - digamma(k) = s.
  double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  for (int it = 0; it < options.max_iterations; ++it) {
    const double f = std::log(k) - boost::math::digamma(k) - s;
    const double df = 1.0 / k - boost::math::trigamma(k);
    double next = k - f / df;
    if (!(next > 0.0)) next = k / 2.0;
    const double change = std::abs(next - k);
    k = next;
    if (change <= options.tolerance * std::max(1.0, k)) return k;
  }
  throw NonConvergence("gamma shape Newton iteration did not converge in " +
                       std::to_string(options.max_iterations) + " iterations");
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::poisson: return "poisson";
    case Family::exponential: return "exponential";
    case Family::normal: return "normal";
    case Family::lognormal: return "lognormal";
    case Family::gamma: return "gamma";
    case Family::uniform: return "uniform";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (auto f : kAllFamilies) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown distribution family '" + std::string(name) + "'");
}

std::size_t parameter_count(Family f) {
  return (f == Family::poisson || f == Family::exponential) ? 1 : 2;
}

bool is_discrete(Family f) { return f == Family::poisson; }

std::vector<std::string_view> parameter_names(Family f) {
  switch (f) {
    case Family::poisson: return {"rate"};
    case Family::exponential: return {"mean"};
    case Family::normal:
    case Family::lognormal: return {"mu", "sigma"};
    case Family::gamma: return {"shape", "scale"};
    case Family::uniform: return {"lo", "hi"};
  }
  return {};
}

void check_params(Family f, std::span<const double> p) {
  const auto name = std::string(to_string(f));
  if (p.size() != parameter_count(f)) {
    throw InvalidInput(name + " takes " + std::to_string(parameter_count(f)) + " parameter(s)");
  }
  for (double v : p) {
    if (!std::isfinite(v)) throw InvalidInput(name + ": parameters must be finite");
  }
  switch (f) {
    case Family::poisson:
    case Family::exponential:
      if (!(p[0] > 0.0)) throw InvalidInput(name + ": parameter must be > 0");
      break;
    case Family::normal:
    case Family::lognormal:
      if (!(p[1] > 0.0)) throw InvalidInput(name + ": sigma must be > 0");
      break;
    case Family::gamma:
      if (!(p[0] > 0.0) || !(p[1] > 0.0)) throw InvalidInput("gamma: shape and scale must be > 0");
      break;
    case Family::uniform:
      if (!(p[1] > p[0])) throw InvalidInput("uniform: hi must exceed lo");
      break;
  }
}

FittedDistribution make_distribution(Family f, std::vector<double> params) {
  check_params(f, params);
  FittedDistribution d;
  d.family = f;
  d.params = std::move(params);
  return d;
}

double mean(const FittedDistribution& d) {
  const auto& p = d.params;
  switch (d.family) {
    case Family::poisson:
    case Family::exponential: return p[0];
    case Family::normal: return p[0];
    case Family::lognormal: return std::exp(p[0] + 0.5 * p[1] * p[1]);
    case Family::gamma: return p[0] * p[1];
    case Family::uniform: return 0.5 * (p[0] + p[1]);
  }
  return 0.0;
}

double variance(const FittedDistribution& d) {
  const auto& p = d.params;
  switch (d.family) {
    case Family::poisson: return p[0];
    case Family::exponential: return p[0] * p[0];
    case Family::normal: return p[1] * p[1];
    case Family::lognormal: {
      const double s2 = p[1] * p[1];
      return std::expm1(s2) * std::exp(2.0 * p[0] + s2);
    }
    case Family::gamma: return p[0] * p[1] * p[1];
    case Family::uniform: return (p[1] - p[0]) * (p[1] - p[0]) / 12.0;
  }
  return 0.0;
}

double cdf(const FittedDistribution& d, double x) {
  const auto& p = d.params;
  switch (d.family) {
    case Family::poisson:
      if (x < 0.0) return 0.0;
      return boost::math::gamma_q(std::floor(x) + 1.0, p[0]);
    case Family::exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-x / p[0]);
    case Family::normal:
      return normal_cdf((x - p[0]) / p[1]);
    case Family::lognormal:
      return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - p[0]) / p[1]);
    case Family::gamma:
      return x <= 0.0 ? 0.0 : boost::math::gamma_p(p[0], x / p[1]);
    case Family::uniform:
      if (x <= p[0]) return 0.0;
      if (x >= p[1]) return 1.0;
      return (x - p[0]) / (p[1] - p[0]);
  }
  return 0.0;
}

double log_density(Family f, std::span<const double> p, double x) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  switch (f) {
    case Family::poisson:
      if (x < 0.0 || x != std::floor(x)) return kNegInf;
      return x * std::log(p[0]) - p[0] - std::lgamma(x + 1.0);
    case Family::exponential:
      if (x < 0.0) return kNegInf;
      return -std::log(p[0]) - x / p[0];
    case Family::normal: {
      const double z = (x - p[0]) / p[1];
      return -kLogSqrt2Pi - std::log(p[1]) - 0.5 * z * z;
    }
    case Family::lognormal: {
      if (x <= 0.0) return kNegInf;
      const double z = (std::log(x) - p[0]) / p[1];
      return -kLogSqrt2Pi - std::log(p[1]) - std::log(x) - 0.5 * z * z;
    }
    case Family::gamma:
      if (x <= 0.0) return kNegInf;
      return (p[0] - 1.0) * std::log(x) - x / p[1] - std::lgamma(p[0]) - p[0] * std::log(p[1]);
    case Family::uniform:
      if (x < p[0] || x > p[1]) return kNegInf;
      return -std::log(p[1] - p[0]);
  }
  return kNegInf;
}

double log_likelihood(Family f, std::span<const double> params, std::span<const double> xs) {
  double ll = 0.0;
  for (double x : xs) ll += log_density(f, params, x);
  return ll;
}

double sample(const FittedDistribution& d, Rng& rng) {
  const auto& p = d.params;
  switch (d.family) {
    case Family::poisson: return static_cast<double>(rng.poisson(p[0]));
    case Family::exponential: return rng.exponential(p[0]);
    case Family::normal: return rng.normal(p[0], p[1]);
    case Family::lognormal: return std::exp(rng.normal(p[0], p[1]));
    case Family::gamma: return rng.gamma(p[0], p[1]);
    case Family::uniform: return rng.uniform(p[0], p[1]);
  }
  return 0.0;
}

double bic(std::size_t k, std::size_t n, double log_likelihood) {
  return static_cast<double>(k) * std::log(static_cast<double>(n)) - 2.0 * log_likelihood;
}

std::optional<std::string> inapplicable_reason(Family f, std::span<const double> xs) {
  if (xs.size() < kMinObservations) {
    return "insufficient data: n = " + std::to_string(xs.size()) + " < " +
           std::to_string(kMinObservations);
  }
  const bool spread = has_spread(xs);
  const bool any_zero = std::any_of(xs.begin(), xs.end(), [](double x) { return x <= 0.0; });
  const bool all_zero = std::all_of(xs.begin(), xs.end(), [](double x) { return x == 0.0; });
  switch (f) {
    case Family::poisson:
      if (std::any_of(xs.begin(), xs.end(), [](double x) { return x != std::floor(x); })) {
        return "non-integer observations";
      }
      if (all_zero) return "degenerate: all observations are zero";
      break;
    case Family::exponential:
      if (all_zero) return "degenerate: all observations are zero";
      break;
    case Family::normal:
      if (!spread) return "degenerate: zero variance";
      break;
    case Family::lognormal:
    case Family::gamma:
      if (any_zero) return "requires strictly positive observations";
      if (!spread) return "degenerate: zero variance";
      break;
    case Family::uniform:
      if (!spread) return "degenerate: zero range";
      break;
  }
  return std::nullopt;
}

FittedDistribution mle_fit(std::span<const double> xs, Family f,
                           const GammaSolverOptions& gamma_options) {
  check_series(xs);
  if (auto reason = inapplicable_reason(f, xs)) {
    throw InvalidInput(std::string(to_string(f)) + ": " + *reason);
  }
  const double n = static_cast<double>(xs.size());
  std::vector<double> params;
  switch (f) {
    case Family::poisson:
    case Family::exponential:
      params = {sample_mean(xs)};
      break;
    case Family::normal: {
      const double mu = sample_mean(xs);
      params = {mu, std::sqrt(mle_variance(xs, mu))};
      break;
    }
    case Family::lognormal: {
      std::vector<double> logs(xs.size());
      std::transform(xs.begin(), xs.end(), logs.begin(), [](double x) { return std::log(x); });
      const double mu = sample_mean(logs);
      const double var = mle_variance(logs, mu);
      if (!(var > 0.0)) throw InvalidInput("lognormal: degenerate: zero variance of logs");
      params = {mu, std::sqrt(var)};
      break;
    }
    case Family::gamma: {
      const double m = sample_mean(xs);
      double mean_log = 0.0;
      for (double x : xs) mean_log += std::log(x);
      mean_log /= n;
      const double s = std::log(m) - mean_log;
      if (!(s > 0.0)) throw InvalidInput("gamma: degenerate: zero variance");
      const double shape = fit_gamma_shape(s, gamma_options);
      params = {shape, m / shape};
      break;
    }
    case Family::uniform: {
      const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
      params = {*lo, *hi};
      break;
    }
  }
  FittedDistribution d;
  d.family = f;
  d.params = std::move(params);
  d.n = xs.size();
  d.log_likelihood = log_likelihood(f, d.params, xs);
  d.bic = bic(parameter_count(f), d.n, d.log_likelihood);
  return d;
}

FitReport select_best(std::span<const double> xs, std::span<const Family> families) {
  check_series(xs);
  FitReport report;
  std::vector<Family> seen;
  for (Family f : families) {
    if (std::find(seen.begin(), seen.end(), f) != seen.end()) continue;
    seen.push_back(f);
    if (auto reason = inapplicable_reason(f, xs)) {
      report.skipped.push_back({f, *reason});
      continue;
    }
    try {
      report.candidates.push_back(mle_fit(xs, f));
    } catch (const Error& e) {
      report.skipped.push_back({f, e.what()});
    }
  }
  if (report.candidates.empty()) {
    std::string msg = "no applicable distribution family";
    for (const auto& s : report.skipped) {
      msg += "; " + std::string(to_string(s.family)) + ": " + s.reason;
    }
    throw InvalidInput(msg);
  }
  std::sort(report.candidates.begin(), report.candidates.end(),
            [](const FittedDistribution& a, const FittedDistribution& b) {
              if (a.bic != b.bic) return a.bic < b.bic;
              if (parameter_count(a.family) != parameter_count(b.family)) {
                return parameter_count(a.family) < parameter_count(b.family);
              }
              return a.family < b.family;
            });
  return report;
}

std::string params_json(const FittedDistribution& d) {
  const auto names = parameter_names(d.family);
  std::string out = "{";
  for (std::size_t i = 0; i < names.size() && i < d.params.size(); ++i) {
    if (i > 0) out += ',';
    out += '"' + std::string(names[i]) + "\":" + format_number(d.params[i]);
  }
  return out + "}";
}

std::string fit_report_rows(std::string_view item_id, const FitReport& report) {
  check_csv_identifier(item_id);
  std::string out;
  for (std::size_t i = 0; i < report.candidates.size(); ++i) {
    const auto& c = report.candidates[i];
    out += csv_line({std::string(item_id), std::string(to_string(c.family)),
                     csv_quote(params_json(c)), format_number(c.log_likelihood),
                     format_number(c.bic), i == 0 ? "1" : "0"});
  }
  return out;
}

}  // namespace spareopt::distfit
