#pragma once

// Maximum-likelihood fitting of candidate families and BIC model selection.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spareopt {
class Rng;
}

namespace spareopt::distfit {

inline constexpr std::size_t kMinObservations = 3;

// Declaration order is the tie-break order used by select_best.
enum class Family { poisson, exponential, normal, lognormal, gamma, uniform };

inline constexpr Family kAllFamilies[] = {Family::poisson, Family::exponential,
                                          Family::normal,  Family::lognormal,
                                          Family::gamma,   Family::uniform};

std::string_view to_string(Family f);
Family parse_family(std::string_view name);
std::size_t parameter_count(Family f);
bool is_discrete(Family f);
/// Parameter names in params order, e.g. {"mu", "sigma"} for normal.
std::vector<std::string_view> parameter_names(Family f);

// Parameterizations:
//   poisson      {rate}
//   exponential  {mean}            f(x) = (1/mean) exp(-x/mean)
//   normal       {mu, sigma}
//   lognormal    {mu, sigma}       of log(x)
//   gamma        {shape, scale}
//   uniform      {lo, hi}
struct FittedDistribution {
  Family family = Family::poisson;
  std::vector<double> params;
  double log_likelihood = 0.0;
  double bic = 0.0;
  std::size_t n = 0;
};

/// Checks params against the family domain; throws InvalidInput.
void check_params(Family f, std::span<const double> params);

/// Distribution without fit statistics (n = 0), for configured models.
FittedDistribution make_distribution(Family f, std::vector<double> params);

double mean(const FittedDistribution& d);
double variance(const FittedDistribution& d);
/// CDF; for poisson this is P(X <= floor(x)).
double cdf(const FittedDistribution& d, double x);
/// Log-density (continuous) or log-pmf (poisson) at x.
double log_density(Family f, std::span<const double> params, double x);
double log_likelihood(Family f, std::span<const double> params, std::span<const double> xs);

double sample(const FittedDistribution& d, Rng& rng);

/// k ln(n) - 2 lnL.
double bic(std::size_t k, std::size_t n, double log_likelihood);

/// Reason the family cannot be fitted to xs, or nullopt when it can.
std::optional<std::string> inapplicable_reason(Family f, std::span<const double> xs);

struct GammaSolverOptions {
  double tolerance = 1e-10;
  int max_iterations = 200;
};

/// Maximum-likelihood fit. Throws InvalidInput if the family is inapplicable
/// (see inapplicable_reason) or the series is not finite and nonnegative.
FittedDistribution mle_fit(std::span<const double> xs, Family f,
                           const GammaSolverOptions& gamma_options = {});

struct SkippedFamily {
  Family family;
  std::string reason;
};

struct FitReport {
  std::vector<FittedDistribution> candidates;  // ascending BIC
  std::vector<SkippedFamily> skipped;

  const FittedDistribution& best() const { return candidates.front(); }
};

/// Fits every applicable family. Ties in BIC go to fewer parameters, then to
/// declaration order of Family. Throws InvalidInput listing per-family
/// reasons when nothing applies.
FitReport select_best(std::span<const double> xs,
                      std::span<const Family> families = kAllFamilies);

/// JSON object of named parameters, e.g. {"mu":10,"sigma":2}.
std::string params_json(const FittedDistribution& d);

/// Rows for item_id,family,params_json,log_likelihood,bic,selected.
std::string fit_report_rows(std::string_view item_id, const FitReport& report);
inline constexpr std::string_view kFitReportHeader =
    "item_id,family,params_json,log_likelihood,bic,selected\n";

}  // namespace spareopt::distfit
