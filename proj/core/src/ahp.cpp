#include "spareopt/ahp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "spareopt/csv.hpp"
#include "spareopt/error.hpp"

namespace spareopt::ahp {
namespace {

constexpr std::array<double, 9> kRmiiTable = {0.0, 0.0, 0.58, 0.9, 1.12, 1.24, 1.32, 1.41, 1.45};

std::string cell(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

double parse_entry(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    const auto slash = s.find('/');
    if (slash == std::string::npos) return parse_number(s, "matrix entry");
    const double num = parse_number(std::string_view(s).substr(0, slash), "matrix entry");
    const double den = parse_number(std::string_view(s).substr(slash + 1), "matrix entry");
    if (den == 0.0) throw ConfigError("matrix entry '" + s + "' divides by zero");
    return num / den;
  }
  throw ConfigError("matrix entries must be numbers or \"p/q\" strings");
}

}  // namespace

PairwiseMatrix PairwiseMatrix::validate(const std::vector<std::vector<double>>& raw) {
  const std::size_t n = raw.size();
  if (n == 0) throw InvalidInput("pairwise matrix is empty");
  if (n > kMaxCriteria) {
    throw InvalidInput("pairwise matrix dimension " + std::to_string(n) + " exceeds " +
                       std::to_string(kMaxCriteria));
  }
  std::vector<double> entries;
  entries.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (raw[i].size() != n) {
      throw InvalidInput("pairwise matrix is not square: row " + std::to_string(i) + " has " +
                         std::to_string(raw[i].size()) + " entries, expected " + std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double a = raw[i][j];
      if (!std::isfinite(a) || a <= 0.0) {
        throw InvalidInput("pairwise entry " + cell(i, j) + " must be finite and positive");
      }
      entries.push_back(a);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (entries[i * n + i] != 1.0) {
      throw InvalidInput("diagonal entry " + cell(i, i) + " must equal 1");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const double product = entries[i * n + j] * entries[j * n + i];
      if (std::abs(product - 1.0) > kReciprocityTolerance) {
        throw InvalidInput("reciprocity violated at " + cell(i, j) + ": a_ij * a_ji = " +
                           format_number(product));
      }
    }
  }
  return PairwiseMatrix(n, std::move(entries));
}

PairwiseMatrix PairwiseMatrix::from_weights(const std::vector<double>& weights) {
  std::vector<std::vector<double>> raw(weights.size(), std::vector<double>(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) throw InvalidInput("from_weights: weights must be positive");
    for (std::size_t j = 0; j < weights.size(); ++j) {
      raw[i][j] = (i == j) ? 1.0 : weights[i] / weights[j];
    }
  }
  return validate(raw);
}

std::string_view to_string(WeightMethod method) {
  switch (method) {
    case WeightMethod::eigenvector: return "eigenvector";
    case WeightMethod::column_normalization: return "column_normalization";
    case WeightMethod::row_geometric_mean: return "row_geometric_mean";
  }
  return "unknown";
}

WeightMethod parse_weight_method(std::string_view name) {
  for (auto m : {WeightMethod::eigenvector, WeightMethod::column_normalization,
                 WeightMethod::row_geometric_mean}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown weight method '" + std::string(name) + "'");
}

CriterionWeights compute_weights(const PairwiseMatrix& m, WeightMethod method,
                                 const PowerIterationOptions& options) {
  const std::size_t n = m.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));

  switch (method) {
    case WeightMethod::eigenvector: {
      std::vector<double> next(n);
      bool converged = false;
      for (int it = 0; it < options.max_iterations; ++it) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += m(i, j) * w[j];
          next[i] = s;
          total += s;
        }
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          next[i] /= total;
          change = std::max(change, std::abs(next[i] - w[i]));
        }
        w.swap(next);
        if (change < options.tolerance) {
          converged = true;
          break;
        }
      }
      if (!converged) {
        throw NonConvergence("power iteration did not converge in " +
                             std::to_string(options.max_iterations) + " iterations");
      }
      break;
    }
    case WeightMethod::column_normalization: {
      std::fill(w.begin(), w.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) col += m(i, j);
        for (std::size_t i = 0; i < n; ++i) w[i] += m(i, j) / col;
      }
      for (auto& x : w) x /= static_cast<double>(n);
      break;
    }
    case WeightMethod::row_geometric_mean: {
      for (std::size_t i = 0; i < n; ++i) {
        double log_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) log_sum += std::log(m(i, j));
        w[i] = std::exp(log_sum / static_cast<double>(n));
      }
      break;
    }
  }

  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= total;
  return {std::move(w), method};
}

double rmii(std::size_t n) {
  if (n < 1 || n > kRmiiTable.size()) {
    throw InvalidInput("random-matrix inconsistency index is tabulated for 1 <= n <= 9, got n = " +
                       std::to_string(n));
  }
  return kRmiiTable[n - 1];
}

ConsistencyReport consistency(const PairwiseMatrix& m, const CriterionWeights& w) {
  const std::size_t n = m.size();
  if (w.weights.size() != n) {
    throw InvalidInput("weight vector length " + std::to_string(w.weights.size()) +
                       " does not match matrix dimension " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(w.weights[i] > 0.0)) {
      throw InvalidInput("degenerate weights: w[" + std::to_string(i) + "] is not positive");
    }
  }
  ConsistencyReport report;
  double ratio_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double aw = 0.0;
    for (std::size_t j = 0; j < n; ++j) aw += m(i, j) * w.weights[j];
    ratio_sum += aw / w.weights[i];
  }
  const double nd = static_cast<double>(n);
  report.lambda_max = ratio_sum / nd;
  report.ii = (n > 1) ? (report.lambda_max - nd) / (nd - 1.0) : 0.0;
  report.rmii = rmii(n);
  report.ir = (n <= 2) ? 0.0 : report.ii / report.rmii;
  report.acceptable = report.ir <= kAcceptableInconsistency;
  return report;
}

CriteriaDocument parse_criteria_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("criteria document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("criteria") || !doc.contains("matrix")) {
    throw ConfigError("criteria document needs \"criteria\" and \"matrix\"");
  }
  std::vector<std::string> names;
  for (const auto& c : doc.at("criteria")) {
    if (!c.is_string()) throw ConfigError("criteria names must be strings");
    names.push_back(c.get<std::string>());
  }
  std::vector<std::vector<double>> raw;
  for (const auto& row : doc.at("matrix")) {
    if (!row.is_array()) throw ConfigError("matrix rows must be arrays");
    auto& out = raw.emplace_back();
    for (const auto& v : row) out.push_back(parse_entry(v));
  }
  if (names.size() != raw.size()) {
    throw ConfigError("criteria document lists " + std::to_string(names.size()) +
                      " criteria but the matrix has " + std::to_string(raw.size()) + " rows");
  }
  try {
    return {std::move(names), PairwiseMatrix::validate(raw)};
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("criteria document: ") + e.what());
  }
}

CriteriaDocument load_criteria_json(const std::filesystem::path& path) {
  return parse_criteria_json(read_text_file(path));
}

std::string weights_csv(const std::vector<std::string>& criteria, const CriterionWeights& w) {
  if (criteria.size() != w.weights.size()) {
    throw InvalidInput("criteria names and weights differ in length");
  }
  std::string out = "criterion,weight\n";
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    check_csv_identifier(criteria[i]);
    out += csv_line({criteria[i], format_number(w.weights[i])});
  }
  return out;
}

}  // namespace spareopt::ahp
