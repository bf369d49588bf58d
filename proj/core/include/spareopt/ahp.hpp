#pragma once

// Analytic Hierarchy Process: pairwise-comparison matrices, criterion
// weights, and consistency diagnostics.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace spareopt::ahp {

inline constexpr std::size_t kMaxCriteria = 15;
inline constexpr double kReciprocityTolerance = 1e-9;
inline constexpr double kAcceptableInconsistency = 0.1;

// Square reciprocal matrix of positive preference ratios. a(i, j) is the
// preference of criterion i over criterion j. Always valid once built.
class PairwiseMatrix {
 public:
  /// The 1x1 identity.
  PairwiseMatrix() : n_(1), entries_{1.0} {}

  /// Validates diagonal == 1, positivity, finiteness, and reciprocity
  /// a(j,i) * a(i,j) == 1 (relative tolerance 1e-9). Consistency in the
  /// a(i,k) * a(k,j) == a(i,j) sense is not required.
  static PairwiseMatrix validate(const std::vector<std::vector<double>>& raw);

  /// Perfectly consistent matrix a(i,j) = w_i / w_j from positive weights.
  static PairwiseMatrix from_weights(const std::vector<double>& weights);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

 private:
  PairwiseMatrix(std::size_t n, std::vector<double> entries)
      : n_(n), entries_(std::move(entries)) {}

  std::size_t n_;
  std::vector<double> entries_;  // row-major
};

enum class WeightMethod { eigenvector, column_normalization, row_geometric_mean };

std::string_view to_string(WeightMethod method);
WeightMethod parse_weight_method(std::string_view name);

struct CriterionWeights {
  std::vector<double> weights;  // sums to 1
  WeightMethod method = WeightMethod::eigenvector;
};

struct ConsistencyReport {
  double lambda_max = 0.0;
  double ii = 0.0;    // inconsistency index (lambda_max - n) / (n - 1)
  double rmii = 0.0;  // random-matrix inconsistency index for n
  double ir = 0.0;    // ii / rmii, defined as 0 when n <= 2
  bool acceptable = true;
};

struct PowerIterationOptions {
  double tolerance = 1e-10;  // max-norm change between iterates
  int max_iterations = 10000;
};

/// Weight extraction. The eigenvector method runs power iteration and throws
/// NonConvergence rather than returning a partial vector.
CriterionWeights compute_weights(const PairwiseMatrix& m,
                                 WeightMethod method = WeightMethod::eigenvector,
                                 const PowerIterationOptions& options = {});

/// lambda_max is the mean of the ratios (A w)_i / w_i. Throws InvalidInput
/// for a zero weight or a dimension mismatch, and for n > 9 (no table value).
ConsistencyReport consistency(const PairwiseMatrix& m, const CriterionWeights& w);

/// Random-matrix inconsistency index for 1 <= n <= 9. Larger n is refused.
double rmii(std::size_t n);

// Named criteria plus their judgment matrix, as loaded from
// {"criteria": [...], "matrix": [[...], ...]}. Matrix entries may be numbers
// or "p/q" fraction strings.
struct CriteriaDocument {
  std::vector<std::string> criteria;
  PairwiseMatrix matrix;
};

CriteriaDocument parse_criteria_json(std::string_view text);
CriteriaDocument load_criteria_json(const std::filesystem::path& path);

/// CSV with header "criterion,weight".
std::string weights_csv(const std::vector<std::string>& criteria, const CriterionWeights& w);

}  // namespace spareopt::ahp
