#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "spareopt/ahp.hpp"
#include "spareopt/error.hpp"
#include "spareopt/pipeline.hpp"
#include "spareopt/rng.hpp"

using namespace spareopt;
using namespace spareopt::ahp;

namespace {

constexpr WeightMethod kMethods[] = {WeightMethod::eigenvector, WeightMethod::column_normalization,
                                     WeightMethod::row_geometric_mean};

const std::vector<std::vector<double>> kConsistent3 = {{1, 2, 4}, {0.5, 1, 2}, {0.25, 0.5, 1}};
const std::vector<std::vector<double>> kCyclic3 = {{1, 2, 0.5}, {0.5, 1, 4}, {2, 0.25, 1}};

}  // namespace

TEST(Pairwise, ValidatesReciprocity) {
  EXPECT_NO_THROW(PairwiseMatrix::validate({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}));
  EXPECT_NO_THROW(PairwiseMatrix::validate(kConsistent3));
  EXPECT_THROW(PairwiseMatrix::validate({{1, 2}, {0.4, 1}}), InvalidInput);
}

TEST(Pairwise, RejectsMalformed) {
  EXPECT_THROW(PairwiseMatrix::validate({}), InvalidInput);
  EXPECT_THROW(PairwiseMatrix::validate({{1, 2}}), InvalidInput);
  EXPECT_THROW(PairwiseMatrix::validate({{2, 1}, {1, 2}}), InvalidInput);
  EXPECT_THROW(PairwiseMatrix::validate({{1, -1}, {-1, 1}}), InvalidInput);
  EXPECT_THROW(PairwiseMatrix::validate({{1, 0}, {0, 1}}), InvalidInput);
}

TEST(Pairwise, AcceptsDecimalThirds) {
  EXPECT_NO_THROW(PairwiseMatrix::validate({{1, 3}, {1.0 / 3.0, 1}}));
  EXPECT_NO_THROW(PairwiseMatrix::validate({{1, 3}, {0.3333333333333, 1}}));
  EXPECT_THROW(PairwiseMatrix::validate({{1, 3}, {0.3333, 1}}), InvalidInput);
}

TEST(Weights, AllOnesIsUniformForEveryMethod) {
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto m = PairwiseMatrix::validate(std::vector<std::vector<double>>(n, std::vector<double>(n, 1.0)));
    for (auto method : kMethods) {
      const auto w = compute_weights(m, method);
      for (double x : w.weights) EXPECT_NEAR(x, 1.0 / static_cast<double>(n), 1e-12);
    }
  }
}

TEST(Weights, ConsistentThreeByThree) {
  const auto m = PairwiseMatrix::validate(kConsistent3);
  for (auto method : kMethods) {
    const auto w = compute_weights(m, method);
    EXPECT_NEAR(w.weights[0], 4.0 / 7.0, 1e-9);
    EXPECT_NEAR(w.weights[1], 2.0 / 7.0, 1e-9);
    EXPECT_NEAR(w.weights[2], 1.0 / 7.0, 1e-9);
  }
}

TEST(Weights, EigenvectorSatisfiesEigenEquation) {
  const auto m = PairwiseMatrix::validate(kCyclic3);
  const auto w = compute_weights(m);
  const double lambda = oracle::largest_eigenvalue(kCyclic3);
  for (std::size_t i = 0; i < 3; ++i) {
    double aw = 0.0;
    for (std::size_t j = 0; j < 3; ++j) aw += m(i, j) * w.weights[j];
    EXPECT_NEAR(aw, lambda * w.weights[i], 1e-8);
  }
}

TEST(Weights, PowerIterationBudgetExhaustion) {
  const auto m = PairwiseMatrix::validate(kCyclic3);
  EXPECT_THROW(compute_weights(m, WeightMethod::eigenvector, {1e-300, 2}), NonConvergence);
}

TEST(Weights, BundledFixtureReproducesCaseStudyWeights) {
  const auto doc = parse_criteria_json(pipeline::default_criteria_json());
  const auto w = compute_weights(doc.matrix);
  const double expected[] = {0.52, 0.15, 0.14, 0.12, 0.07};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(w.weights[i], expected[i], 1e-9);
  EXPECT_NEAR(consistency(doc.matrix, w).ir, 0.0, 1e-9);
}

TEST(Consistency, ConsistentMatrixHasZeroIndex) {
  const auto m = PairwiseMatrix::validate(kConsistent3);
  const auto r = consistency(m, compute_weights(m));
  EXPECT_NEAR(r.lambda_max, 3.0, 1e-9);
  EXPECT_NEAR(r.ii, 0.0, 1e-9);
  EXPECT_NEAR(r.ir, 0.0, 1e-9);
  EXPECT_TRUE(r.acceptable);
}

TEST(Consistency, CyclicMatrixMatchesEigenOracle) {
  const auto m = PairwiseMatrix::validate(kCyclic3);
  const auto r = consistency(m, compute_weights(m));
  const double lambda = oracle::largest_eigenvalue(kCyclic3);
  EXPECT_NEAR(lambda, 3.916692362781796, 1e-9);
  EXPECT_NEAR(r.lambda_max, lambda, 1e-8);
  EXPECT_NEAR(r.ii, (lambda - 3.0) / 2.0, 1e-8);
  EXPECT_NEAR(r.ir, 0.7902520368808587, 1e-8);
  EXPECT_FALSE(r.acceptable);
}

TEST(Consistency, LambdaMaxAtLeastN) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(2, 9));
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = std::pow(9.0, rng.uniform(-1.0, 1.0));
        a[i][j] = v;
        a[j][i] = 1.0 / v;
      }
    }
    const auto m = PairwiseMatrix::validate(a);
    for (auto method : kMethods) {
      const auto w = compute_weights(m, method);
      double sum = 0.0;
      for (double x : w.weights) {
        EXPECT_GT(x, 0.0);
        sum += x;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
    EXPECT_GE(consistency(m, compute_weights(m)).lambda_max, static_cast<double>(n) - 1e-9);
  }
}

TEST(Consistency, SmallMatricesDefineRatioAsZero) {
  const auto m = PairwiseMatrix::validate({{1, 5}, {0.2, 1}});
  const auto r = consistency(m, compute_weights(m));
  EXPECT_EQ(r.ir, 0.0);
  EXPECT_TRUE(r.acceptable);
}

TEST(Consistency, RejectsZeroWeightAndMismatch) {
  const auto m = PairwiseMatrix::validate(kConsistent3);
  EXPECT_THROW(consistency(m, {{0.5, 0.5, 0.0}, WeightMethod::eigenvector}), InvalidInput);
  EXPECT_THROW(consistency(m, {{0.5, 0.5}, WeightMethod::eigenvector}), InvalidInput);
}

TEST(Rmii, TableValues) {
  const double table[] = {0, 0, 0.58, 0.9, 1.12, 1.24, 1.32, 1.41, 1.45};
  for (std::size_t n = 1; n <= 9; ++n) EXPECT_EQ(rmii(n), table[n - 1]);
  EXPECT_THROW(rmii(10), InvalidInput);
  EXPECT_THROW(rmii(0), InvalidInput);
}

TEST(Consistency, RefusesBeyondTable) {
  const auto m = PairwiseMatrix::validate(std::vector<std::vector<double>>(10, std::vector<double>(10, 1.0)));
  EXPECT_THROW(consistency(m, compute_weights(m)), InvalidInput);
}

TEST(CriteriaJson, ParsesFractionsAndNumbers) {
  const auto doc = parse_criteria_json(R"({"criteria":["a","b"],"matrix":[[1,"3/1"],["1/3",1]]})");
  EXPECT_EQ(doc.criteria.size(), 2u);
  EXPECT_NEAR(doc.matrix(1, 0), 1.0 / 3.0, 1e-15);
}

TEST(CriteriaJson, RejectsBadDocuments) {
  EXPECT_THROW(parse_criteria_json("{"), ConfigError);
  EXPECT_THROW(parse_criteria_json(R"({"criteria":["a"]})"), ConfigError);
  EXPECT_THROW(parse_criteria_json(R"({"criteria":["a","b"],"matrix":[[1]]})"), ConfigError);
  EXPECT_THROW(parse_criteria_json(R"({"criteria":["a","b"],"matrix":[[1,"x/2"],[0.5,1]]})"), ConfigError);
}

TEST(CriteriaJson, WeightsCsv) {
  const auto csv = weights_csv({"a", "b"}, {{0.75, 0.25}, WeightMethod::eigenvector});
  EXPECT_EQ(csv, "criterion,weight\na,0.75\nb,0.25\n");
}
