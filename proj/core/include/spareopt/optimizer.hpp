#pragma once

// Simulation-optimization over the (ROP, ROQ) lattice: coarse grid screening
// followed by neighborhood descent, both under common random numbers.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spareopt/error.hpp"
#include "spareopt/simcore.hpp"

namespace spareopt::optimizer {

using simcore::InventoryPolicy;

struct IntRange {
  std::int64_t min = 0;
  std::int64_t max = 0;  // inclusive

  std::int64_t span() const { return max - min; }
  bool contains(std::int64_t v) const { return v >= min && v <= max; }
};

struct SearchSpace {
  IntRange rop;
  IntRange roq;

  std::uint64_t size() const;
  bool contains(const InventoryPolicy& p) const { return rop.contains(p.rop) && roq.contains(p.roq); }
};

/// Throws InvalidInput for an empty range, a negative rop or roq < 1.
void validate(const SearchSpace& space);

struct Estimate {
  double mean_cost = 0.0;
  double ci_halfwidth = 0.0;
};

// Maps (policy, replication count, seed) to a cost estimate. Must be a pure
// function of its arguments for the audit and CRN guarantees to hold.
using Evaluator =
    std::function<Estimate(const InventoryPolicy& policy, std::size_t reps, std::uint64_t seed)>;

enum class Phase { screen, refine, exhaustive };
std::string_view to_string(Phase phase);

struct EvaluationRecord {
  InventoryPolicy policy;
  Phase phase = Phase::screen;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  double mean_cost = 0.0;
  double ci_halfwidth = 0.0;
};

struct OptimizationResult {
  InventoryPolicy best;
  double best_cost_mean = 0.0;
  double best_cost_ci = 0.0;
  std::vector<EvaluationRecord> evaluations;
  std::size_t evaluation_count = 0;
};

struct OptimizerConfig {
  std::size_t screen_reps = 20;
  std::size_t refine_reps = 100;
  /// Grid stride on both axes; nullopt means max(1, span / 10) per axis.
  std::optional<std::int64_t> grid_step;
  std::uint64_t seed = 0;
};

// Evaluator failure, carrying the policy that was being evaluated.
class EvaluationError : public Error {
 public:
  EvaluationError(const InventoryPolicy& policy, const std::string& what);
  const InventoryPolicy& policy() const { return policy_; }

 private:
  InventoryPolicy policy_;
};

/// Phase 1 evaluates the grid at screen_reps; phase 2 descends from the best
/// grid point over +-1 and +-stride moves at refine_reps until no neighbor
/// strictly improves. Every evaluation receives config.seed (common random
/// numbers across candidates and phases). Ties go to lower rop, then lower roq.
OptimizationResult optimize(const SearchSpace& space, const Evaluator& evaluator,
                            const OptimizerConfig& config);

inline constexpr std::uint64_t kDefaultExhaustiveCap = 10000;

/// Evaluates every lattice point with the same seed; ties go to lower rop,
/// then lower roq. Throws InvalidInput when the space exceeds the cap.
OptimizationResult exhaustive(const SearchSpace& space, const Evaluator& evaluator,
                              std::size_t reps, std::uint64_t seed,
                              std::uint64_t cap = kDefaultExhaustiveCap);

/// Evaluator backed by simcore::replicate on total cost.
Evaluator simulation_evaluator(const demandgen::DemandSource& demand,
                               const simcore::LeadTimeModel& lead_time,
                               const simcore::CostRates& costs, simcore::SimConfig base);

inline constexpr std::string_view kEvaluationLogHeader =
    "rop,roq,phase,reps,mean_cost,ci_halfwidth\n";
std::string evaluation_log_csv(const OptimizationResult& result);

}  // namespace spareopt::optimizer
