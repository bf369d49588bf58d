#include "spareopt/optimizer.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "spareopt/csv.hpp"

namespace spareopt::optimizer {
namespace {

// Strict total order used for argmin and descent moves: lower mean cost,
// then lower rop, then lower roq.
bool better(const EvaluationRecord& a, const EvaluationRecord& b) {
  if (a.mean_cost != b.mean_cost) return a.mean_cost < b.mean_cost;
  return a.policy < b.policy;
}

class Runner {
 public:
  Runner(const SearchSpace& space, const Evaluator& evaluator) : space_(space), evaluator_(evaluator) {}

  EvaluationRecord evaluate(const InventoryPolicy& p, Phase phase, std::size_t reps, std::uint64_t seed) {
    if (!space_.contains(p)) throw std::logic_error("optimizer stepped outside the search space");
    const auto key = std::make_tuple(p.rop, p.roq, reps, seed);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    Estimate est;
    try {
      est = evaluator_(p, reps, seed);
    } catch (const std::exception& e) {
      throw EvaluationError(p, e.what());
    }
    EvaluationRecord rec{p, phase, reps, seed, est.mean_cost, est.ci_halfwidth};
    log_.push_back(rec);
    cache_.emplace(key, rec);
    return rec;
  }

  std::vector<EvaluationRecord> take_log() { return std::move(log_); }

 private:
  const SearchSpace& space_;
  const Evaluator& evaluator_;
  std::vector<EvaluationRecord> log_;
  std::map<std::tuple<std::int64_t, std::int64_t, std::size_t, std::uint64_t>, EvaluationRecord> cache_;
};

OptimizationResult finish(const EvaluationRecord& best, std::vector<EvaluationRecord> log) {
  OptimizationResult result;
  result.best = best.policy;
  result.best_cost_mean = best.mean_cost;
  result.best_cost_ci = best.ci_halfwidth;
  result.evaluation_count = log.size();
  result.evaluations = std::move(log);
  return result;
}

}  // namespace

std::uint64_t SearchSpace::size() const {
  return static_cast<std::uint64_t>(rop.span() + 1) * static_cast<std::uint64_t>(roq.span() + 1);
}

void validate(const SearchSpace& space) {
  if (space.rop.max < space.rop.min || space.roq.max < space.roq.min) {
    throw InvalidInput("search space is empty");
  }
  if (space.rop.min < 0) throw InvalidInput("search space rop must be >= 0");
  if (space.roq.min < 1) throw InvalidInput("search space roq must be >= 1");
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::screen: return "screen";
    case Phase::refine: return "refine";
    case Phase::exhaustive: return "exhaustive";
  }
  return "unknown";
}

EvaluationError::EvaluationError(const InventoryPolicy& policy, const std::string& what)
    : Error("evaluation failed at (rop=" + std::to_string(policy.rop) +
            ", roq=" + std::to_string(policy.roq) + "): " + what),
      policy_(policy) {}

OptimizationResult optimize(const SearchSpace& space, const Evaluator& evaluator,
                            const OptimizerConfig& config) {
  validate(space);
  if (config.screen_reps == 0 || config.refine_reps == 0) {
    throw InvalidInput("replication budgets must be >= 1");
  }
  if (config.grid_step && *config.grid_step < 1) throw InvalidInput("grid_step must be >= 1");
  const std::int64_t rop_step = config.grid_step.value_or(std::max<std::int64_t>(1, space.rop.span() / 10));
  const std::int64_t roq_step = config.grid_step.value_or(std::max<std::int64_t>(1, space.roq.span() / 10));

  Runner runner(space, evaluator);

  std::optional<EvaluationRecord> best;
  for (std::int64_t r = space.rop.min; r <= space.rop.max; r += rop_step) {
    for (std::int64_t q = space.roq.min; q <= space.roq.max; q += roq_step) {
      auto rec = runner.evaluate({r, q}, Phase::screen, config.screen_reps, config.seed);
      if (!best || better(rec, *best)) best = rec;
    }
  }

  auto current = runner.evaluate(best->policy, Phase::refine, config.refine_reps, config.seed);
  for (;;) {
    const auto [r, q] = std::pair{current.policy.rop, current.policy.roq};
    const InventoryPolicy moves[] = {{r - 1, q},        {r + 1, q},        {r, q - 1},        {r, q + 1},
                                     {r - rop_step, q}, {r + rop_step, q}, {r, q - roq_step}, {r, q + roq_step}};
    std::optional<EvaluationRecord> best_neighbor;
    for (const auto& p : moves) {
      if (!space.contains(p) || p == current.policy) continue;
      auto rec = runner.evaluate(p, Phase::refine, config.refine_reps, config.seed);
      if (!best_neighbor || better(rec, *best_neighbor)) best_neighbor = rec;
    }
    if (!best_neighbor || !better(*best_neighbor, current)) break;
    current = *best_neighbor;
  }
  return finish(current, runner.take_log());
}

OptimizationResult exhaustive(const SearchSpace& space, const Evaluator& evaluator, std::size_t reps,
                              std::uint64_t seed, std::uint64_t cap) {
  validate(space);
  if (reps == 0) throw InvalidInput("replication budget must be >= 1");
  if (space.size() > cap) {
    throw InvalidInput("search space has " + std::to_string(space.size()) +
                       " points, above the exhaustive cap of " + std::to_string(cap));
  }
  Runner runner(space, evaluator);
  std::optional<EvaluationRecord> best;
  for (std::int64_t r = space.rop.min; r <= space.rop.max; ++r) {
    for (std::int64_t q = space.roq.min; q <= space.roq.max; ++q) {
      auto rec = runner.evaluate({r, q}, Phase::exhaustive, reps, seed);
      if (!best || better(rec, *best)) best = rec;
    }
  }
  return finish(*best, runner.take_log());
}

Evaluator simulation_evaluator(const demandgen::DemandSource& demand,
                               const simcore::LeadTimeModel& lead_time,
                               const simcore::CostRates& costs, simcore::SimConfig base) {
  return [&demand, &lead_time, costs, base](const InventoryPolicy& policy, std::size_t reps,
                                            std::uint64_t seed) {
    simcore::SimConfig cfg = base;
    cfg.seed = seed;
    const auto summary = simcore::replicate(policy, demand, lead_time, costs, cfg, reps);
    return Estimate{summary.mean_of(simcore::Metric::total_cost),
                    summary.ci_of(simcore::Metric::total_cost)};
  };
}

std::string evaluation_log_csv(const OptimizationResult& result) {
  std::string out(kEvaluationLogHeader);
  for (const auto& e : result.evaluations) {
    out += csv_line({std::to_string(e.policy.rop), std::to_string(e.policy.roq),
                     std::string(to_string(e.phase)), std::to_string(e.reps),
                     format_number(e.mean_cost), format_number(e.ci_halfwidth)});
  }
  return out;
}

}  // namespace spareopt::optimizer
