#pragma once

// Monthly discrete-event simulation of a continuous-review (ROP, ROQ) policy
// with lost sales and holding / ordering / shortage cost accounting.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spareopt/demandgen.hpp"
#include "spareopt/distfit.hpp"

namespace spareopt {
class Rng;
}

namespace spareopt::simcore {

struct InventoryPolicy {
  std::int64_t rop = 0;  // reorder point, units
  std::int64_t roq = 1;  // reorder quantity, units

  friend bool operator==(const InventoryPolicy&, const InventoryPolicy&) = default;
  friend auto operator<=>(const InventoryPolicy&, const InventoryPolicy&) = default;
};

void validate(const InventoryPolicy& policy);

struct CostRates {
  double holding = 0.0;   // per unit per year
  double ordering = 0.0;  // per order
  double shortage = 0.0;  // per unit short
};

void validate(const CostRates& costs);

enum class HoldingMode {
  year_end,      // on-hand at each year end times the annual rate
  time_average,  // month-end on-hand times rate/12, charged at year end
};

HoldingMode parse_holding_mode(std::string_view name);

struct SimConfig {
  int horizon_years = 1;
  /// Defaults to rop + roq.
  std::optional<std::int64_t> initial_on_hand;
  std::uint64_t seed = 0;
  /// Leading years simulated but excluded from the outcome statistics.
  int warmup_years = 0;
  HoldingMode holding_mode = HoldingMode::year_end;
};

// Source of replenishment lead times in whole months.
class LeadTimeModel {
 public:
  virtual ~LeadTimeModel() = default;
  /// Throws ModelError if the model yields a negative lead time.
  virtual std::int64_t sample_months(Rng& rng) const = 0;
  virtual double mean_months() const = 0;
};

class ConstantLeadTime final : public LeadTimeModel {
 public:
  explicit ConstantLeadTime(std::int64_t months);
  std::int64_t sample_months(Rng&) const override { return months_; }
  double mean_months() const override { return static_cast<double>(months_); }

 private:
  std::int64_t months_;
};

// Draws from a fitted distribution rounded half-up to whole months. A draw
// below -0.5 is a model error; it is never clamped.
class FittedLeadTime final : public LeadTimeModel {
 public:
  explicit FittedLeadTime(distfit::FittedDistribution dist) : dist_(std::move(dist)) {}
  std::int64_t sample_months(Rng& rng) const override;
  double mean_months() const override { return distfit::mean(dist_); }

 private:
  distfit::FittedDistribution dist_;
};

// Uniform resampling of observed lead times (rounded half-up).
class EmpiricalLeadTime final : public LeadTimeModel {
 public:
  explicit EmpiricalLeadTime(std::vector<double> samples);
  std::int64_t sample_months(Rng& rng) const override;
  double mean_months() const override;

 private:
  std::vector<std::int64_t> months_;
};

enum class EventKind { arrival, demand, order, year_end };
std::string_view to_string(EventKind kind);

struct TraceEvent {
  int t_month = 0;  // 1-based month number
  EventKind kind = EventKind::demand;
  std::int64_t qty = 0;
  std::int64_t on_hand = 0;   // after the event
  std::int64_t on_order = 0;  // after the event
  double cost_delta = 0.0;
};

using EventTrace = std::vector<TraceEvent>;

/// t_month,event,qty,on_hand,on_order,cost_delta
std::string trace_csv(const EventTrace& trace);

// Whole-run stock movements, warm-up included. Satisfies
// initial_on_hand + delivered == final_on_hand + met.
struct StockLedger {
  std::int64_t initial_on_hand = 0;
  std::int64_t delivered = 0;
  std::int64_t met = 0;
  std::int64_t final_on_hand = 0;
  std::int64_t final_on_order = 0;
  std::int64_t orders_placed = 0;
  std::int64_t orders_delivered = 0;
  std::int64_t min_on_hand = 0;
};

struct SimOutcome {
  double total_cost = 0.0;
  double holding_cost = 0.0;
  double ordering_cost = 0.0;
  double shortage_cost = 0.0;
  std::int64_t units_demanded = 0;
  std::int64_t units_met = 0;
  std::int64_t units_short = 0;
  std::int64_t orders_placed = 0;
  std::int64_t cycles = 0;
  std::int64_t stockout_cycles = 0;
  double fill_rate = 1.0;
  double cycle_service_level = 1.0;
  double avg_on_hand = 0.0;  // mean month-end on-hand
  StockLedger ledger;
};

/// Runs one replication. Each month: (1) due deliveries arrive, (2) demand
/// is served from stock and the remainder is lost and charged, (3) while
/// on-hand + on-order <= rop an order of roq is placed, arriving after a
/// sampled lead time (zero-month lead times arrive immediately), (4) at year
/// end holding is charged. Demand and lead times use separate streams split
/// from config.seed, so demand paths do not depend on the policy.
SimOutcome simulate(const InventoryPolicy& policy, const demandgen::DemandSource& demand,
                    const LeadTimeModel& lead_time, const CostRates& costs,
                    const SimConfig& config, EventTrace* trace = nullptr);

struct ServiceLevels {
  double fill_rate = 1.0;
  double cycle_service_level = 1.0;
};

ServiceLevels measured_service_levels(std::int64_t units_demanded, std::int64_t units_met,
                                      std::int64_t cycles, std::int64_t stockout_cycles);
ServiceLevels measured_service_levels(const SimOutcome& outcome);

enum class Metric {
  total_cost,
  holding_cost,
  ordering_cost,
  shortage_cost,
  units_demanded,
  units_met,
  units_short,
  orders_placed,
  cycles,
  stockout_cycles,
  fill_rate,
  cycle_service_level,
  avg_on_hand,
};
inline constexpr std::size_t kMetricCount = 13;
std::string_view to_string(Metric m);
double metric_value(const SimOutcome& outcome, Metric m);

struct ReplicationSummary {
  std::size_t replications = 0;
  std::array<double, kMetricCount> mean{};
  std::array<double, kMetricCount> stddev{};        // sample (n - 1) deviation
  std::array<double, kMetricCount> ci_halfwidth{};  // 95% Student t
  bool ci_defined = false;                          // false when replications == 1

  double mean_of(Metric m) const { return mean[static_cast<std::size_t>(m)]; }
  double stddev_of(Metric m) const { return stddev[static_cast<std::size_t>(m)]; }
  double ci_of(Metric m) const { return ci_halfwidth[static_cast<std::size_t>(m)]; }
};

/// Seed of replication `index` under a master seed.
std::uint64_t replication_seed(std::uint64_t master, std::size_t index);

ReplicationSummary summarize(std::span<const SimOutcome> outcomes);

/// r independent replications; replication i runs with
/// replication_seed(config.seed, i). Throws InvalidInput when r == 0.
ReplicationSummary replicate(const InventoryPolicy& policy, const demandgen::DemandSource& demand,
                             const LeadTimeModel& lead_time, const CostRates& costs,
                             const SimConfig& config, std::size_t r,
                             std::vector<SimOutcome>* runs = nullptr);

/// Two-sided 95% Student t critical value with the given degrees of freedom.
double t_critical_95(std::size_t dof);

inline constexpr std::string_view kOutcomeHeader =
    "item_id,rop,roq,replications,total_cost_mean,holding_mean,ordering_mean,shortage_mean,"
    "fill_rate_mean,cycle_service_level_mean,avg_on_hand_mean,total_cost_ci_halfwidth\n";
std::string outcome_row(std::string_view item_id, const InventoryPolicy& policy,
                        const ReplicationSummary& summary);

}  // namespace spareopt::simcore
