#include "spareopt/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "spareopt/csv.hpp"
#include "spareopt/error.hpp"
#include "spareopt/rng.hpp"

namespace spareopt::simcore {
namespace {

using demandgen::kMonthsPerYear;

std::int64_t round_half_up(double x) {
  return static_cast<std::int64_t>(std::floor(x + 0.5));
}

std::int64_t to_lead_months(double draw) {
  if (!std::isfinite(draw)) throw ModelError("lead time draw is not finite");
  const std::int64_t months = round_half_up(draw);
  if (months < 0) {
    throw ModelError("negative lead time sampled (" + format_number(draw) + " months)");
  }
  return months;
}

struct OpenOrder {
  int arrival_month;
  std::int64_t qty;
  bool stockout;
  bool counted;  // placed after warm-up
};

}  // namespace

void validate(const InventoryPolicy& policy) {
  if (policy.rop < 0) throw InvalidInput("policy rop must be >= 0");
  if (policy.roq < 1) throw InvalidInput("policy roq must be >= 1");
}

void validate(const CostRates& costs) {
  for (double c : {costs.holding, costs.ordering, costs.shortage}) {
    if (!std::isfinite(c) || c < 0.0) throw InvalidInput("cost rates must be finite and >= 0");
  }
}

HoldingMode parse_holding_mode(std::string_view name) {
  if (name == "year_end") return HoldingMode::year_end;
  if (name == "time_average") return HoldingMode::time_average;
  throw ConfigError("unknown holding mode '" + std::string(name) + "'");
}

ConstantLeadTime::ConstantLeadTime(std::int64_t months) : months_(months) {
  if (months < 0) throw InvalidInput("constant lead time must be >= 0 months");
}

std::int64_t FittedLeadTime::sample_months(Rng& rng) const {
  return to_lead_months(distfit::sample(dist_, rng));
}

EmpiricalLeadTime::EmpiricalLeadTime(std::vector<double> samples) {
  if (samples.empty()) throw InvalidInput("empirical lead time needs at least one sample");
  for (double s : samples) months_.push_back(to_lead_months(s));
}

std::int64_t EmpiricalLeadTime::sample_months(Rng& rng) const {
  return months_[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(months_.size()) - 1))];
}

double EmpiricalLeadTime::mean_months() const {
  double s = 0.0;
  for (auto m : months_) s += static_cast<double>(m);
  return s / static_cast<double>(months_.size());
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::arrival: return "arrival";
    case EventKind::demand: return "demand";
    case EventKind::order: return "order";
    case EventKind::year_end: return "year_end";
  }
  return "unknown";
}

std::string trace_csv(const EventTrace& trace) {
  std::string out = "t_month,event,qty,on_hand,on_order,cost_delta\n";
  for (const auto& e : trace) {
    out += csv_line({std::to_string(e.t_month), std::string(to_string(e.kind)), std::to_string(e.qty),
                     std::to_string(e.on_hand), std::to_string(e.on_order), format_number(e.cost_delta)});
  }
  return out;
}

SimOutcome simulate(const InventoryPolicy& policy, const demandgen::DemandSource& demand,
                    const LeadTimeModel& lead_time, const CostRates& costs, const SimConfig& config,
                    EventTrace* trace) {
  validate(policy);
  validate(costs);
  if (config.horizon_years < 1) throw InvalidInput("horizon_years must be >= 1");
  if (config.warmup_years < 0 || config.warmup_years >= config.horizon_years) {
    throw InvalidInput("warmup_years must lie in [0, horizon_years)");
  }
  const std::int64_t initial = config.initial_on_hand.value_or(policy.rop + policy.roq);
  if (initial < 0) throw InvalidInput("initial on-hand must be >= 0");

  const Rng root(config.seed);
  Rng demand_rng = root.split("demand");
  Rng lead_rng = root.split("lead_time");

  SimOutcome out;
  StockLedger& ledger = out.ledger;
  ledger.initial_on_hand = initial;
  ledger.min_on_hand = initial;

  std::int64_t on_hand = initial;
  std::int64_t on_order = 0;
  std::vector<OpenOrder> open;
  double holding_pending = 0.0;
  double on_hand_month_sum = 0.0;
  int measured_months = 0;
  const int first_measured_month = config.warmup_years * kMonthsPerYear + 1;

  auto record = [&](int t, EventKind kind, std::int64_t qty, double cost) {
    if (trace) trace->push_back({t, kind, qty, on_hand, on_order, cost});
  };

  auto deliver_due = [&](int t) {
    for (auto it = open.begin(); it != open.end();) {
      if (it->arrival_month > t) {
        ++it;
        continue;
      }
      on_hand += it->qty;
      on_order -= it->qty;
      ledger.delivered += it->qty;
      ledger.orders_delivered += 1;
      record(t, EventKind::arrival, it->qty, 0.0);
      it = open.erase(it);
    }
  };

  for (int year = 0; year < config.horizon_years; ++year) {
    const auto schedule = demand.year(year, demand_rng);
    for (int m = 0; m < kMonthsPerYear; ++m) {
      const int t = year * kMonthsPerYear + m + 1;
      const bool measured = t >= first_measured_month;

      deliver_due(t);

      const std::int64_t d = schedule.quantities[static_cast<std::size_t>(m)];
      if (d < 0) throw ModelError("demand source produced negative demand");
      if (d > 0) {
        const std::int64_t met = std::min(on_hand, d);
        const std::int64_t short_units = d - met;
        on_hand -= met;
        ledger.met += met;
        double cost = 0.0;
        if (short_units > 0) {
          for (auto& o : open) {
            if (!o.stockout) {
              o.stockout = true;
              if (o.counted) out.stockout_cycles += 1;
            }
          }
        }
        if (measured) {
          cost = static_cast<double>(short_units) * costs.shortage;
          out.units_demanded += d;
          out.units_met += met;
          out.units_short += short_units;
          out.shortage_cost += cost;
        }
        record(t, EventKind::demand, d, cost);
      }

      while (on_hand + on_order <= policy.rop) {
        const std::int64_t lead = lead_time.sample_months(lead_rng);
        if (lead < 0) throw ModelError("negative lead time sampled");
        on_order += policy.roq;
        ledger.orders_placed += 1;
        const double cost = measured ? costs.ordering : 0.0;
        if (measured) {
          out.orders_placed += 1;
          out.cycles += 1;
          out.ordering_cost += cost;
        }
        open.push_back({t + static_cast<int>(lead), policy.roq, false, measured});
        record(t, EventKind::order, policy.roq, cost);
        if (lead == 0) deliver_due(t);
      }

      ledger.min_on_hand = std::min(ledger.min_on_hand, on_hand);
      if (measured) {
        on_hand_month_sum += static_cast<double>(on_hand);
        measured_months += 1;
        if (config.holding_mode == HoldingMode::time_average) {
          holding_pending += static_cast<double>(on_hand) * costs.holding / kMonthsPerYear;
        }
      }

      if (m == kMonthsPerYear - 1) {
        double cost = 0.0;
        if (measured) {
          cost = (config.holding_mode == HoldingMode::year_end)
                     ? static_cast<double>(on_hand) * costs.holding
                     : holding_pending;
          out.holding_cost += cost;
        }
        holding_pending = 0.0;
        record(t, EventKind::year_end, on_hand, cost);
      }
    }
  }

  ledger.final_on_hand = on_hand;
  ledger.final_on_order = on_order;
  out.total_cost = out.holding_cost + out.ordering_cost + out.shortage_cost;
  out.avg_on_hand = measured_months > 0 ? on_hand_month_sum / measured_months : 0.0;
  const auto levels = measured_service_levels(out);
  out.fill_rate = levels.fill_rate;
  out.cycle_service_level = levels.cycle_service_level;
  return out;
}

ServiceLevels measured_service_levels(std::int64_t units_demanded, std::int64_t units_met,
                                      std::int64_t cycles, std::int64_t stockout_cycles) {
  ServiceLevels s;
  s.fill_rate = units_demanded > 0
                    ? static_cast<double>(units_met) / static_cast<double>(units_demanded)
                    : 1.0;
  s.cycle_service_level =
      cycles > 0 ? 1.0 - static_cast<double>(stockout_cycles) / static_cast<double>(cycles) : 1.0;
  return s;
}

ServiceLevels measured_service_levels(const SimOutcome& o) {
  return measured_service_levels(o.units_demanded, o.units_met, o.cycles, o.stockout_cycles);
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::total_cost: return "total_cost";
    case Metric::holding_cost: return "holding_cost";
    case Metric::ordering_cost: return "ordering_cost";
    case Metric::shortage_cost: return "shortage_cost";
    case Metric::units_demanded: return "units_demanded";
    case Metric::units_met: return "units_met";
    case Metric::units_short: return "units_short";
    case Metric::orders_placed: return "orders_placed";
    case Metric::cycles: return "cycles";
    case Metric::stockout_cycles: return "stockout_cycles";
    case Metric::fill_rate: return "fill_rate";
    case Metric::cycle_service_level: return "cycle_service_level";
    case Metric::avg_on_hand: return "avg_on_hand";
  }
  return "unknown";
}

double metric_value(const SimOutcome& o, Metric m) {
  switch (m) {
    case Metric::total_cost: return o.total_cost;
    case Metric::holding_cost: return o.holding_cost;
    case Metric::ordering_cost: return o.ordering_cost;
    case Metric::shortage_cost: return o.shortage_cost;
    case Metric::units_demanded: return static_cast<double>(o.units_demanded);
    case Metric::units_met: return static_cast<double>(o.units_met);
    case Metric::units_short: return static_cast<double>(o.units_short);
    case Metric::orders_placed: return static_cast<double>(o.orders_placed);
    case Metric::cycles: return static_cast<double>(o.cycles);
    case Metric::stockout_cycles: return static_cast<double>(o.stockout_cycles);
    case Metric::fill_rate: return o.fill_rate;
    case Metric::cycle_service_level: return o.cycle_service_level;
    case Metric::avg_on_hand: return o.avg_on_hand;
  }
  return 0.0;
}

std::uint64_t replication_seed(std::uint64_t master, std::size_t index) {
  return derive_seed(master, "replication", index);
}

double t_critical_95(std::size_t dof) {
  if (dof == 0) return std::numeric_limits<double>::quiet_NaN();
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(boost::math::complement(dist, 0.025));
}

ReplicationSummary summarize(std::span<const SimOutcome> outcomes) {
  if (outcomes.empty()) throw InvalidInput("summarize: no outcomes");
  ReplicationSummary s;
  s.replications = outcomes.size();
  s.ci_defined = outcomes.size() > 1;
  const double n = static_cast<double>(outcomes.size());
  const double t = s.ci_defined ? t_critical_95(outcomes.size() - 1) : 0.0;
  for (std::size_t k = 0; k < kMetricCount; ++k) {
    const auto metric = static_cast<Metric>(k);
    double sum = 0.0;
    for (const auto& o : outcomes) sum += metric_value(o, metric);
    const double mu = sum / n;
    double ss = 0.0;
    for (const auto& o : outcomes) {
      const double dev = metric_value(o, metric) - mu;
      ss += dev * dev;
    }
    s.mean[k] = mu;
    s.stddev[k] = s.ci_defined ? std::sqrt(ss / (n - 1.0)) : 0.0;
    s.ci_halfwidth[k] = s.ci_defined ? t * s.stddev[k] / std::sqrt(n) : 0.0;
  }
  return s;
}

ReplicationSummary replicate(const InventoryPolicy& policy, const demandgen::DemandSource& demand,
                             const LeadTimeModel& lead_time, const CostRates& costs,
                             const SimConfig& config, std::size_t r, std::vector<SimOutcome>* runs) {
  if (r == 0) throw InvalidInput("replicate: replication count must be >= 1");
  std::vector<SimOutcome> outcomes;
  outcomes.reserve(r);
  for (std::size_t i = 0; i < r; ++i) {
    SimConfig child = config;
    child.seed = replication_seed(config.seed, i);
    outcomes.push_back(simulate(policy, demand, lead_time, costs, child));
  }
  auto summary = summarize(outcomes);
  if (runs) *runs = std::move(outcomes);
  return summary;
}

std::string outcome_row(std::string_view item_id, const InventoryPolicy& policy,
                        const ReplicationSummary& s) {
  check_csv_identifier(item_id);
  return csv_line({std::string(item_id), std::to_string(policy.rop), std::to_string(policy.roq),
                   std::to_string(s.replications), format_number(s.mean_of(Metric::total_cost)),
                   format_number(s.mean_of(Metric::holding_cost)),
                   format_number(s.mean_of(Metric::ordering_cost)),
                   format_number(s.mean_of(Metric::shortage_cost)),
                   format_number(s.mean_of(Metric::fill_rate)),
                   format_number(s.mean_of(Metric::cycle_service_level)),
                   format_number(s.mean_of(Metric::avg_on_hand)),
                   format_number(s.ci_of(Metric::total_cost))});
}

}  // namespace spareopt::simcore
