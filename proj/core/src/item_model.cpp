#include <algorithm>
#include <cmath>

#include "spareopt/csv.hpp"
#include "spareopt/error.hpp"
#include "spareopt/pipeline.hpp"

namespace spareopt::pipeline {
namespace {
using nlohmann::json;

void only_keys(const json& obj, std::initializer_list<std::string_view> known, std::string_view where) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

const json& required(const json& obj, const char* key, std::string_view where) {
  if (!obj.contains(key)) throw ConfigError(std::string(where) + ": '" + key + "' is required");
  return obj.at(key);
}

distfit::FittedDistribution parse_distribution(const json& j, std::string_view where) {
  const auto family = distfit::parse_family(required(j, "family", where).get<std::string>());
  const auto& params = required(j, "params", where);
  std::vector<double> values;
  const auto names = distfit::parameter_names(family);
  if (params.is_array()) {
    values = params.get<std::vector<double>>();
  } else {
    for (auto name : names) {
      values.push_back(required(params, std::string(name).c_str(), where).get<double>());
    }
  }
  try {
    return distfit::make_distribution(family, std::move(values));
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string(where) + ": " + e.what());
  }
}

std::shared_ptr<const demandgen::DemandSource> parse_demand(const json& j, ItemModel& m) {
  const auto type = required(j, "type", "demand").get<std::string>();
  if (type == "roulette") {
    only_keys(j, {"type", "annual_history", "bins"}, "demand");
    const auto history = required(j, "annual_history", "demand").get<std::vector<double>>();
    std::optional<std::size_t> bins;
    if (j.contains("bins")) bins = j.at("bins").get<std::size_t>();
    return std::make_shared<demandgen::RouletteDemand>(demandgen::build_histogram(history, bins));
  }
  if (type == "fitted") {
    only_keys(j, {"type", "family", "params"}, "demand");
    auto d = parse_distribution(j, "demand");
    m.demand_distribution = d;
    m.demand_period_months = 1.0;
    return std::make_shared<demandgen::FittedMonthlyDemand>(std::move(d));
  }
  if (type == "constant") {
    only_keys(j, {"type", "per_month"}, "demand");
    return std::make_shared<demandgen::ConstantDemand>(required(j, "per_month", "demand").get<std::int64_t>());
  }
  if (type == "schedule") {
    only_keys(j, {"type", "months"}, "demand");
    const auto months = required(j, "months", "demand").get<std::vector<std::int64_t>>();
    return std::make_shared<demandgen::ScheduledDemand>(demandgen::ScheduledDemand::from_months(months));
  }
  throw ConfigError("demand.type must be roulette, fitted, constant or schedule");
}

std::shared_ptr<const simcore::LeadTimeModel> parse_lead_time(const json& j) {
  const auto type = required(j, "type", "lead_time").get<std::string>();
  if (type == "constant") {
    only_keys(j, {"type", "months"}, "lead_time");
    return std::make_shared<simcore::ConstantLeadTime>(required(j, "months", "lead_time").get<std::int64_t>());
  }
  if (type == "fitted") {
    only_keys(j, {"type", "family", "params"}, "lead_time");
    return std::make_shared<simcore::FittedLeadTime>(parse_distribution(j, "lead_time"));
  }
  if (type == "empirical") {
    only_keys(j, {"type", "samples"}, "lead_time");
    return std::make_shared<simcore::EmpiricalLeadTime>(
        required(j, "samples", "lead_time").get<std::vector<double>>());
  }
  throw ConfigError("lead_time.type must be constant, fitted or empirical");
}

optimizer::IntRange parse_range(const json& j, std::string_view where) {
  const auto v = j.get<std::vector<std::int64_t>>();
  if (v.size() != 2) throw ConfigError(std::string(where) + " must be [min, max]");
  return {v[0], v[1]};
}

}  // namespace

ItemModel parse_item_model(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("item model: ") + e.what());
  }
  ItemModel m;
  try {
    only_keys(doc,
              {"item_id", "demand", "demand_distribution", "lead_time", "costs", "policy", "simulation",
               "search", "service", "trace"},
              "item model");
    if (doc.contains("item_id")) m.item_id = doc.at("item_id").get<std::string>();
    m.demand = parse_demand(required(doc, "demand", "item model"), m);
    m.lead_time = parse_lead_time(required(doc, "lead_time", "item model"));
    if (doc.contains("demand_distribution")) {
      const auto& j = doc.at("demand_distribution");
      only_keys(j, {"family", "params", "period_months"}, "demand_distribution");
      m.demand_distribution = parse_distribution(j, "demand_distribution");
      m.demand_period_months = j.value("period_months", 1.0);
      if (!(m.demand_period_months > 0.0)) throw ConfigError("demand_distribution.period_months must be > 0");
    }

    const auto& costs = required(doc, "costs", "item model");
    only_keys(costs, {"holding", "ordering", "shortage"}, "costs");
    m.costs = {required(costs, "holding", "costs").get<double>(), required(costs, "ordering", "costs").get<double>(),
               required(costs, "shortage", "costs").get<double>()};
    simcore::validate(m.costs);

    if (doc.contains("policy")) {
      const auto& j = doc.at("policy");
      only_keys(j, {"rop", "roq"}, "policy");
      m.policy = {required(j, "rop", "policy").get<std::int64_t>(), required(j, "roq", "policy").get<std::int64_t>()};
    }
    if (doc.contains("simulation")) {
      const auto& j = doc.at("simulation");
      only_keys(j, {"horizon_years", "initial_on_hand", "warmup_years", "holding_mode", "replications", "seed"},
                "simulation");
      m.sim.horizon_years = j.value("horizon_years", m.sim.horizon_years);
      if (j.contains("initial_on_hand")) m.sim.initial_on_hand = j.at("initial_on_hand").get<std::int64_t>();
      m.sim.warmup_years = j.value("warmup_years", 0);
      if (j.contains("holding_mode")) {
        m.sim.holding_mode = simcore::parse_holding_mode(j.at("holding_mode").get<std::string>());
      }
      m.replications = j.value("replications", m.replications);
      m.sim.seed = j.value("seed", m.sim.seed);
    }
    if (doc.contains("search")) {
      const auto& j = doc.at("search");
      only_keys(j, {"rop", "roq", "screen_reps", "refine_reps", "grid_step"}, "search");
      optimizer::SearchSpace space{parse_range(required(j, "rop", "search"), "search.rop"),
                                   parse_range(required(j, "roq", "search"), "search.roq")};
      optimizer::validate(space);
      m.search = space;
      m.optimizer.screen_reps = j.value("screen_reps", m.optimizer.screen_reps);
      m.optimizer.refine_reps = j.value("refine_reps", m.optimizer.refine_reps);
      if (j.contains("grid_step")) m.optimizer.grid_step = j.at("grid_step").get<std::int64_t>();
    }
    m.optimizer.seed = m.sim.seed;
    if (doc.contains("service")) {
      const auto& j = doc.at("service");
      only_keys(j, {"roq", "alphas", "replications"}, "service");
      if (j.contains("roq")) m.curve_roq = j.at("roq").get<std::int64_t>();
      if (j.contains("alphas")) m.alphas = j.at("alphas").get<std::vector<double>>();
      m.curve_replications = j.value("replications", m.curve_replications);
    }
    if (m.alphas.empty()) m.alphas.assign(std::begin(svclevel::kDefaultAlphas), std::end(svclevel::kDefaultAlphas));
    m.trace = doc.value("trace", false);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("item model: ") + e.what());
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("item model: ") + e.what());
  }
  if (m.sim.horizon_years < 1 || m.sim.warmup_years < 0 || m.sim.warmup_years >= m.sim.horizon_years) {
    throw ConfigError("simulation: need horizon_years >= 1 and 0 <= warmup_years < horizon_years");
  }
  if (m.replications == 0 || m.curve_replications == 0) throw ConfigError("replications must be >= 1");
  return m;
}

ItemModel load_item_model(const std::filesystem::path& path) { return parse_item_model(read_text_file(path)); }

}  // namespace spareopt::pipeline
