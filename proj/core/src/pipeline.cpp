#include "spareopt/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "spareopt/csv.hpp"
#include "spareopt/error.hpp"
#include "spareopt/rng.hpp"

#ifndef SPAREOPT_VERSION
#define SPAREOPT_VERSION "0.0.0"
#endif

namespace spareopt::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> known,
                         std::string_view where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

std::vector<distfit::Family> parse_families(const json& obj, const char* key,
                                            std::vector<distfit::Family> fallback) {
  if (!obj.contains(key)) return fallback;
  std::vector<distfit::Family> out;
  for (const auto& f : obj.at(key)) out.push_back(distfit::parse_family(f.get<std::string>()));
  if (out.empty()) throw ConfigError(std::string(key) + " must not be empty");
  return out;
}

std::string file_safe(std::string_view id) {
  std::string out;
  for (char c : id) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  }
  return out;
}

std::string lead_kind_name(LeadTimeKind k) {
  switch (k) {
    case LeadTimeKind::constant: return "constant";
    case LeadTimeKind::empirical: return "empirical";
    case LeadTimeKind::fitted: return "fitted";
  }
  return "unknown";
}

// Per-item derived seeds; listed in the manifest.
std::uint64_t item_seed(std::uint64_t master, std::string_view id, std::string_view purpose) {
  return derive_seed(derive_seed(master, id), purpose);
}

}  // namespace

std::string_view version() { return SPAREOPT_VERSION; }

PipelineConfig parse_pipeline_config(std::string_view json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("pipeline config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("pipeline config must be a JSON object");
  reject_unknown_keys(doc,
                      {"items_csv", "consumption_csv", "lead_time_csv", "ahp_matrix", "output_dir",
                       "weight_method", "abc_cuts", "consumption_basis", "demand_families",
                       "lead_time_families", "default_lead_time_months", "demand_source", "costs",
                       "search", "replications", "simulation", "service_levels", "seed"},
                      "pipeline config");

  PipelineConfig c;
  c.config_hash = hex64(fnv1a64(json_text));
  if (!doc.contains("items_csv")) throw ConfigError("pipeline config: items_csv is required");
  if (!doc.contains("ahp_matrix")) throw ConfigError("pipeline config: ahp_matrix is required");
  c.items_csv = resolve(base_dir, doc.at("items_csv").get<std::string>());
  c.ahp_matrix = resolve(base_dir, doc.at("ahp_matrix").get<std::string>());
  if (auto p = get_or<std::string>(doc, "consumption_csv", ""); !p.empty()) c.consumption_csv = resolve(base_dir, p);
  if (auto p = get_or<std::string>(doc, "lead_time_csv", ""); !p.empty()) c.lead_time_csv = resolve(base_dir, p);
  c.output_dir = resolve(base_dir, get_or<std::string>(doc, "output_dir", "out"));

  c.weight_method = ahp::parse_weight_method(get_or<std::string>(doc, "weight_method", "eigenvector"));
  if (doc.contains("abc_cuts")) {
    const auto cuts = doc.at("abc_cuts").get<std::vector<double>>();
    if (cuts.size() != 2) throw ConfigError("abc_cuts must hold two cumulative shares");
    c.cuts = {cuts[0], cuts[1]};
  }
  if (!(c.cuts.a > 0.0 && c.cuts.a < c.cuts.b && c.cuts.b < 1.0)) {
    throw ConfigError("abc_cuts must satisfy 0 < a < b < 1");
  }
  c.consumption_basis = classify::parse_consumption_basis(get_or<std::string>(doc, "consumption_basis", "mean"));
  c.demand_families = parse_families(doc, "demand_families",
                                     {std::begin(distfit::kAllFamilies), std::end(distfit::kAllFamilies)});
  c.lead_time_families = parse_families(
      doc, "lead_time_families",
      {distfit::Family::poisson, distfit::Family::exponential, distfit::Family::lognormal,
       distfit::Family::gamma, distfit::Family::uniform});
  c.default_lead_time_months = get_or<double>(doc, "default_lead_time_months", 2.0);
  if (!(c.default_lead_time_months >= 0.0)) throw ConfigError("default_lead_time_months must be >= 0");

  const auto source = get_or<std::string>(doc, "demand_source", "roulette");
  if (source == "roulette") {
    c.demand_source = DemandSourceKind::roulette;
  } else if (source == "fitted") {
    c.demand_source = DemandSourceKind::fitted;
  } else {
    throw ConfigError("demand_source must be 'roulette' or 'fitted'");
  }

  if (doc.contains("costs")) {
    const auto& j = doc.at("costs");
    reject_unknown_keys(j, {"holding_rate", "ordering_cost", "shortage_multiplier"}, "costs");
    c.costs.holding_rate = get_or<double>(j, "holding_rate", c.costs.holding_rate);
    c.costs.ordering_cost = get_or<double>(j, "ordering_cost", c.costs.ordering_cost);
    c.costs.shortage_multiplier = get_or<double>(j, "shortage_multiplier", c.costs.shortage_multiplier);
  }
  for (double v : {c.costs.holding_rate, c.costs.ordering_cost, c.costs.shortage_multiplier}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("cost parameters must be finite and >= 0");
  }
  if (doc.contains("search")) {
    const auto& j = doc.at("search");
    reject_unknown_keys(j, {"rop_sd_multiple", "roq_years_of_demand", "grid_step"}, "search");
    c.search.rop_sd_multiple = get_or<double>(j, "rop_sd_multiple", c.search.rop_sd_multiple);
    c.search.roq_years_of_demand = get_or<double>(j, "roq_years_of_demand", c.search.roq_years_of_demand);
    if (j.contains("grid_step") && !j.at("grid_step").is_null()) {
      c.grid_step = j.at("grid_step").get<std::int64_t>();
      if (*c.grid_step < 1) throw ConfigError("search.grid_step must be >= 1");
    }
  }
  if (doc.contains("replications")) {
    const auto& j = doc.at("replications");
    reject_unknown_keys(j, {"screen", "refine", "curve"}, "replications");
    c.screen_reps = get_or<std::size_t>(j, "screen", c.screen_reps);
    c.refine_reps = get_or<std::size_t>(j, "refine", c.refine_reps);
    c.curve_reps = get_or<std::size_t>(j, "curve", c.curve_reps);
  }
  if (c.screen_reps == 0 || c.refine_reps == 0 || c.curve_reps == 0) {
    throw ConfigError("replication budgets must be >= 1");
  }
  if (doc.contains("simulation")) {
    const auto& j = doc.at("simulation");
    reject_unknown_keys(j, {"horizon_years", "warmup_years", "holding_mode"}, "simulation");
    c.horizon_years = get_or<int>(j, "horizon_years", c.horizon_years);
    c.warmup_years = get_or<int>(j, "warmup_years", c.warmup_years);
    c.holding_mode = simcore::parse_holding_mode(get_or<std::string>(j, "holding_mode", "year_end"));
  }
  if (c.horizon_years < 1 || c.warmup_years < 0 || c.warmup_years >= c.horizon_years) {
    throw ConfigError("simulation: need horizon_years >= 1 and 0 <= warmup_years < horizon_years");
  }
  c.alphas = doc.contains("service_levels") ? doc.at("service_levels").get<std::vector<double>>()
                                            : std::vector<double>(std::begin(svclevel::kDefaultAlphas),
                                                                  std::end(svclevel::kDefaultAlphas));
  for (double a : c.alphas) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("service_levels must lie in (0, 1)");
  }
  c.seed = get_or<std::uint64_t>(doc, "seed", c.seed);
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  return parse_pipeline_config(read_text_file(path), path.parent_path());
}

Inputs load_inputs(const PipelineConfig& config) {
  Inputs in;
  try {
    in.items = classify::load_item_master(config.items_csv);
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  in.criteria = ahp::load_criteria_json(config.ahp_matrix);
  if (in.criteria.criteria.size() != classify::kCriteriaCount) {
    throw ConfigError("criteria document must define " + std::to_string(classify::kCriteriaCount) +
                      " criteria to match the item master");
  }
  std::set<std::string> ids;
  for (const auto& item : in.items) ids.insert(item.id);

  if (config.consumption_csv) {
    const auto table = read_csv(*config.consumption_csv);
    const std::string src = config.consumption_csv->filename().string();
    const auto c_id = table.column("id", src);
    const auto c_year = table.column("year", src);
    const auto c_month = table.column("month", src);
    const auto c_qty = table.column("qty", src);
    std::map<std::string, std::vector<std::pair<std::pair<double, double>, double>>> rows;
    for (const auto& r : table.rows) {
      if (!ids.contains(r[c_id])) throw ConfigError(src + ": unknown item id '" + r[c_id] + "'");
      const double qty = parse_number(r[c_qty], src);
      if (!(qty >= 0.0)) throw ConfigError(src + ": negative quantity for '" + r[c_id] + "'");
      rows[r[c_id]].push_back({{parse_number(r[c_year], src), parse_number(r[c_month], src)}, qty});
    }
    for (auto& [id, series] : rows) {
      std::sort(series.begin(), series.end());
      auto& out = in.monthly_consumption[id];
      for (const auto& s : series) out.push_back(s.second);
    }
  }
  if (config.lead_time_csv) {
    const auto table = read_csv(*config.lead_time_csv);
    const std::string src = config.lead_time_csv->filename().string();
    const auto c_id = table.column("id", src);
    const auto c_lead = table.column("lead_time_months", src);
    for (const auto& r : table.rows) {
      if (!ids.contains(r[c_id])) throw ConfigError(src + ": unknown item id '" + r[c_id] + "'");
      const double lead = parse_number(r[c_lead], src);
      if (!(lead >= 0.0) || !std::isfinite(lead)) throw ConfigError(src + ": invalid lead time for '" + r[c_id] + "'");
      in.lead_time_samples[r[c_id]].push_back(lead);
    }
  }
  return in;
}

Classification classify_items(const PipelineConfig& config, const Inputs& inputs) {
  Classification c;
  c.weights = ahp::compute_weights(inputs.criteria.matrix, config.weight_method);
  c.consistency = ahp::consistency(inputs.criteria.matrix, c.weights);
  c.scored = classify::score_items(inputs.items, c.weights, config.consumption_basis);
  c.assignments = classify::abc_classify(c.scored, config.cuts);
  return c;
}

FitOutcome fit_item(const PipelineConfig& config, const Inputs& inputs, const classify::ItemRecord& item) {
  FitOutcome out;
  std::vector<double> series;
  if (auto it = inputs.monthly_consumption.find(item.id); it != inputs.monthly_consumption.end()) {
    series = it->second;
    out.demand_period_months = 1.0;
  } else {
    series = item.annual_consumption;
    out.demand_period_months = 12.0;
  }
  if (series.size() < distfit::kMinObservations) {
    throw InvalidInput("insufficient data: " + std::to_string(series.size()) + " demand observations, need " +
                       std::to_string(distfit::kMinObservations));
  }
  out.demand = distfit::select_best(series, config.demand_families);

  if (auto it = inputs.lead_time_samples.find(item.id); it != inputs.lead_time_samples.end()) {
    out.lead_time_samples = it->second;
  } else {
    out.lead_time_samples = {config.default_lead_time_months};
  }
  const auto& lt = out.lead_time_samples;
  const bool constant = std::all_of(lt.begin(), lt.end(), [&](double v) { return v == lt.front(); });
  if (constant) {
    out.lead_time_kind = LeadTimeKind::constant;
    out.lead_time_samples = {lt.front()};
  } else if (lt.size() >= distfit::kMinObservations) {
    out.lead_time_kind = LeadTimeKind::fitted;
    out.lead_time = distfit::select_best(lt, config.lead_time_families);
  } else {
    out.lead_time_kind = LeadTimeKind::empirical;
  }
  return out;
}

std::vector<ItemFailure> write_fit_reports(const PipelineConfig& config, const Inputs& inputs,
                                           const fs::path& out_dir) {
  std::string demand_rows(distfit::kFitReportHeader);
  std::string lead_rows(distfit::kFitReportHeader);
  std::vector<ItemFailure> failures;
  for (const auto& item : inputs.items) {
    try {
      const auto fit = fit_item(config, inputs, item);
      demand_rows += distfit::fit_report_rows(item.id, fit.demand);
      if (fit.lead_time) lead_rows += distfit::fit_report_rows(item.id, *fit.lead_time);
    } catch (const Error& e) {
      failures.push_back({item.id, "fit", e.what()});
    }
  }
  write_text_file(out_dir / "demand_fits.csv", demand_rows);
  write_text_file(out_dir / "lead_time_fits.csv", lead_rows);
  return failures;
}

namespace {

struct ItemArtifacts {
  std::string demand_fit_rows;
  std::string lead_fit_rows;
  std::string policy_row;
  std::string curve_rows;
  std::string evaluation_log;
};

std::shared_ptr<const simcore::LeadTimeModel> make_lead_model(const FitOutcome& fit) {
  switch (fit.lead_time_kind) {
    case LeadTimeKind::constant:
      return std::make_shared<simcore::ConstantLeadTime>(
          static_cast<std::int64_t>(std::floor(fit.lead_time_samples.front() + 0.5)));
    case LeadTimeKind::empirical:
      return std::make_shared<simcore::EmpiricalLeadTime>(fit.lead_time_samples);
    case LeadTimeKind::fitted:
      return std::make_shared<simcore::FittedLeadTime>(fit.lead_time->best());
  }
  return nullptr;
}

// Stages 2 and 3 for one class A item. Throws on failure; `stage` names the
// stage that was running.
ItemReport process_item(const PipelineConfig& config, const Inputs& inputs, const classify::ItemRecord& item,
                        ItemArtifacts& art, std::string& stage) {
  ItemReport report;
  report.id = item.id;

  stage = "fit";
  const auto fit = fit_item(config, inputs, item);
  report.demand_fit = fit.demand.best();
  art.demand_fit_rows = distfit::fit_report_rows(item.id, fit.demand);
  report.demand_period_months = fit.demand_period_months;
  report.lead_time_kind = fit.lead_time_kind;
  if (fit.lead_time) report.lead_time_fit = fit.lead_time->best();
  if (fit.lead_time) art.lead_fit_rows = distfit::fit_report_rows(item.id, *fit.lead_time);

  stage = "optimize";
  const auto lead_model = make_lead_model(fit);
  report.lead_time_mean_months = lead_model->mean_months();
  std::shared_ptr<const demandgen::DemandSource> demand;
  if (config.demand_source == DemandSourceKind::roulette) {
    demand = std::make_shared<demandgen::RouletteDemand>(demandgen::build_histogram(item.annual_consumption));
  } else {
    if (fit.demand_period_months != 1.0) {
      throw ModelError("fitted demand source needs monthly consumption history");
    }
    demand = std::make_shared<demandgen::FittedMonthlyDemand>(report.demand_fit);
  }
  const simcore::CostRates costs{config.costs.holding_rate * item.unit_price, config.costs.ordering_cost,
                                 config.costs.shortage_multiplier * item.unit_price};

  const double a = report.lead_time_mean_months / fit.demand_period_months;
  if (!(a > 0.0)) throw ModelError("lead time is zero; lead-time demand is undefined");
  const auto ltd = svclevel::lead_time_demand(report.demand_fit, a);

  const double annual_mean = std::accumulate(item.annual_consumption.begin(), item.annual_consumption.end(), 0.0) /
                             static_cast<double>(item.annual_consumption.size());
  report.search_space.rop = {0, std::max<std::int64_t>(
                                    1, static_cast<std::int64_t>(std::ceil(
                                           ltd.mean + config.search.rop_sd_multiple * std::sqrt(ltd.variance))))};
  report.search_space.roq = {1, std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(
                                                              config.search.roq_years_of_demand * annual_mean)))};

  simcore::SimConfig base;
  base.horizon_years = config.horizon_years;
  base.warmup_years = config.warmup_years;
  base.holding_mode = config.holding_mode;

  optimizer::OptimizerConfig oc;
  oc.screen_reps = config.screen_reps;
  oc.refine_reps = config.refine_reps;
  oc.grid_step = config.grid_step;
  oc.seed = item_seed(config.seed, item.id, "optimize");
  const auto evaluator = optimizer::simulation_evaluator(*demand, *lead_model, costs, base);
  const auto result = optimizer::optimize(report.search_space, evaluator, oc);
  report.best_policy = result.best;
  report.optimizer_cost = result.best_cost_mean;
  report.optimizer_ci = result.best_cost_ci;
  art.evaluation_log = optimizer::evaluation_log_csv(result);

  simcore::SimConfig at_best = base;
  at_best.seed = oc.seed;
  const auto summary = simcore::replicate(result.best, *demand, *lead_model, costs, at_best, config.refine_reps);
  art.policy_row = simcore::outcome_row(item.id, result.best, summary);

  stage = "service_curve";
  simcore::SimConfig curve_cfg = base;
  curve_cfg.seed = item_seed(config.seed, item.id, "service_curve");
  const svclevel::CurveModels models{*demand, *lead_model, ltd};
  const auto points = svclevel::service_curve(models, costs, result.best.roq, config.alphas, curve_cfg,
                                              config.curve_reps);
  art.curve_rows = svclevel::curve_rows(item.id, points);
  report.curve_file = "service_curve.csv";
  return report;
}

}  // namespace

RunSummary run_pipeline(const PipelineConfig& config) {
  const Inputs inputs = load_inputs(config);
  RunSummary run;
  const fs::path& out = config.output_dir;
  std::vector<std::pair<std::string, std::string>> files;  // name, contents

  // Stage 1
  const auto cls = classify_items(config, inputs);
  files.emplace_back("weights.csv", ahp::weights_csv(inputs.criteria.criteria, cls.weights));
  files.emplace_back("classification.csv", classify::classification_csv(cls.scored, cls.assignments));

  run.counts.total = inputs.items.size();
  std::map<std::string_view, const classify::ItemRecord*> by_id;
  for (const auto& item : inputs.items) by_id[item.id] = &item;

  std::string demand_fits(distfit::kFitReportHeader);
  std::string lead_fits(distfit::kFitReportHeader);
  std::string policies(simcore::kOutcomeHeader);
  std::string curves(svclevel::kCurveHeader);
  std::string reports =
      "id,class,status,demand_family,demand_params,demand_period_months,lead_time_model,lead_time_family,"
      "lead_time_mean_months,rop,roq,cost_mean,cost_ci,failure_stage,reason\n";
  json item_seeds = json::object();

  for (const auto& a : cls.assignments) {
    switch (a.abc) {
      case classify::AbcClass::A: ++run.counts.class_a; break;
      case classify::AbcClass::B: ++run.counts.class_b; break;
      case classify::AbcClass::C: ++run.counts.class_c; break;
    }
    if (a.abc != classify::AbcClass::A) continue;

    // Stages 2-3, class A only.
    ++run.counts.processed;
    const auto& item = *by_id.at(a.id);
    item_seeds[item.id] = {{"optimize", item_seed(config.seed, item.id, "optimize")},
                           {"service_curve", item_seed(config.seed, item.id, "service_curve")}};
    ItemArtifacts art;
    std::string stage;
    try {
      auto report = process_item(config, inputs, item, art, stage);
      report.abc = a.abc;
      ++run.counts.succeeded;
      demand_fits += art.demand_fit_rows;
      lead_fits += art.lead_fit_rows;
      policies += art.policy_row;
      curves += art.curve_rows;
      files.emplace_back("evaluations/" + file_safe(item.id) + ".csv", art.evaluation_log);
      reports += csv_line({item.id, "A", "ok",
                           std::string(distfit::to_string(report.demand_fit.family)),
                           csv_quote(distfit::params_json(report.demand_fit)),
                           format_number(report.demand_period_months), lead_kind_name(report.lead_time_kind),
                           report.lead_time_fit ? std::string(distfit::to_string(report.lead_time_fit->family)) : "",
                           format_number(report.lead_time_mean_months), std::to_string(report.best_policy.rop),
                           std::to_string(report.best_policy.roq), format_number(report.optimizer_cost),
                           format_number(report.optimizer_ci), "", ""});
      run.reports.push_back(std::move(report));
    } catch (const Error& e) {
      ++run.counts.failed;
      run.failures.push_back({item.id, stage, e.what()});
      reports += csv_line({item.id, "A", "failed", "", "", "", "", "", "", "", "", "", "", stage,
                           csv_quote(e.what())});
    }
  }

  files.emplace_back("demand_fits.csv", demand_fits);
  files.emplace_back("lead_time_fits.csv", lead_fits);
  files.emplace_back("policies.csv", policies);
  files.emplace_back("service_curve.csv", curves);
  files.emplace_back("item_reports.csv", reports);

  std::sort(files.begin(), files.end());
  for (const auto& [name, contents] : files) {
    write_text_file(out / name, contents);
    run.files.push_back(name);
  }

  json failures = json::array();
  for (const auto& f : run.failures) failures.push_back({{"id", f.id}, {"stage", f.stage}, {"reason", f.reason}});
  json manifest;
  manifest["version"] = std::string(version());
  manifest["seed"] = config.seed;
  manifest["config_hash"] = config.config_hash;
  manifest["item_counts"] = {{"total", run.counts.total},         {"class_a", run.counts.class_a},
                             {"class_b", run.counts.class_b},     {"class_c", run.counts.class_c},
                             {"processed", run.counts.processed}, {"succeeded", run.counts.succeeded},
                             {"failed", run.counts.failed}};
  manifest["ahp"] = {{"method", std::string(ahp::to_string(cls.weights.method))},
                     {"weights", cls.weights.weights},
                     {"lambda_max", cls.consistency.lambda_max},
                     {"inconsistency_index", cls.consistency.ii},
                     {"inconsistency_ratio", cls.consistency.ir},
                     {"acceptable", cls.consistency.acceptable}};
  manifest["item_seeds"] = item_seeds;
  manifest["failures"] = failures;
  manifest["files"] = run.files;
  write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
  run.manifest = std::move(manifest);
  return run;
}

}  // namespace spareopt::pipeline
