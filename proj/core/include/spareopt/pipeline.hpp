#pragma once

// End-to-end run: classify every item, then fit, optimize, and build service
// curves for class A items. Also the single-item model documents used by
// the command-line tool.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "spareopt/ahp.hpp"
#include "spareopt/classify.hpp"
#include "spareopt/demandgen.hpp"
#include "spareopt/distfit.hpp"
#include "spareopt/optimizer.hpp"
#include "spareopt/simcore.hpp"
#include "spareopt/svclevel.hpp"

namespace spareopt::pipeline {

std::string_view version();

/// Unit costs derived from an item's price.
struct CostRule {
  double holding_rate = 0.25;        // fraction of unit price per unit-year
  double ordering_cost = 50.0;       // per order
  double shortage_multiplier = 2.0;  // shortage cost per unit = multiplier * price
};

/// rop in [0, ceil(ltd mean + rop_sd_multiple * ltd sd)],
/// roq in [1, ceil(roq_years_of_demand * mean annual demand)].
struct SearchRule {
  double rop_sd_multiple = 4.0;
  double roq_years_of_demand = 2.0;
};

enum class DemandSourceKind { roulette, fitted };

struct PipelineConfig {
  std::filesystem::path items_csv;
  std::optional<std::filesystem::path> consumption_csv;  // id,year,month,qty
  std::optional<std::filesystem::path> lead_time_csv;    // id,lead_time_months
  std::filesystem::path ahp_matrix;
  std::filesystem::path output_dir = "out";

  ahp::WeightMethod weight_method = ahp::WeightMethod::eigenvector;
  classify::AbcCuts cuts;
  classify::ConsumptionBasis consumption_basis = classify::ConsumptionBasis::mean;
  std::vector<distfit::Family> demand_families;
  std::vector<distfit::Family> lead_time_families;
  double default_lead_time_months = 2.0;
  DemandSourceKind demand_source = DemandSourceKind::roulette;
  CostRule costs;
  SearchRule search;
  std::size_t screen_reps = 20;
  std::size_t refine_reps = 100;
  std::size_t curve_reps = 100;
  std::optional<std::int64_t> grid_step;
  int horizon_years = 5;
  int warmup_years = 0;
  simcore::HoldingMode holding_mode = simcore::HoldingMode::year_end;
  std::vector<double> alphas;
  std::uint64_t seed = 42;
  std::string config_hash;  // FNV-1a of the config document text
};

/// Relative paths resolve against base_dir. Throws ConfigError.
PipelineConfig parse_pipeline_config(std::string_view json_text,
                                     const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Every input file, parsed. Loading is all-or-nothing.
struct Inputs {
  std::vector<classify::ItemRecord> items;
  ahp::CriteriaDocument criteria;
  std::map<std::string, std::vector<double>> monthly_consumption;  // per id, in period order
  std::map<std::string, std::vector<double>> lead_time_samples;
};

/// Throws ConfigError for a missing or malformed file, or an empty item file.
Inputs load_inputs(const PipelineConfig& config);

struct Classification {
  ahp::CriterionWeights weights;
  ahp::ConsistencyReport consistency;
  std::vector<classify::ScoredItem> scored;
  std::vector<classify::AbcAssignment> assignments;  // rank order
};

Classification classify_items(const PipelineConfig& config, const Inputs& inputs);

struct ItemFailure {
  std::string id;
  std::string stage;
  std::string reason;
};

enum class LeadTimeKind { constant, empirical, fitted };

struct ItemReport {
  std::string id;
  classify::AbcClass abc = classify::AbcClass::A;
  distfit::FittedDistribution demand_fit;
  double demand_period_months = 1.0;
  LeadTimeKind lead_time_kind = LeadTimeKind::constant;
  std::optional<distfit::FittedDistribution> lead_time_fit;
  double lead_time_mean_months = 0.0;
  optimizer::SearchSpace search_space;
  simcore::InventoryPolicy best_policy;
  double optimizer_cost = 0.0;
  double optimizer_ci = 0.0;
  std::string curve_file;
};

struct ItemCounts {
  std::size_t total = 0;
  std::size_t class_a = 0;
  std::size_t class_b = 0;
  std::size_t class_c = 0;
  std::size_t processed = 0;  // class A items entering stage 2
  std::size_t succeeded = 0;
  std::size_t failed = 0;
};

struct RunSummary {
  ItemCounts counts;
  std::vector<ItemReport> reports;
  std::vector<ItemFailure> failures;
  std::vector<std::string> files;  // written, relative to output_dir
  nlohmann::json manifest;
};

/// Runs all three stages and writes every artifact plus manifest.json under
/// config.output_dir. Per-item failures are recorded, not thrown.
RunSummary run_pipeline(const PipelineConfig& config);

// Stage 2 for one item's data. Each throws spareopt::Error on failure.
struct FitOutcome {
  distfit::FitReport demand;
  double demand_period_months = 1.0;
  LeadTimeKind lead_time_kind = LeadTimeKind::constant;
  std::optional<distfit::FitReport> lead_time;
  std::vector<double> lead_time_samples;  // months; one entry when constant
};

FitOutcome fit_item(const PipelineConfig& config, const Inputs& inputs,
                    const classify::ItemRecord& item);

/// Writes demand_fits.csv and lead_time_fits.csv for every item.
/// Returns failures (stage "fit").
std::vector<ItemFailure> write_fit_reports(const PipelineConfig& config, const Inputs& inputs,
                                           const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------
// Single-item model document for the simulate / optimize / service-curve
// commands.

struct ItemModel {
  std::string item_id = "item";
  std::shared_ptr<const demandgen::DemandSource> demand;
  std::shared_ptr<const simcore::LeadTimeModel> lead_time;
  std::optional<distfit::FittedDistribution> demand_distribution;  // per period
  double demand_period_months = 1.0;
  simcore::CostRates costs;
  simcore::InventoryPolicy policy;
  simcore::SimConfig sim;
  std::size_t replications = 100;
  bool trace = false;
  std::optional<optimizer::SearchSpace> search;
  optimizer::OptimizerConfig optimizer;
  std::vector<double> alphas;
  std::optional<std::int64_t> curve_roq;
  std::size_t curve_replications = 100;
};

ItemModel parse_item_model(std::string_view json_text);
ItemModel load_item_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Synthetic population with planted Pareto structure.

struct SynthSpec {
  std::size_t item_count = 200;
  std::uint64_t seed = 42;
  int years = 9;
};

struct SynthDataset {
  std::string items_csv;        // item master
  std::string consumption_csv;  // id,year,month,qty
  std::string lead_time_csv;    // id,lead_time_months
};

/// Deterministic: identical specs give identical bytes.
SynthDataset synth_dataset(const SynthSpec& spec);

/// Writes items.csv, consumption.csv, lead_times.csv, criteria.json and a
/// pipeline.json wired to them. Returns the written file names.
std::vector<std::string> write_synth_dataset(const SynthSpec& spec,
                                             const std::filesystem::path& dir);

/// Five-criterion judgment matrix whose eigenvector weights are
/// (0.52, 0.15, 0.14, 0.12, 0.07).
std::string default_criteria_json();

}  // namespace spareopt::pipeline
