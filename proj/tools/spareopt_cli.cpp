// spareopt command-line tool.
//
// Exit codes: 0 success, 1 configuration error, 2 one or more item failures.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spareopt/csv.hpp"
#include "spareopt/error.hpp"
#include "spareopt/pipeline.hpp"
#include "spareopt/rng.hpp"

namespace fs = std::filesystem;
using namespace spareopt;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitItemFailure = 2;

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
  auto* opt = cmd->add_option("--config", args.config, "configuration file (JSON)");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "master seed, overrides the configuration");
  cmd->add_option("--out", args.out, "output directory");
}

std::string config_hash(const std::string& text) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

// Manifest for the commands that handle a single item or stage.
void write_manifest(const fs::path& out, std::uint64_t seed, const std::string& hash, json counts,
                    const json& failures, std::vector<std::string> files) {
  std::sort(files.begin(), files.end());
  json m;
  m["version"] = std::string(pipeline::version());
  m["seed"] = seed;
  m["config_hash"] = hash;
  m["item_counts"] = std::move(counts);
  m["failures"] = failures;
  m["files"] = files;
  write_text_file(out / "manifest.json", m.dump(2) + "\n");
}

pipeline::PipelineConfig pipeline_config(const CommonArgs& args) {
  auto config = pipeline::load_pipeline_config(args.config);
  if (args.seed) config.seed = *args.seed;
  if (args.out) config.output_dir = *args.out;
  return config;
}

int run_classify(const CommonArgs& args) {
  const auto config = pipeline_config(args);
  const auto inputs = pipeline::load_inputs(config);
  const auto cls = pipeline::classify_items(config, inputs);
  write_text_file(config.output_dir / "weights.csv", ahp::weights_csv(inputs.criteria.criteria, cls.weights));
  write_text_file(config.output_dir / "classification.csv", classify::classification_csv(cls.scored, cls.assignments));
  std::size_t a = 0, b = 0, c = 0;
  for (const auto& x : cls.assignments) {
    (x.abc == classify::AbcClass::A ? a : x.abc == classify::AbcClass::B ? b : c)++;
  }
  write_manifest(config.output_dir, config.seed, config.config_hash,
                 {{"total", inputs.items.size()}, {"class_a", a}, {"class_b", b}, {"class_c", c}}, json::array(),
                 {"classification.csv", "weights.csv"});
  std::cout << "classified " << inputs.items.size() << " items: A=" << a << " B=" << b << " C=" << c
            << "; inconsistency ratio " << format_number(cls.consistency.ir)
            << (cls.consistency.acceptable ? "" : " (above 0.1)") << "\n";
  return kExitOk;
}

int run_fit(const CommonArgs& args) {
  const auto config = pipeline_config(args);
  const auto inputs = pipeline::load_inputs(config);
  const auto failures = pipeline::write_fit_reports(config, inputs, config.output_dir);
  json f = json::array();
  for (const auto& x : failures) f.push_back({{"id", x.id}, {"stage", x.stage}, {"reason", x.reason}});
  write_manifest(config.output_dir, config.seed, config.config_hash,
                 {{"total", inputs.items.size()},
                  {"succeeded", inputs.items.size() - failures.size()},
                  {"failed", failures.size()}},
                 f, {"demand_fits.csv", "lead_time_fits.csv"});
  std::cout << "fitted " << inputs.items.size() - failures.size() << " of " << inputs.items.size() << " items\n";
  for (const auto& x : failures) std::cerr << x.id << ": " << x.reason << "\n";
  return failures.empty() ? kExitOk : kExitItemFailure;
}

struct ItemContext {
  pipeline::ItemModel model;
  fs::path out;
  std::string hash;
};

ItemContext load_item(const CommonArgs& args) {
  const auto text = read_text_file(args.config);
  ItemContext ctx{pipeline::parse_item_model(text), args.out ? fs::path(*args.out) : fs::path("out"),
                  config_hash(text)};
  if (args.seed) {
    ctx.model.sim.seed = *args.seed;
    ctx.model.optimizer.seed = *args.seed;
  }
  return ctx;
}

// Runs `body`; a model failure is recorded in the manifest with exit code 2.
template <typename Body>
int item_command(const ItemContext& ctx, std::string_view stage, Body body) {
  std::vector<std::string> files;
  json failures = json::array();
  try {
    files = body();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    failures.push_back({{"id", ctx.model.item_id}, {"stage", stage}, {"reason", e.what()}});
    std::cerr << ctx.model.item_id << ": " << e.what() << "\n";
  }
  const bool ok = failures.empty();
  write_manifest(ctx.out, ctx.model.sim.seed, ctx.hash,
                 {{"total", 1}, {"succeeded", ok ? 1 : 0}, {"failed", ok ? 0 : 1}}, failures, files);
  return ok ? kExitOk : kExitItemFailure;
}

int run_simulate(const CommonArgs& args) {
  const auto ctx = load_item(args);
  const auto& m = ctx.model;
  return item_command(ctx, "simulate", [&] {
    std::vector<std::string> files{"summary.csv", "replications.csv"};
    std::vector<simcore::SimOutcome> runs;
    const auto summary = simcore::replicate(m.policy, *m.demand, *m.lead_time, m.costs, m.sim, m.replications, &runs);
    std::string reps = "replication,seed";
    for (std::size_t k = 0; k < simcore::kMetricCount; ++k) {
      reps += ",";
      reps += simcore::to_string(static_cast<simcore::Metric>(k));
    }
    reps += "\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      std::vector<std::string> row{std::to_string(i), std::to_string(simcore::replication_seed(m.sim.seed, i))};
      for (std::size_t k = 0; k < simcore::kMetricCount; ++k) {
        row.push_back(format_number(simcore::metric_value(runs[i], static_cast<simcore::Metric>(k))));
      }
      reps += csv_line(row);
    }
    write_text_file(ctx.out / "summary.csv",
                    std::string(simcore::kOutcomeHeader) + simcore::outcome_row(m.item_id, m.policy, summary));
    write_text_file(ctx.out / "replications.csv", reps);
    if (m.trace) {
      // Trace of the first replication.
      simcore::SimConfig first = m.sim;
      first.seed = simcore::replication_seed(m.sim.seed, 0);
      simcore::EventTrace trace;
      simcore::simulate(m.policy, *m.demand, *m.lead_time, m.costs, first, &trace);
      write_text_file(ctx.out / "trace.csv", simcore::trace_csv(trace));
      files.push_back("trace.csv");
    }
    std::cout << "mean total cost " << format_number(summary.mean[0]) << " over " << summary.replications
              << " replications\n";
    return files;
  });
}

int run_optimize(const CommonArgs& args) {
  const auto ctx = load_item(args);
  const auto& m = ctx.model;
  if (!m.search) throw ConfigError("optimize needs a 'search' section");
  return item_command(ctx, "optimize", [&] {
    const auto evaluator = optimizer::simulation_evaluator(*m.demand, *m.lead_time, m.costs, m.sim);
    const auto result = optimizer::optimize(*m.search, evaluator, m.optimizer);
    write_text_file(ctx.out / "evaluations.csv", optimizer::evaluation_log_csv(result));
    write_text_file(ctx.out / "policy.csv",
                    "item_id,rop,roq,cost_mean,cost_ci_halfwidth,evaluations\n" +
                        csv_line({m.item_id, std::to_string(result.best.rop), std::to_string(result.best.roq),
                                  format_number(result.best_cost_mean), format_number(result.best_cost_ci),
                                  std::to_string(result.evaluation_count)}));
    std::cout << "best policy rop=" << result.best.rop << " roq=" << result.best.roq << " mean cost "
              << format_number(result.best_cost_mean) << "\n";
    return std::vector<std::string>{"evaluations.csv", "policy.csv"};
  });
}

int run_service_curve(const CommonArgs& args, bool svg) {
  const auto ctx = load_item(args);
  const auto& m = ctx.model;
  if (!m.demand_distribution) {
    throw ConfigError("service-curve needs a fitted demand ('demand.type' fitted or 'demand_distribution')");
  }
  return item_command(ctx, "service_curve", [&] {
    const double a = m.lead_time->mean_months() / m.demand_period_months;
    const auto ltd = svclevel::lead_time_demand(*m.demand_distribution, a);
    const svclevel::CurveModels models{*m.demand, *m.lead_time, ltd};
    const auto points = svclevel::service_curve(models, m.costs, m.curve_roq.value_or(m.policy.roq), m.alphas, m.sim,
                                                m.curve_replications);
    std::vector<std::string> files{"service_curve.csv"};
    write_text_file(ctx.out / "service_curve.csv", std::string(svclevel::kCurveHeader) +
                                                       svclevel::curve_rows(m.item_id, points));
    if (svg) {
      write_text_file(ctx.out / "service_curve.svg", svclevel::curve_svg(m.item_id, points));
      files.push_back("service_curve.svg");
    }
    std::cout << points.size() << " service levels evaluated\n";
    return files;
  });
}

int run_pipeline_cmd(const CommonArgs& args) {
  const auto config = pipeline_config(args);
  const auto run = pipeline::run_pipeline(config);
  const auto& c = run.counts;
  std::cout << "items " << c.total << ": A=" << c.class_a << " B=" << c.class_b << " C=" << c.class_c
            << "; class A processed " << c.processed << ", succeeded " << c.succeeded << ", failed " << c.failed
            << "\n";
  for (const auto& f : run.failures) std::cerr << f.id << " [" << f.stage << "]: " << f.reason << "\n";
  return run.failures.empty() ? kExitOk : kExitItemFailure;
}

int run_synth(const CommonArgs& args, std::optional<std::size_t> items) {
  pipeline::SynthSpec spec;
  if (!args.config.empty()) {
    const auto doc = json::parse(read_text_file(args.config));
    spec.item_count = doc.value("item_count", spec.item_count);
    spec.seed = doc.value("seed", spec.seed);
    spec.years = doc.value("years", spec.years);
  }
  if (args.seed) spec.seed = *args.seed;
  if (items) spec.item_count = *items;
  const fs::path out = args.out ? fs::path(*args.out) : fs::path("data");
  const auto files = pipeline::write_synth_dataset(spec, out);
  std::cout << "wrote " << spec.item_count << " items to " << out.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spare-parts inventory classification, fitting, simulation and policy search"};
  app.set_version_flag("--version", std::string(pipeline::version()));
  app.require_subcommand(1);

  CommonArgs classify_args, fit_args, sim_args, opt_args, curve_args, pipe_args, synth_args;
  auto* classify_cmd = app.add_subcommand("classify", "AHP weights and ABC classes");
  add_common(classify_cmd, classify_args);
  auto* fit_cmd = app.add_subcommand("fit", "demand and lead-time distribution fits for every item");
  add_common(fit_cmd, fit_args);
  auto* sim_cmd = app.add_subcommand("simulate", "replicated simulation of one item under a fixed policy");
  add_common(sim_cmd, sim_args);
  auto* opt_cmd = app.add_subcommand("optimize", "policy search for one item");
  add_common(opt_cmd, opt_args);
  auto* curve_cmd = app.add_subcommand("service-curve", "cost against service level for one item");
  add_common(curve_cmd, curve_args);
  bool svg = false;
  curve_cmd->add_flag("--svg", svg, "also write service_curve.svg");
  auto* pipe_cmd = app.add_subcommand("pipeline", "classify, fit, optimize and build curves end to end");
  add_common(pipe_cmd, pipe_args);
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic item population");
  add_common(synth_cmd, synth_args, false);
  std::optional<std::size_t> synth_items;
  synth_cmd->add_option("--items", synth_items, "number of items");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*classify_cmd) return run_classify(classify_args);
    if (*fit_cmd) return run_fit(fit_args);
    if (*sim_cmd) return run_simulate(sim_args);
    if (*opt_cmd) return run_optimize(opt_args);
    if (*curve_cmd) return run_service_curve(curve_args, svg);
    if (*pipe_cmd) return run_pipeline_cmd(pipe_args);
    if (*synth_cmd) return run_synth(synth_args, synth_items);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitItemFailure;
  }
  return kExitOk;
}
