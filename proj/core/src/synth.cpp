#include <algorithm>
#include <cmath>
#include <numeric>

#include "spareopt/csv.hpp"
#include "spareopt/error.hpp"
#include "spareopt/pipeline.hpp"
#include "spareopt/rng.hpp"

namespace spareopt::pipeline {
namespace {

enum class Tier { vital, mid, trivial };

struct TierProfile {
  double score_lo, score_hi;
  double price;
  double rate_lo, rate_hi;  // monthly Poisson rate
};

TierProfile profile(Tier t) {
  switch (t) {
    case Tier::vital: return {6.0, 10.0, 800.0, 4.0, 20.0};
    case Tier::mid: return {1.0, 2.5, 150.0, 1.0, 5.0};
    case Tier::trivial: return {0.0, 0.5, 20.0, 0.0, 0.5};
  }
  return {};
}

double round2(double x) { return std::nearbyint(x * 100.0) / 100.0; }

std::vector<Tier> tier_assignment(std::size_t n, Rng& rng) {
  std::size_t vital = static_cast<std::size_t>(std::llround(0.10 * static_cast<double>(n)));
  std::size_t mid = static_cast<std::size_t>(std::llround(0.20 * static_cast<double>(n)));
  vital = std::max<std::size_t>(vital, 1);
  mid = std::min(mid, n - vital);
  std::vector<Tier> tiers(n, Tier::trivial);
  std::fill_n(tiers.begin(), vital, Tier::vital);
  std::fill_n(tiers.begin() + static_cast<std::ptrdiff_t>(vital), mid, Tier::mid);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
    std::swap(tiers[i], tiers[j]);
  }
  return tiers;
}

}  // namespace

SynthDataset synth_dataset(const SynthSpec& spec) {
  if (spec.item_count == 0 || spec.item_count > 99999) throw InvalidInput("synth: item count must be in 1..99999");
  if (spec.years < 1) throw InvalidInput("synth: years must be >= 1");
  Rng master(spec.seed);
  Rng tier_rng = master.split("tiers");
  const auto tiers = tier_assignment(spec.item_count, tier_rng);

  std::vector<classify::ItemRecord> items;
  std::string consumption = "id,year,month,qty\n";
  std::string lead_times = "id,lead_time_months\n";
  for (std::size_t i = 0; i < spec.item_count; ++i) {
    Rng rng = master.split("item", i);
    char id[24];
    std::snprintf(id, sizeof(id), "SP%04zu", i + 1);
    const auto p = profile(tiers[i]);

    classify::ItemRecord item;
    item.id = id;
    for (std::size_t c = 0; c < classify::kCriteriaCount; ++c) {
      item.criterion_values.push_back(round2(rng.uniform(p.score_lo, p.score_hi)));
    }
    item.unit_price = round2(p.price * rng.uniform(0.8, 1.2));

    double rate = rng.uniform(p.rate_lo, p.rate_hi);
    if (tiers[i] == Tier::trivial && rng.uniform01() < 0.3) rate = 0.0;
    for (int y = 1; y <= spec.years; ++y) {
      std::int64_t annual = 0;
      for (int m = 1; m <= demandgen::kMonthsPerYear; ++m) {
        const std::int64_t q = rate > 0.0 ? rng.poisson(rate) : 0;
        annual += q;
        consumption += csv_line({item.id, std::to_string(y), std::to_string(m), std::to_string(q)});
      }
      item.annual_consumption.push_back(static_cast<double>(annual));
    }

    const auto base = rng.uniform_int(1, 4);
    const auto samples = rng.uniform_int(4, 8);
    for (std::int64_t k = 0; k < samples; ++k) {
      const auto lead = std::max<std::int64_t>(1, base + rng.uniform_int(-1, 1));
      lead_times += csv_line({item.id, std::to_string(lead)});
    }
    items.push_back(std::move(item));
  }
  return {classify::item_master_csv(items), std::move(consumption), std::move(lead_times)};
}

std::string default_criteria_json() {
  static constexpr int w[classify::kCriteriaCount] = {52, 15, 14, 12, 7};
  nlohmann::ordered_json doc;
  doc["criteria"] = std::vector<std::string>(std::begin(classify::kCriterionColumns),
                                             std::end(classify::kCriterionColumns));
  auto matrix = nlohmann::ordered_json::array();
  for (int i : w) {
    auto row = nlohmann::ordered_json::array();
    for (int j : w) {
      const int g = std::gcd(i, j);
      row.push_back(i == j ? std::string("1") : std::to_string(i / g) + "/" + std::to_string(j / g));
    }
    matrix.push_back(row);
  }
  doc["matrix"] = matrix;
  return doc.dump(2) + "\n";
}

std::vector<std::string> write_synth_dataset(const SynthSpec& spec, const std::filesystem::path& dir) {
  const auto data = synth_dataset(spec);
  nlohmann::ordered_json cfg;
  cfg["items_csv"] = "items.csv";
  cfg["consumption_csv"] = "consumption.csv";
  cfg["lead_time_csv"] = "lead_times.csv";
  cfg["ahp_matrix"] = "criteria.json";
  cfg["output_dir"] = "out";
  cfg["seed"] = spec.seed;
  write_text_file(dir / "items.csv", data.items_csv);
  write_text_file(dir / "consumption.csv", data.consumption_csv);
  write_text_file(dir / "lead_times.csv", data.lead_time_csv);
  write_text_file(dir / "criteria.json", default_criteria_json());
  write_text_file(dir / "pipeline.json", cfg.dump(2) + "\n");
  return {"criteria.json", "consumption.csv", "items.csv", "lead_times.csv", "pipeline.json"};
}

}  // namespace spareopt::pipeline
