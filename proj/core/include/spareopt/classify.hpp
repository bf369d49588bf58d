#pragma once

// Multi-criteria ABC classification: AHP-weighted qualitative rank blended
// with normalized monetary consumption, then a Pareto cut.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spareopt/ahp.hpp"

namespace spareopt::classify {

inline constexpr std::size_t kCriteriaCount = 5;

// Column names for the five criterion scores, in item-master order.
inline constexpr std::string_view kCriterionColumns[kCriteriaCount] = {
    "critical_degree", "item_consumption", "lead_time_score", "availability",
    "inventory_turnover"};

struct ItemRecord {
  std::string id;
  std::vector<double> criterion_values;    // one per configured criterion
  std::vector<double> annual_consumption;  // units per historical year
  double unit_price = 0.0;
};

using Matrix = std::vector<std::vector<double>>;  // rows are items

enum class ConsumptionBasis { mean, last_year, total };
ConsumptionBasis parse_consumption_basis(std::string_view name);

struct ScoredItem {
  std::string id;
  double r = 0.0;  // qualitative rank
  double k = 0.0;  // normalized quantitative value
  double g = 0.0;  // combined value
};

enum class AbcClass { A, B, C };
char to_char(AbcClass c);

struct AbcAssignment {
  std::string id;
  AbcClass abc = AbcClass::C;
  std::size_t rank = 0;  // 1-based position by descending g
  double cumulative_share = 0.0;
};

struct AbcCuts {
  double a = 0.80;
  double b = 0.95;
};

/// V_ij = v_ij / sum_i v_ij. Throws InvalidInput naming the criterion when a
/// column sums to zero.
Matrix normalize_criteria(const std::vector<ItemRecord>& items,
                          const std::vector<std::string>& criterion_names = {});

/// R_i = sum_j W_j V_ij.
std::vector<double> qualitative_rank(const Matrix& v, const ahp::CriterionWeights& w);

/// raw_i = aggregated consumption * unit price; K_i = raw_i / sum raw.
/// Stagnant items get K_i = 0. Throws if every item is zero-valued.
std::vector<double> quantitative_value(const std::vector<ItemRecord>& items,
                                       ConsumptionBasis basis = ConsumptionBasis::mean);

/// G = (6/7) R + (1/7) K.
double combined_value(double r, double k);

std::vector<ScoredItem> score_items(const std::vector<ItemRecord>& items,
                                    const ahp::CriterionWeights& w,
                                    ConsumptionBasis basis = ConsumptionBasis::mean);

/// Sorts by descending g (ties: ascending id) and walks the cumulative share.
/// A while share <= a cut, B while <= b cut, C after; the top item is always
/// A. Shares within 1e-9 of a cut count as on it.
std::vector<AbcAssignment> abc_classify(const std::vector<ScoredItem>& scored,
                                        const AbcCuts& cuts = {});

/// Item master CSV:
/// id,critical_degree,item_consumption,lead_time_score,availability,
/// inventory_turnover,unit_price,consumption_y1,...,consumption_yN
std::vector<ItemRecord> parse_item_master(std::string_view text,
                                          std::string_view source = "items.csv");
std::vector<ItemRecord> load_item_master(const std::filesystem::path& path);
std::string item_master_csv(const std::vector<ItemRecord>& items);

/// id,R,K,G,rank,cumulative_share,class in rank order.
std::string classification_csv(const std::vector<ScoredItem>& scored,
                               const std::vector<AbcAssignment>& assignments);

}  // namespace spareopt::classify
