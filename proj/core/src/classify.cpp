#include "spareopt/classify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "spareopt/csv.hpp"
#include "spareopt/error.hpp"

namespace spareopt::classify {
namespace {

constexpr double kCutTolerance = 1e-9;

std::string criterion_label(const std::vector<std::string>& names, std::size_t j) {
  if (j < names.size()) return names[j];
  if (j < kCriteriaCount) return std::string(kCriterionColumns[j]);
  return "criterion " + std::to_string(j + 1);
}

double aggregate(const ItemRecord& item, ConsumptionBasis basis) {
  const auto& years = item.annual_consumption;
  if (years.empty()) throw InvalidInput("item '" + item.id + "' has no consumption history");
  switch (basis) {
    case ConsumptionBasis::mean:
      return std::accumulate(years.begin(), years.end(), 0.0) / static_cast<double>(years.size());
    case ConsumptionBasis::last_year:
      return years.back();
    case ConsumptionBasis::total:
      return std::accumulate(years.begin(), years.end(), 0.0);
  }
  return 0.0;
}

}  // namespace

ConsumptionBasis parse_consumption_basis(std::string_view name) {
  if (name == "mean") return ConsumptionBasis::mean;
  if (name == "last_year") return ConsumptionBasis::last_year;
  if (name == "total") return ConsumptionBasis::total;
  throw ConfigError("unknown consumption basis '" + std::string(name) + "'");
}

char to_char(AbcClass c) {
  switch (c) {
    case AbcClass::A: return 'A';
    case AbcClass::B: return 'B';
    case AbcClass::C: return 'C';
  }
  return '?';
}

Matrix normalize_criteria(const std::vector<ItemRecord>& items,
                          const std::vector<std::string>& criterion_names) {
  if (items.empty()) throw InvalidInput("normalize_criteria: no items");
  const std::size_t m = items.front().criterion_values.size();
  if (m == 0) throw InvalidInput("normalize_criteria: items carry no criteria");
  std::vector<double> column_sums(m, 0.0);
  for (const auto& item : items) {
    if (item.criterion_values.size() != m) {
      throw InvalidInput("item '" + item.id + "' has " +
                         std::to_string(item.criterion_values.size()) + " criterion values, expected " +
                         std::to_string(m));
    }
    for (std::size_t j = 0; j < m; ++j) {
      const double v = item.criterion_values[j];
      if (!std::isfinite(v) || v < 0.0) {
        throw InvalidInput("item '" + item.id + "': " + criterion_label(criterion_names, j) +
                           " must be finite and nonnegative");
      }
      column_sums[j] += v;
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!(column_sums[j] > 0.0)) {
      throw InvalidInput("criterion '" + criterion_label(criterion_names, j) +
                         "' is zero for every item; cannot normalize");
    }
  }
  Matrix v(items.size(), std::vector<double>(m));
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) v[i][j] = items[i].criterion_values[j] / column_sums[j];
  }
  return v;
}

std::vector<double> qualitative_rank(const Matrix& v, const ahp::CriterionWeights& w) {
  std::vector<double> r;
  r.reserve(v.size());
  for (const auto& row : v) {
    if (row.size() != w.weights.size()) {
      throw InvalidInput("qualitative_rank: " + std::to_string(row.size()) + " criteria but " +
                         std::to_string(w.weights.size()) + " weights");
    }
    r.push_back(std::inner_product(row.begin(), row.end(), w.weights.begin(), 0.0));
  }
  return r;
}

std::vector<double> quantitative_value(const std::vector<ItemRecord>& items, ConsumptionBasis basis) {
  if (items.empty()) throw InvalidInput("quantitative_value: no items");
  std::vector<double> raw;
  raw.reserve(items.size());
  for (const auto& item : items) {
    if (!std::isfinite(item.unit_price) || item.unit_price < 0.0) {
      throw InvalidInput("item '" + item.id + "': unit price must be finite and nonnegative");
    }
    for (double y : item.annual_consumption) {
      if (!std::isfinite(y) || y < 0.0) {
        throw InvalidInput("item '" + item.id + "': consumption must be finite and nonnegative");
      }
    }
    raw.push_back(aggregate(item, basis) * item.unit_price);
  }
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  if (!(total > 0.0)) throw InvalidInput("quantitative_value: every item has zero consumption value");
  for (auto& x : raw) x /= total;
  return raw;
}

double combined_value(double r, double k) {
  return (6.0 * r + k) / 7.0;
}

std::vector<ScoredItem> score_items(const std::vector<ItemRecord>& items,
                                    const ahp::CriterionWeights& w, ConsumptionBasis basis) {
  const auto r = qualitative_rank(normalize_criteria(items), w);
  const auto k = quantitative_value(items, basis);
  std::vector<ScoredItem> scored;
  scored.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    scored.push_back({items[i].id, r[i], k[i], combined_value(r[i], k[i])});
  }
  return scored;
}

std::vector<AbcAssignment> abc_classify(const std::vector<ScoredItem>& scored, const AbcCuts& cuts) {
  if (!(cuts.a > 0.0 && cuts.a < cuts.b && cuts.b < 1.0)) {
    throw InvalidInput("ABC cuts must satisfy 0 < a < b < 1");
  }
  if (scored.empty()) throw InvalidInput("abc_classify: no items");

  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (scored[x].g != scored[y].g) return scored[x].g > scored[y].g;
    return scored[x].id < scored[y].id;
  });

  double total = 0.0;
  for (const auto& s : scored) {
    if (!std::isfinite(s.g) || s.g < 0.0) throw InvalidInput("item '" + s.id + "': invalid g");
    total += s.g;
  }
  if (!(total > 0.0)) throw InvalidInput("abc_classify: total combined value is zero");

  std::vector<AbcAssignment> out;
  out.reserve(scored.size());
  double running = 0.0;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const auto& s = scored[order[pos]];
    running += s.g;
    const double share = (pos + 1 == order.size()) ? 1.0 : running / total;
    AbcClass c = AbcClass::C;
    if (pos == 0 || share <= cuts.a + kCutTolerance) {
      c = AbcClass::A;
    } else if (share <= cuts.b + kCutTolerance) {
      c = AbcClass::B;
    }
    out.push_back({s.id, c, pos + 1, share});
  }
  return out;
}

std::vector<ItemRecord> parse_item_master(std::string_view text, std::string_view source) {
  const auto table = parse_csv(text, source);
  const auto& h = table.header;
  const std::size_t fixed = 1 + kCriteriaCount + 1;
  if (h.size() < fixed + 1 || h[0] != "id" || h[fixed - 1] != "unit_price") {
    throw ConfigError(std::string(source) +
                      ": header must be id,<5 criteria>,unit_price,consumption_y1[,...]");
  }
  for (std::size_t j = 0; j < kCriteriaCount; ++j) {
    if (h[1 + j] != kCriterionColumns[j]) {
      throw ConfigError(std::string(source) + ": column " + std::to_string(2 + j) + " must be '" +
                        std::string(kCriterionColumns[j]) + "'");
    }
  }
  for (std::size_t j = fixed; j < h.size(); ++j) {
    if (h[j] != "consumption_y" + std::to_string(j - fixed + 1)) {
      throw ConfigError(std::string(source) + ": unexpected column '" + h[j] + "'");
    }
  }
  if (table.rows.empty()) throw ConfigError(std::string(source) + ": no items");

  std::vector<ItemRecord> items;
  std::set<std::string> seen;
  for (const auto& row : table.rows) {
    ItemRecord item;
    item.id = row[0];
    if (item.id.empty()) throw ConfigError(std::string(source) + ": empty item id");
    if (!seen.insert(item.id).second) {
      throw ConfigError(std::string(source) + ": duplicate item id '" + item.id + "'");
    }
    const std::string ctx = std::string(source) + " item '" + item.id + "'";
    for (std::size_t j = 0; j < kCriteriaCount; ++j) {
      item.criterion_values.push_back(parse_number(row[1 + j], ctx));
    }
    item.unit_price = parse_number(row[fixed - 1], ctx);
    // Trailing empty year cells allow items with shorter histories.
    for (std::size_t j = fixed; j < row.size(); ++j) {
      if (row[j].empty()) continue;
      item.annual_consumption.push_back(parse_number(row[j], ctx));
    }
    if (item.annual_consumption.empty()) throw ConfigError(ctx + ": no consumption history");
    for (double v : item.criterion_values) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(ctx + ": negative criterion value");
    }
    if (!(item.unit_price >= 0.0)) throw ConfigError(ctx + ": negative unit price");
    for (double v : item.annual_consumption) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(ctx + ": negative consumption");
    }
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<ItemRecord> load_item_master(const std::filesystem::path& path) {
  return parse_item_master(read_text_file(path), path.filename().string());
}

std::string item_master_csv(const std::vector<ItemRecord>& items) {
  std::size_t years = 0;
  for (const auto& item : items) years = std::max(years, item.annual_consumption.size());
  std::vector<std::string> header{"id"};
  for (auto c : kCriterionColumns) header.emplace_back(c);
  header.emplace_back("unit_price");
  for (std::size_t y = 1; y <= years; ++y) header.push_back("consumption_y" + std::to_string(y));
  std::string out = csv_line(header);
  for (const auto& item : items) {
    check_csv_identifier(item.id);
    std::vector<std::string> row{item.id};
    for (double v : item.criterion_values) row.push_back(format_number(v));
    row.push_back(format_number(item.unit_price));
    for (std::size_t y = 0; y < years; ++y) {
      row.push_back(y < item.annual_consumption.size() ? format_number(item.annual_consumption[y]) : "");
    }
    out += csv_line(row);
  }
  return out;
}

std::string classification_csv(const std::vector<ScoredItem>& scored,
                               const std::vector<AbcAssignment>& assignments) {
  std::map<std::string_view, const ScoredItem*> by_id;
  for (const auto& s : scored) by_id[s.id] = &s;
  std::string out = "id,R,K,G,rank,cumulative_share,class\n";
  for (const auto& a : assignments) {
    const auto it = by_id.find(a.id);
    if (it == by_id.end()) throw InvalidInput("assignment for unknown item '" + a.id + "'");
    check_csv_identifier(a.id);
    const auto& s = *it->second;
    out += csv_line({a.id, format_number(s.r), format_number(s.k), format_number(s.g),
                     std::to_string(a.rank), format_number(a.cumulative_share),
                     std::string(1, to_char(a.abc))});
  }
  return out;
}

}  // namespace spareopt::classify
