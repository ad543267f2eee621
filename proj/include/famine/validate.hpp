#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "famine/dataset.hpp"

namespace famine {

struct TargetRange {
  double min = 0.0;
  double max = 112.0;
};

struct ValidationReport {
  struct TargetViolation {
    std::size_t row;
    double value;
  };
  struct BoundViolation {
    std::size_t row;
    std::string feature;
    double value;
  };
  struct DuplicateKey {
    std::string country;
    std::string admin1;
    Date date;
    std::size_t occurrences;
  };
  struct ConflictWarning {
    std::size_t row;
    std::string total_feature;
    std::string component_feature;
    double total;
    double component;
  };

  std::map<std::string, std::size_t> row_counts_per_country;
  std::vector<TargetViolation> target_range_violations;
  std::vector<BoundViolation> bound_violations;
  std::vector<DuplicateKey> duplicate_keys;
  std::vector<ConflictWarning> conflict_consistency_warnings;

  bool clean() const noexcept {
    return target_range_violations.empty() && bound_violations.empty() && duplicate_keys.empty() &&
           conflict_consistency_warnings.empty();
  }
};

/// Semantic checks over a parsed dataset. Rows are 0-based data-row indices.
/// A row whose total is below several components yields one warning, naming
/// the first offending component.
inline ValidationReport validate(const PanelDataset& ds, TargetRange range = {}) {
  ValidationReport report;
  const auto& catalog = ds.catalog();

  struct TotalRule {
    std::size_t total;
    std::vector<std::size_t> parts;
  };
  std::vector<TotalRule> rules;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto& spec = catalog[i];
    if (spec.total_of.empty()) continue;
    TotalRule rule{i, {}};
    for (const auto& p : spec.total_of)
      if (auto idx = catalog.index_of(p)) rule.parts.push_back(*idx);
    rules.push_back(std::move(rule));
  }

  std::map<std::tuple<std::string, std::string, Date>, std::size_t> key_counts;
  const auto& obs = ds.observations();
  for (std::size_t row = 0; row < obs.size(); ++row) {
    const auto& o = obs[row];
    ++report.row_counts_per_country[o.country];
    ++key_counts[{o.country, o.admin1, o.date}];

    if (o.target < range.min || o.target > range.max) report.target_range_violations.push_back({row, o.target});

    for (std::size_t c : ds.columns()) {
      const double v = o.values[c];
      if (is_missing(v)) continue;
      const auto& spec = catalog[c];
      if ((spec.lower_bound && v < *spec.lower_bound) || (spec.upper_bound && v > *spec.upper_bound))
        report.bound_violations.push_back({row, spec.name, v});
    }

    for (const auto& rule : rules) {
      const double total = o.values[rule.total];
      if (is_missing(total)) continue;
      for (std::size_t p : rule.parts) {
        const double part = o.values[p];
        if (!is_missing(part) && total < part) {
          report.conflict_consistency_warnings.push_back({row, catalog[rule.total].name, catalog[p].name, total, part});
          break;
        }
      }
    }
  }

  for (const auto& [key, count] : key_counts)
    if (count > 1)
      report.duplicate_keys.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), count});
  return report;
}

/// Fraction of a country's rows in which each catalog feature is observed,
/// keyed by feature name, in catalog order.
inline std::vector<std::pair<std::string, double>> availability(const PanelDataset& ds, std::string_view country) {
  const auto& rows = ds.rows_of(country);
  const auto& catalog = ds.catalog();
  std::vector<std::size_t> observed(catalog.size(), 0);
  for (std::size_t r : rows) {
    const auto& values = ds.observations()[r].values;
    for (std::size_t c = 0; c < catalog.size(); ++c) observed[c] += is_missing(values[c]) ? 0 : 1;
  }
  std::vector<std::pair<std::string, double>> out;
  out.reserve(catalog.size());
  const double n = static_cast<double>(rows.size());
  for (std::size_t c = 0; c < catalog.size(); ++c) out.emplace_back(catalog[c].name, static_cast<double>(observed[c]) / n);
  return out;
}

}  // namespace famine
