#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "famine/catalog.hpp"
#include "famine/error.hpp"
#include "famine/evaluate.hpp"

namespace famine {

enum class ScoringMode { Importance, Rank };

inline std::string_view to_string(ScoringMode m) { return m == ScoringMode::Importance ? "importance" : "rank"; }

inline std::optional<ScoringMode> parse_scoring_mode(std::string_view s) {
  if (s == "importance") return ScoringMode::Importance;
  if (s == "rank") return ScoringMode::Rank;
  return std::nullopt;
}

/// Per-category aggregate over the features a country selected. Importance
/// mode averages weights (highest wins); rank mode averages descending-rank
/// positions, 1 = most important (lowest wins). Other never appears.
struct CategoryScores {
  ScoringMode mode = ScoringMode::Importance;
  std::map<FamineCategory, double> scores;
  std::map<FamineCategory, std::size_t> counts;
};

namespace detail {

// Catalog position for ordering; unknown names sort after catalog features.
inline std::pair<std::size_t, std::string_view> catalog_key(const FeatureCatalog& catalog, std::string_view name) {
  auto idx = catalog.index_of(name);
  return {idx ? *idx : std::numeric_limits<std::size_t>::max(), name};
}

/// Features sorted by descending weight, catalog order on ties.
inline std::vector<std::pair<std::string, double>> rank_features(std::span<const std::pair<std::string, double>> weights,
                                                                 const FeatureCatalog& catalog) {
  std::vector<std::pair<std::string, double>> out(weights.begin(), weights.end());
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return catalog_key(catalog, a.first) < catalog_key(catalog, b.first);
  });
  return out;
}

}  // namespace detail

inline CategoryScores category_scores(std::span<const std::pair<std::string, double>> importances,
                                      const FeatureCatalog& catalog, ScoringMode mode = ScoringMode::Importance) {
  if (importances.empty()) throw std::invalid_argument("category_scores: empty importance association");
  for (const auto& [name, w] : importances)
    if (w < 0.0) throw std::invalid_argument("category_scores: negative weight for '" + name + "'");

  // Canonical order makes the sums independent of insertion order.
  const auto ranked = detail::rank_features(importances, catalog);
  std::vector<std::tuple<std::pair<std::size_t, std::string_view>, FamineCategory, double>> items;
  for (std::size_t pos = 0; pos < ranked.size(); ++pos) {
    const auto& [name, weight] = ranked[pos];
    const auto cat = catalog.category_of(name);
    if (cat == FamineCategory::Other) continue;
    const double value = mode == ScoringMode::Importance ? weight : static_cast<double>(pos + 1);
    items.emplace_back(detail::catalog_key(catalog, name), cat, value);
  }
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });

  CategoryScores out;
  out.mode = mode;
  for (const auto& [key, cat, value] : items) {
    out.scores[cat] += value;
    ++out.counts[cat];
  }
  for (auto& [cat, s] : out.scores) s /= static_cast<double>(out.counts[cat]);
  return out;
}

/// Argmax (importance mode) or argmin (rank mode); ties resolve alphabetically.
inline FamineCategory assign_category(const CategoryScores& scores) {
  if (scores.scores.empty()) throw std::invalid_argument("assign_category: empty scores");
  std::optional<FamineCategory> best;
  for (auto cat : kScoredCategories) {
    auto it = scores.scores.find(cat);
    if (it == scores.scores.end()) continue;
    if (!best) {
      best = cat;
      continue;
    }
    const double cur = scores.scores.at(*best);
    const bool better = scores.mode == ScoringMode::Importance ? it->second > cur : it->second < cur;
    if (better) best = cat;
  }
  return *best;
}

struct CountryImportances {
  std::string country;
  std::vector<std::pair<std::string, double>> importances;
};

/// Counts, per feature, the countries ranking it in their top five and in
/// their bottom four. A feature can land in both when a country has eight or
/// fewer features. Entries come back in catalog order.
inline ImportanceSpread importance_spread(std::span<const CountryImportances> per_country, const FeatureCatalog& catalog) {
  std::map<std::pair<std::size_t, std::string>, SpreadEntry> merged;
  for (const auto& c : per_country) {
    if (c.importances.empty()) throw std::invalid_argument("importance_spread: " + c.country + " has no importances");
    const auto ranked = detail::rank_features(c.importances, catalog);
    const std::size_t m = ranked.size();
    for (std::size_t pos = 0; pos < m; ++pos) {
      const auto& name = ranked[pos].first;
      auto [key_idx, _] = detail::catalog_key(catalog, name);
      auto& e = merged[{key_idx, name}];
      e.feature = name;
      ++e.countries;
      if (pos < 5) ++e.top5_count;
      if (pos + 4 >= m) ++e.bottom4_count;
    }
  }
  ImportanceSpread spread;
  for (auto& [_, e] : merged) spread.entries.push_back(std::move(e));
  return spread;
}

inline std::map<FamineCategory, double> category_proportions(const std::map<std::string, FamineCategory>& assignments) {
  if (assignments.empty()) throw std::invalid_argument("category_proportions: empty input");
  std::map<FamineCategory, std::size_t> counts;
  for (const auto& [_, cat] : assignments) ++counts[cat];
  std::map<FamineCategory, double> out;
  for (const auto& [cat, n] : counts) out[cat] = static_cast<double>(n) / static_cast<double>(assignments.size());
  return out;
}

/// Fills the categorization fields of a report from its evaluations.
/// Countries whose selected features are all in category Other stay unassigned.
inline void categorize(GlobalReport& report, const FeatureCatalog& catalog, ScoringMode mode = ScoringMode::Importance) {
  std::vector<CountryImportances> per_country;
  for (const auto& ev : report.evaluations) {
    per_country.push_back({ev.country, ev.importances});
    auto scores = category_scores(ev.importances, catalog, mode);
    report.category_scores[ev.country] = scores.scores;
    if (!scores.scores.empty()) report.category_assignments[ev.country] = assign_category(scores);
  }
  if (!report.category_assignments.empty()) report.category_proportions = category_proportions(report.category_assignments);
  report.importance_spread = importance_spread(per_country, catalog);
}

}  // namespace famine
