#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "famine/error.hpp"

namespace famine {

enum class FamineCategory { Natural, Economic, Conflict, Other };

/// The three categories that take part in scoring, in alphabetical order.
inline constexpr std::array<FamineCategory, 3> kScoredCategories = {
    FamineCategory::Conflict, FamineCategory::Economic, FamineCategory::Natural};

inline std::string_view to_string(FamineCategory c) {
  switch (c) {
    case FamineCategory::Natural: return "Natural";
    case FamineCategory::Economic: return "Economic";
    case FamineCategory::Conflict: return "Conflict";
    case FamineCategory::Other: return "Other";
  }
  return "Other";
}

/// Case-insensitive parse of "natural" / "economic" / "conflict" / "other".
inline std::optional<FamineCategory> parse_category(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "natural") return FamineCategory::Natural;
  if (lower == "economic") return FamineCategory::Economic;
  if (lower == "conflict") return FamineCategory::Conflict;
  if (lower == "other") return FamineCategory::Other;
  return std::nullopt;
}

struct FeatureSpec {
  std::string name;
  FamineCategory category = FamineCategory::Other;
  std::string description;
  std::optional<double> lower_bound;
  std::optional<double> upper_bound;
  // Names of features this one is a total of (e.g. overall conflict fatalities).
  std::vector<std::string> total_of;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Ordered set of feature declarations. Order is canonical column order for
/// every downstream matrix.
class FeatureCatalog {
 public:
  FeatureCatalog() = default;

  explicit FeatureCatalog(std::vector<FeatureSpec> entries) {
    for (auto& e : entries) add(std::move(e));
  }

  void add(FeatureSpec spec) {
    if (spec.name.empty()) throw DataError("catalog: feature name must not be empty");
    if (index_.contains(spec.name)) throw DataError("catalog: duplicate feature name '" + spec.name + "'");
    index_.emplace(spec.name, entries_.size());
    entries_.push_back(std::move(spec));
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<FeatureSpec>& entries() const noexcept { return entries_; }
  const FeatureSpec& operator[](std::size_t i) const { return entries_.at(i); }

  bool contains(std::string_view name) const { return index_.contains(std::string(name)); }

  std::optional<std::size_t> index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const FeatureSpec& at(std::string_view name) const {
    auto i = index_of(name);
    if (!i) throw DataError("catalog: unknown feature '" + std::string(name) + "'");
    return entries_[*i];
  }

  FamineCategory category_of(std::string_view name) const {
    auto i = index_of(name);
    return i ? entries_[*i].category : FamineCategory::Other;
  }

  friend bool operator==(const FeatureCatalog& a, const FeatureCatalog& b) { return a.entries_ == b.entries_; }

 private:
  std::vector<FeatureSpec> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Builds a catalog from a JSON document with a top-level `features` array.
inline FeatureCatalog catalog_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("features") || !doc["features"].is_array())
    throw DataError("catalog: document must be an object with a 'features' array");
  const auto& list = doc["features"];
  if (list.empty()) throw DataError("catalog must declare at least one feature");

  FeatureCatalog catalog;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& e = list[i];
    const std::string where = "catalog: features[" + std::to_string(i) + "]";
    if (!e.is_object()) throw DataError(where + " is not an object");
    if (!e.contains("name") || !e["name"].is_string()) throw DataError(where + " lacks a string 'name'");
    FeatureSpec spec;
    spec.name = e["name"].get<std::string>();
    const std::string named = where + " ('" + spec.name + "')";
    if (!e.contains("category") || !e["category"].is_string()) throw DataError(named + " lacks a string 'category'");
    auto cat = parse_category(e["category"].get<std::string>());
    if (!cat) throw DataError(named + " has unknown category '" + e["category"].get<std::string>() + "'");
    spec.category = *cat;
    if (e.contains("description")) {
      if (!e["description"].is_string()) throw DataError(named + " 'description' must be a string");
      spec.description = e["description"].get<std::string>();
    }
    for (const char* key : {"min", "max"}) {
      if (!e.contains(key) || e[key].is_null()) continue;
      if (!e[key].is_number()) throw DataError(named + " '" + key + "' must be a number");
      (std::string_view(key) == "min" ? spec.lower_bound : spec.upper_bound) = e[key].get<double>();
    }
    if (spec.lower_bound && spec.upper_bound && *spec.lower_bound > *spec.upper_bound)
      throw DataError(named + " has min > max");
    if (e.contains("total_of")) {
      if (!e["total_of"].is_array()) throw DataError(named + " 'total_of' must be an array of names");
      for (const auto& c : e["total_of"]) {
        if (!c.is_string()) throw DataError(named + " 'total_of' must be an array of names");
        spec.total_of.push_back(c.get<std::string>());
      }
    }
    for (auto it = e.begin(); it != e.end(); ++it) {
      static const std::array<std::string_view, 6> known = {"name", "category", "description", "min", "max", "total_of"};
      if (std::find(known.begin(), known.end(), it.key()) == known.end())
        throw DataError(named + " has unknown key '" + it.key() + "'");
    }
    if (catalog.contains(spec.name)) throw DataError("catalog: duplicate feature name '" + spec.name + "'");
    catalog.add(std::move(spec));
  }

  for (const auto& spec : catalog.entries())
    for (const auto& part : spec.total_of)
      if (!catalog.contains(part))
        throw DataError("catalog: feature '" + spec.name + "' lists unknown component '" + part + "' in total_of");
  return catalog;
}

inline FeatureCatalog parse_catalog(std::string_view raw) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("catalog: malformed document: ") + e.what());
  }
  return catalog_from_json(doc);
}

inline nlohmann::ordered_json catalog_to_json(const FeatureCatalog& catalog) {
  nlohmann::ordered_json features = nlohmann::ordered_json::array();
  for (const auto& e : catalog.entries()) {
    nlohmann::ordered_json j;
    j["name"] = e.name;
    std::string cat(to_string(e.category));
    std::transform(cat.begin(), cat.end(), cat.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    j["category"] = cat;
    if (!e.description.empty()) j["description"] = e.description;
    if (e.lower_bound) j["min"] = *e.lower_bound;
    if (e.upper_bound) j["max"] = *e.upper_bound;
    if (!e.total_of.empty()) j["total_of"] = e.total_of;
    features.push_back(std::move(j));
  }
  nlohmann::ordered_json doc;
  doc["features"] = std::move(features);
  return doc;
}

/// The 31-variable catalog: rainfall and NDVI aggregates are Natural;
/// undernourishment (PEWI), inflation and currency variation are Economic;
/// fatality counts are Conflict; population density is Other.
inline const FeatureCatalog& default_catalog() {
  static const FeatureCatalog catalog = [] {
    using C = FamineCategory;
    auto f = [](std::string name, C cat, std::string desc, std::optional<double> lo = std::nullopt,
                std::optional<double> hi = std::nullopt, std::vector<std::string> total_of = {}) {
      return FeatureSpec{std::move(name), cat, std::move(desc), lo, hi, std::move(total_of)};
    };
    std::vector<FeatureSpec> v;
    v.push_back(f("pop_density", C::Other, "People per square kilometre, averaged over the first-level admin unit", 0.0));

    v.push_back(f("rainfall_value_mean_last_3month", C::Natural, "Mean measured rainfall over the last 3 months (mm)", 0.0));
    v.push_back(f("rainfall_value_min_last_3month", C::Natural, "Minimum measured rainfall over the last 3 months (mm)", 0.0));
    v.push_back(f("rainfall_value_max_last_3month", C::Natural, "Maximum measured rainfall over the last 3 months (mm)", 0.0));
    v.push_back(f("rainfall_value_mean_last_12month", C::Natural, "Mean measured rainfall over the last 12 months (mm)", 0.0));
    v.push_back(f("rainfall_1_month_anomaly_mean_last_3month", C::Natural, "Mean 1-month rainfall anomaly over the last 3 months (% of normal)", 0.0));
    v.push_back(f("rainfall_1_month_anomaly_min_last_3month", C::Natural, "Minimum 1-month rainfall anomaly over the last 3 months (% of normal)", 0.0));
    v.push_back(f("rainfall_1_month_anomaly_max_last_3month", C::Natural, "Maximum 1-month rainfall anomaly over the last 3 months (% of normal)", 0.0));
    v.push_back(f("rainfall_3_months_anomaly_mean_last_3month", C::Natural, "Mean 3-month rainfall anomaly over the last 3 months (% of normal)", 0.0));
    v.push_back(f("rainfall_3_months_anomaly_min_last_3month", C::Natural, "Minimum 3-month rainfall anomaly over the last 3 months (% of normal)", 0.0));
    v.push_back(f("rainfall_3_months_anomaly_max_last_3month", C::Natural, "Maximum 3-month rainfall anomaly over the last 3 months (% of normal)", 0.0));
    v.push_back(f("ndvi_value_mean_last_3month", C::Natural, "Mean NDVI over the last 3 months", -1.0, 1.0));
    v.push_back(f("ndvi_value_min_last_3month", C::Natural, "Minimum NDVI over the last 3 months", -1.0, 1.0));
    v.push_back(f("ndvi_value_max_last_3month", C::Natural, "Maximum NDVI over the last 3 months", -1.0, 1.0));
    v.push_back(f("ndvi_anomaly_mean_last_3month", C::Natural, "Mean NDVI anomaly over the last 3 months (% of normal)", 0.0));
    v.push_back(f("ndvi_anomaly_min_last_3month", C::Natural, "Minimum NDVI anomaly over the last 3 months (% of normal)", 0.0));
    v.push_back(f("ndvi_anomaly_max_last_3month", C::Natural, "Maximum NDVI anomaly over the last 3 months (% of normal)", 0.0));

    v.push_back(f("single_pewi_mean_last_3months", C::Economic, "Mean prevalence of undernourishment over the last 3 months (%)", 0.0, 100.0));
    v.push_back(f("single_pewi_min_last_3months", C::Economic, "Minimum prevalence of undernourishment over the last 3 months (%)", 0.0, 100.0));
    v.push_back(f("single_pewi_max_last_3months", C::Economic, "Maximum prevalence of undernourishment over the last 3 months (%)", 0.0, 100.0));
    v.push_back(f("headline_inflation_value", C::Economic, "Headline consumer price inflation (%)"));
    v.push_back(f("food_inflation_value", C::Economic, "Food price inflation (%)"));
    v.push_back(f("ce_variation_1month", C::Economic, "Currency exchange rate change over 1 month (%)"));
    v.push_back(f("ce_variation_3months", C::Economic, "Currency exchange rate change over 3 months (%)"));
    v.push_back(f("ce_variation_6months", C::Economic, "Currency exchange rate change over 6 months (%)"));

    v.push_back(f("num_fatalities_battles_90days_difference", C::Conflict, "Battle fatalities, rolling 90 days, 14-day lag", 0.0));
    v.push_back(f("num_fatalities_remote_violence_90days_difference", C::Conflict, "Remote violence fatalities, rolling 90 days, 14-day lag", 0.0));
    v.push_back(f("num_fatalities_vac_90days_difference", C::Conflict, "Violence against civilians fatalities, rolling 90 days, 14-day lag", 0.0));
    v.push_back(f("num_fatalities_battles_remote_violence_90days_difference", C::Conflict, "Battle plus remote violence fatalities, rolling 90 days, 14-day lag", 0.0));
    v.push_back(f("num_fatalities_vac_remote_violence_90days_difference", C::Conflict, "Violence against civilians plus remote violence fatalities, rolling 90 days, 14-day lag", 0.0));
    v.push_back(f("num_fatalities_total_90days_difference", C::Conflict, "Fatalities from all conflict event types, rolling 90 days, 14-day lag", 0.0,
                  std::nullopt,
                  {"num_fatalities_battles_90days_difference", "num_fatalities_remote_violence_90days_difference",
                   "num_fatalities_vac_90days_difference"}));
    return FeatureCatalog(std::move(v));
  }();
  return catalog;
}

}  // namespace famine
