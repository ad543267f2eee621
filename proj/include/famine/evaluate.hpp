#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "famine/catalog.hpp"
#include "famine/error.hpp"
#include "famine/models/model.hpp"
#include "famine/prepare.hpp"
#include "famine/rng.hpp"

namespace famine {

/// Mean of |predicted_i - actual_i|.
inline double mae(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size())
    throw std::invalid_argument("mae: length mismatch (" + std::to_string(predicted.size()) + " vs " +
                                std::to_string(actual.size()) + ")");
  if (predicted.empty()) throw std::invalid_argument("mae: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) s += std::abs(predicted[i] - actual[i]);
  return s / static_cast<double>(predicted.size());
}

struct ModelConfig {
  RandomForestParams forest;
  GradientBoostedParams boosting;
};

/// Per-kind values indexed by ModelKind.
template <typename T>
using PerModel = std::array<T, 3>;

inline constexpr std::size_t slot(ModelKind k) noexcept { return static_cast<std::size_t>(k); }

struct CountryEvaluation {
  std::string country;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  PerModel<double> mae{};
  ModelKind best_model = ModelKind::RandomForest;
  std::vector<double> test_actual;
  std::vector<double> best_predictions;
  std::vector<double> rf_predictions;
  // Random forest MDI per selected feature, in selected (catalog) order.
  std::vector<std::pair<std::string, double>> importances;
  std::vector<std::string> selected_features;
  std::vector<DroppedFeature> dropped_features;
  std::optional<std::string> linear_warning;
  // Fitted models (Linear, RandomForest, GradientBoosted) when requested.
  std::vector<Model> models;

  double mae_of(ModelKind k) const { return mae[slot(k)]; }

  /// Importances sorted by descending weight, catalog (selected) order on ties.
  std::vector<std::pair<std::string, double>> ranked_importances() const {
    auto out = importances;
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
  }
};

/// Fits the three model families on the training matrix and scores them on
/// the test matrix. Ties in MAE resolve RandomForest, then GradientBoosted,
/// then Linear.
inline CountryEvaluation evaluate_country(const PreparedCountry& prepared, const ModelConfig& config, std::uint64_t seed,
                                          bool keep_models = false, std::size_t threads = 1) {
  if (prepared.test_targets.empty()) throw DataError(prepared.country + ": empty test set");
  CountryEvaluation ev;
  ev.country = prepared.country;
  ev.n_train = prepared.train_targets.size();
  ev.n_test = prepared.test_targets.size();
  ev.selected_features = prepared.selected_features;
  ev.dropped_features = prepared.dropped_features;
  ev.test_actual = prepared.test_targets;

  PerModel<std::vector<double>> predictions;
  std::vector<Model> models;
  try {
    Model linear = fit_linear(prepared.train_matrix, prepared.train_targets);
    ev.linear_warning = std::get<LinearModel>(linear).conditioning_warning();
    Model forest = fit_random_forest(prepared.train_matrix, prepared.train_targets, config.forest,
                                     derive_seed(seed, std::uint64_t{1}), threads);
    Model boosted = fit_gbt(prepared.train_matrix, prepared.train_targets, config.boosting, derive_seed(seed, std::uint64_t{2}));
    models = {std::move(linear), std::move(forest), std::move(boosted)};
  } catch (const std::exception& e) {
    throw DataError(prepared.country + ": model fitting failed: " + e.what());
  }

  for (const auto& m : models) {
    const auto k = kind_of(m);
    predictions[slot(k)] = predict_rows(m, prepared.test_matrix);
    ev.mae[slot(k)] = mae(predictions[slot(k)], prepared.test_targets);
  }

  ev.best_model = kModelPreference[0];
  for (auto k : kModelPreference)
    if (ev.mae[slot(k)] < ev.mae[slot(ev.best_model)]) ev.best_model = k;

  const auto& forest = std::get<RandomForestModel>(models[slot(ModelKind::RandomForest)]);
  for (std::size_t j = 0; j < prepared.selected_features.size(); ++j)
    ev.importances.emplace_back(prepared.selected_features[j], forest.importances()[j]);

  ev.best_predictions = std::move(predictions[slot(ev.best_model)]);
  ev.rf_predictions = predict_rows(models[slot(ModelKind::RandomForest)], prepared.test_matrix);
  if (keep_models) ev.models = std::move(models);
  return ev;
}

struct ComparisonPoint {
  std::string country;
  double rf_mae;
  double gbt_mae;
};

struct SpreadEntry {
  std::string feature;
  std::size_t top5_count = 0;
  std::size_t bottom4_count = 0;
  std::size_t countries = 0;  // evaluated countries that selected the feature
  friend bool operator==(const SpreadEntry&, const SpreadEntry&) = default;
};

struct ImportanceSpread {
  std::vector<SpreadEntry> entries;
};

struct GlobalReport {
  std::vector<CountryEvaluation> evaluations;  // sorted by country code
  std::vector<Skip> skipped;                   // sorted by country code
  double average_rf_mae = 0.0;
  PerModel<double> average_mae_per_model{};
  std::vector<ComparisonPoint> comparison_points;
  // Filled by categorize.
  std::map<std::string, FamineCategory> category_assignments;
  std::map<std::string, std::map<FamineCategory, double>> category_scores;
  std::map<FamineCategory, double> category_proportions;
  ImportanceSpread importance_spread;
};

/// Folds per-country results in country-code order.
inline GlobalReport aggregate(std::vector<CountryEvaluation> evaluations, std::vector<Skip> skipped) {
  if (evaluations.empty()) throw DataError("no evaluable countries");
  std::sort(evaluations.begin(), evaluations.end(),
            [](const CountryEvaluation& a, const CountryEvaluation& b) { return a.country < b.country; });
  std::sort(skipped.begin(), skipped.end(), [](const Skip& a, const Skip& b) { return a.country < b.country; });

  GlobalReport report;
  PerModel<double> sums{};
  for (const auto& ev : evaluations) {
    for (std::size_t k = 0; k < 3; ++k) sums[k] += ev.mae[k];
    report.comparison_points.push_back(
        {ev.country, ev.mae_of(ModelKind::RandomForest), ev.mae_of(ModelKind::GradientBoosted)});
  }
  const double n = static_cast<double>(evaluations.size());
  for (std::size_t k = 0; k < 3; ++k) report.average_mae_per_model[k] = sums[k] / n;
  report.average_rf_mae = report.average_mae_per_model[slot(ModelKind::RandomForest)];
  report.evaluations = std::move(evaluations);
  report.skipped = std::move(skipped);
  return report;
}

}  // namespace famine
