#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "famine/catalog.hpp"
#include "famine/config.hpp"
#include "famine/csv.hpp"
#include "famine/error.hpp"
#include "famine/evaluate.hpp"
#include "famine/models/model.hpp"
#include "famine/numeric.hpp"
#include "famine/svg.hpp"
#include "famine/validate.hpp"

namespace famine {

/// Everything a run produced, plus the files written for it.
struct ReportBundle {
  GlobalReport report;
  ValidationReport validation;
  std::filesystem::path out_dir;
  std::filesystem::path report_json;
  std::filesystem::path per_country_csv;
  std::filesystem::path categories_json;
  std::filesystem::path spread_csv;
  std::map<std::string, std::filesystem::path> predictions;
  std::map<std::string, std::filesystem::path> importances;
  std::vector<std::filesystem::path> charts;
  std::vector<std::filesystem::path> model_dumps;

  std::vector<std::filesystem::path> all_paths() const {
    std::vector<std::filesystem::path> out{report_json, per_country_csv, categories_json, spread_csv};
    for (const auto& [_, p] : predictions) out.push_back(p);
    for (const auto& [_, p] : importances) out.push_back(p);
    out.insert(out.end(), charts.begin(), charts.end());
    out.insert(out.end(), model_dumps.begin(), model_dumps.end());
    return out;
  }
};

namespace detail {

// Writes to "<path>.tmp" and renames over the target, so a reader never sees
// a half-written file; the temp file is removed if anything fails.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw UsageError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (out) out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      throw UsageError("cannot write '" + path.string() + "'");
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw UsageError("cannot move '" + tmp.string() + "' into place: " + ec.message());
  }
}

inline nlohmann::ordered_json per_model_json(const PerModel<double>& v) {
  nlohmann::ordered_json j;
  for (auto k : {ModelKind::Linear, ModelKind::RandomForest, ModelKind::GradientBoosted})
    j[std::string(to_string(k))] = v[slot(k)];
  return j;
}

inline nlohmann::ordered_json category_map_json(const std::map<FamineCategory, double>& m) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (auto c : kScoredCategories)
    if (auto it = m.find(c); it != m.end()) j[std::string(to_string(c))] = it->second;
  return j;
}

inline std::string csv_text(const std::vector<std::vector<std::string>>& records) {
  std::ostringstream out;
  for (const auto& r : records) csv::write_record(out, r);
  return out.str();
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const GlobalReport& report, const ValidationReport& validation,
                                             const RunConfig& config) {
  nlohmann::ordered_json j;

  auto& summary = j["summary"];
  summary["countries_evaluated"] = report.evaluations.size();
  summary["countries_skipped"] = report.skipped.size();
  summary["average_rf_mae"] = report.average_rf_mae;
  summary["average_mae_per_model"] = detail::per_model_json(report.average_mae_per_model);
  {
    std::map<ModelKind, std::size_t> wins;
    for (const auto& ev : report.evaluations) ++wins[ev.best_model];
    nlohmann::ordered_json w;
    for (auto k : {ModelKind::Linear, ModelKind::RandomForest, ModelKind::GradientBoosted})
      w[std::string(to_string(k))] = wins[k];
    summary["best_model_counts"] = std::move(w);
  }
  summary["category_proportions"] = detail::category_map_json(report.category_proportions);
  summary["validation"] = {
      {"rows", [&] {
         std::size_t n = 0;
         for (const auto& [_, c] : validation.row_counts_per_country) n += c;
         return n;
       }()},
      {"target_range_violations", validation.target_range_violations.size()},
      {"bound_violations", validation.bound_violations.size()},
      {"duplicate_keys", validation.duplicate_keys.size()},
      {"conflict_consistency_warnings", validation.conflict_consistency_warnings.size()}};

  auto& countries = j["countries"];
  countries = nlohmann::ordered_json::array();
  for (const auto& ev : report.evaluations) {
    nlohmann::ordered_json c;
    c["country"] = ev.country;
    c["n_train"] = ev.n_train;
    c["n_test"] = ev.n_test;
    c["mae"] = detail::per_model_json(ev.mae);
    c["best_model"] = std::string(to_string(ev.best_model));
    auto cat = report.category_assignments.find(ev.country);
    c["category"] = cat == report.category_assignments.end() ? nlohmann::ordered_json(nullptr)
                                                              : nlohmann::ordered_json(std::string(to_string(cat->second)));
    auto scores = report.category_scores.find(ev.country);
    c["category_scores"] = scores == report.category_scores.end() ? nlohmann::ordered_json::object()
                                                                   : detail::category_map_json(scores->second);
    c["selected_features"] = ev.selected_features;
    nlohmann::ordered_json dropped = nlohmann::ordered_json::array();
    for (const auto& d : ev.dropped_features) dropped.push_back({{"feature", d.feature}, {"reason", d.reason}});
    c["dropped_features"] = std::move(dropped);
    nlohmann::ordered_json imp = nlohmann::ordered_json::array();
    for (const auto& [name, w] : ev.ranked_importances()) imp.push_back({{"feature", name}, {"importance", w}});
    c["importances"] = std::move(imp);
    c["linear_warning"] = ev.linear_warning ? nlohmann::ordered_json(*ev.linear_warning) : nlohmann::ordered_json(nullptr);
    countries.push_back(std::move(c));
  }

  auto& categories = j["categories"];
  categories = nlohmann::ordered_json::object();
  for (const auto& [country, cat] : report.category_assignments) categories[country] = std::string(to_string(cat));

  auto& spread = j["spread"];
  spread = nlohmann::ordered_json::array();
  for (const auto& e : report.importance_spread.entries)
    spread.push_back({{"feature", e.feature},
                      {"top5_count", e.top5_count},
                      {"bottom4_count", e.bottom4_count},
                      {"countries", e.countries}});

  auto& skipped = j["skipped"];
  skipped = nlohmann::ordered_json::array();
  for (const auto& s : report.skipped) skipped.push_back({{"country", s.country}, {"reason", s.reason}});

  j["config_echo"] = config_echo(config);
  j["seed"] = config.prepare.seed;
  return j;
}

/// Writes every report artifact under `out_dir`. Each file goes through a
/// temp-then-rename step; an existing directory is reused.
inline ReportBundle emit_reports(const GlobalReport& report, const ValidationReport& validation, const FeatureCatalog& catalog,
                                 const RunConfig& config, const std::filesystem::path& out_dir) {
  if (report.evaluations.empty()) throw DataError("no evaluable countries");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir))
    throw UsageError("cannot create output directory '" + out_dir.string() + "'" + (ec ? ": " + ec.message() : ""));

  ReportBundle b;
  b.report = report;
  b.validation = validation;
  b.out_dir = out_dir;

  b.report_json = out_dir / "report.json";
  detail::write_file_atomic(b.report_json, report_to_json(report, validation, config).dump(2) + "\n");

  {
    std::vector<std::vector<std::string>> rows{{"country", "n_train", "n_test", "mae_linear", "mae_random_forest",
                                                "mae_gradient_boosted", "best_model", "category"}};
    for (const auto& ev : report.evaluations) {
      auto cat = report.category_assignments.find(ev.country);
      rows.push_back({ev.country, std::to_string(ev.n_train), std::to_string(ev.n_test),
                      format_double(ev.mae_of(ModelKind::Linear)), format_double(ev.mae_of(ModelKind::RandomForest)),
                      format_double(ev.mae_of(ModelKind::GradientBoosted)), std::string(to_string(ev.best_model)),
                      cat == report.category_assignments.end() ? "" : std::string(to_string(cat->second))});
    }
    b.per_country_csv = out_dir / "per_country.csv";
    detail::write_file_atomic(b.per_country_csv, detail::csv_text(rows));
  }

  for (const auto& ev : report.evaluations) {
    std::vector<std::vector<std::string>> rows{{"actual", "predicted_best", "predicted_random_forest"}};
    for (std::size_t i = 0; i < ev.test_actual.size(); ++i)
      rows.push_back({format_double(ev.test_actual[i]), format_double(ev.best_predictions[i]),
                      format_double(ev.rf_predictions[i])});
    auto path = out_dir / "predictions" / (ev.country + ".csv");
    detail::write_file_atomic(path, detail::csv_text(rows));
    b.predictions[ev.country] = path;

    std::vector<std::vector<std::string>> imp{{"rank", "feature", "category", "importance"}};
    const auto ranked = ev.ranked_importances();
    for (std::size_t r = 0; r < ranked.size(); ++r)
      imp.push_back({std::to_string(r + 1), ranked[r].first, std::string(to_string(catalog.category_of(ranked[r].first))),
                     format_double(ranked[r].second)});
    path = out_dir / "importances" / (ev.country + ".csv");
    detail::write_file_atomic(path, detail::csv_text(imp));
    b.importances[ev.country] = path;
  }

  {
    nlohmann::ordered_json cats = nlohmann::ordered_json::object();
    for (const auto& ev : report.evaluations) {
      auto it = report.category_assignments.find(ev.country);
      cats[ev.country] = it == report.category_assignments.end() ? nlohmann::ordered_json(nullptr)
                                                                 : nlohmann::ordered_json(std::string(to_string(it->second)));
    }
    b.categories_json = out_dir / "categories.json";
    detail::write_file_atomic(b.categories_json, cats.dump(2) + "\n");
  }

  {
    std::vector<std::vector<std::string>> rows{{"feature", "top5_count", "bottom4_count", "countries"}};
    for (const auto& e : report.importance_spread.entries)
      rows.push_back({e.feature, std::to_string(e.top5_count), std::to_string(e.bottom4_count), std::to_string(e.countries)});
    b.spread_csv = out_dir / "spread.csv";
    detail::write_file_atomic(b.spread_csv, detail::csv_text(rows));
  }

  const auto charts = out_dir / "charts";
  {
    std::vector<svg::Bar> bars;
    for (const auto& ev : report.evaluations) bars.push_back({ev.country, ev.mae_of(ModelKind::RandomForest)});
    auto path = charts / "mae_by_country.svg";
    detail::write_file_atomic(path, svg::bar_chart("Random forest test MAE by country", "MAE", bars));
    b.charts.push_back(path);
  }
  {
    std::vector<svg::Point> pts;
    for (const auto& p : report.comparison_points) pts.push_back({p.rf_mae, p.gbt_mae, p.country});
    auto path = charts / "rf_vs_gbt.svg";
    detail::write_file_atomic(path, svg::identity_scatter("Random forest vs gradient boosting (test MAE)",
                                                          "random forest MAE", "gradient boosting MAE", pts));
    b.charts.push_back(path);
  }
  for (const auto& ev : report.evaluations) {
    std::vector<svg::Point> pts;
    for (std::size_t i = 0; i < ev.test_actual.size(); ++i) pts.push_back({ev.test_actual[i], ev.best_predictions[i], {}});
    auto path = charts / ("actual_vs_predicted_" + ev.country + ".svg");
    detail::write_file_atomic(path, svg::identity_scatter(ev.country + ": actual vs predicted (" +
                                                              std::string(to_string(ev.best_model)) + ")",
                                                          "actual", "predicted", pts));
    b.charts.push_back(path);
  }

  if (config.dump_models) {
    for (const auto& ev : report.evaluations) {
      for (const auto& m : ev.models) {
        auto path = out_dir / "models" / ev.country / (std::string(to_string(kind_of(m))) + ".json");
        detail::write_file_atomic(path, model_to_json(m, ev.selected_features).dump() + "\n");
        b.model_dumps.push_back(path);
      }
    }
  }
  return b;
}

}  // namespace famine
