#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "famine/models/boosting.hpp"
#include "famine/models/forest.hpp"
#include "famine/models/linear.hpp"
#include "famine/models/tree.hpp"
#include "famine/numeric.hpp"

namespace famine {

enum class ModelKind { Linear, RandomForest, GradientBoosted };

/// Tie-break order when two kinds reach the same error.
inline constexpr std::array<ModelKind, 3> kModelPreference = {ModelKind::RandomForest, ModelKind::GradientBoosted,
                                                              ModelKind::Linear};

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Linear: return "linear";
    case ModelKind::RandomForest: return "random_forest";
    case ModelKind::GradientBoosted: return "gradient_boosted";
  }
  return "linear";
}

inline std::optional<ModelKind> parse_model_kind(std::string_view s) {
  for (auto k : {ModelKind::Linear, ModelKind::RandomForest, ModelKind::GradientBoosted})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

using Model = std::variant<LinearModel, RandomForestModel, GradientBoostedModel>;

inline ModelKind kind_of(const Model& m) {
  return std::visit(
      [](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, LinearModel>) return ModelKind::Linear;
        else if constexpr (std::is_same_v<T, RandomForestModel>) return ModelKind::RandomForest;
        else return ModelKind::GradientBoosted;
      },
      m);
}

inline double predict(const Model& m, std::span<const double> row) {
  return std::visit([&](const auto& model) { return model.predict(row); }, m);
}

inline double predict(const RegressionTree& t, std::span<const double> row) { return t.predict(row); }

inline std::vector<double> predict_rows(const Model& m, const Matrix& x) {
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(m, x.row(r));
  return out;
}

// ---- audit dump -----------------------------------------------------------
//
// Numbers are written as shortest round-trip decimal strings so a dump is
// byte-stable; the format is described in docs/model_dump.md.

namespace detail {

inline nlohmann::ordered_json num(double v) { return format_double(v); }

inline nlohmann::ordered_json tree_params_json(const TreeParams& p) {
  nlohmann::ordered_json j;
  j["max_depth"] = p.max_depth ? nlohmann::ordered_json(*p.max_depth) : nlohmann::ordered_json(nullptr);
  j["min_samples_leaf"] = p.min_samples_leaf;
  j["mtry"] = p.mtry;
  return j;
}

}  // namespace detail

inline nlohmann::ordered_json tree_to_json(const RegressionTree& tree) {
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const auto& n : tree.nodes()) {
    nlohmann::ordered_json j;
    if (n.leaf) {
      j["leaf"] = true;
      j["value"] = detail::num(n.value);
      j["count"] = n.count;
    } else {
      j["leaf"] = false;
      j["feature"] = n.feature;
      j["threshold"] = detail::num(n.threshold);
      j["left"] = n.left;
      j["right"] = n.right;
      j["gain"] = detail::num(n.gain);
      j["count"] = n.count;
    }
    nodes.push_back(std::move(j));
  }
  return nodes;
}

inline nlohmann::ordered_json model_to_json(const Model& model, std::span<const std::string> feature_names = {}) {
  nlohmann::ordered_json j;
  j["format"] = "famine-model/1";
  j["kind"] = std::string(to_string(kind_of(model)));
  if (!feature_names.empty()) j["features"] = std::vector<std::string>(feature_names.begin(), feature_names.end());
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        j["n_features"] = m.n_features();
        if constexpr (std::is_same_v<T, LinearModel>) {
          j["intercept"] = detail::num(m.intercept());
          nlohmann::ordered_json c = nlohmann::ordered_json::array();
          for (double v : m.coefficients()) c.push_back(detail::num(v));
          j["coefficients"] = std::move(c);
          j["conditioning_warning"] = m.conditioning_warning() ? nlohmann::ordered_json(*m.conditioning_warning())
                                                               : nlohmann::ordered_json(nullptr);
        } else if constexpr (std::is_same_v<T, RandomForestModel>) {
          const auto& p = m.params();
          j["params"] = {{"n_trees", p.n_trees}, {"bootstrap", p.bootstrap}};
          j["params"]["tree"] = detail::tree_params_json(p.tree_params(m.n_features()));
          j["seed"] = std::to_string(m.seed());
          nlohmann::ordered_json imp = nlohmann::ordered_json::array();
          for (double v : m.importances()) imp.push_back(detail::num(v));
          j["importances"] = std::move(imp);
          nlohmann::ordered_json trees = nlohmann::ordered_json::array();
          for (const auto& t : m.trees()) trees.push_back(tree_to_json(t));
          j["trees"] = std::move(trees);
        } else {
          const auto& p = m.params();
          j["params"] = {{"rounds", p.rounds}, {"learning_rate", detail::num(p.learning_rate)}};
          j["params"]["tree"] = detail::tree_params_json(p.tree);
          j["base_score"] = detail::num(m.base_score());
          nlohmann::ordered_json trees = nlohmann::ordered_json::array();
          for (const auto& t : m.trees()) trees.push_back(tree_to_json(t));
          j["trees"] = std::move(trees);
        }
      },
      model);
  return j;
}

}  // namespace famine
