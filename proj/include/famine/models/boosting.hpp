#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "famine/models/tree.hpp"
#include "famine/rng.hpp"

namespace famine {

struct GradientBoostedParams {
  std::size_t rounds = 300;
  double learning_rate = 0.1;
  TreeParams tree{4, 1, 0};
};

/// First-order least-squares boosting: prediction = base_score +
/// learning_rate * sum of tree outputs.
class GradientBoostedModel {
 public:
  GradientBoostedModel(double base_score, std::vector<RegressionTree> trees, GradientBoostedParams params,
                       std::size_t n_features, std::vector<double> training_mse = {})
      : base_score_(base_score),
        trees_(std::move(trees)),
        params_(params),
        n_features_(n_features),
        training_mse_(std::move(training_mse)) {}

  double predict(std::span<const double> row) const {
    if (row.size() != n_features_)
      throw std::invalid_argument("GradientBoostedModel::predict: row has " + std::to_string(row.size()) +
                                  " values, expected " + std::to_string(n_features_));
    double sum = 0.0;
    for (const auto& t : trees_) sum += t.predict(row);
    return base_score_ + params_.learning_rate * sum;
  }

  double base_score() const noexcept { return base_score_; }
  double learning_rate() const noexcept { return params_.learning_rate; }
  std::size_t rounds() const noexcept { return trees_.size(); }
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
  const GradientBoostedParams& params() const noexcept { return params_; }
  std::size_t n_features() const noexcept { return n_features_; }
  /// Training MSE before the first round and after each round.
  const std::vector<double>& training_mse() const noexcept { return training_mse_; }

  friend bool operator==(const GradientBoostedModel& a, const GradientBoostedModel& b) {
    return a.base_score_ == b.base_score_ && a.trees_ == b.trees_ && a.n_features_ == b.n_features_;
  }

 private:
  double base_score_ = 0.0;
  std::vector<RegressionTree> trees_;
  GradientBoostedParams params_;
  std::size_t n_features_ = 0;
  std::vector<double> training_mse_;
};

inline GradientBoostedModel fit_gbt(const Matrix& x, std::span<const double> y, const GradientBoostedParams& params,
                                    std::uint64_t seed) {
  if (x.rows() == 0 || x.cols() == 0) throw std::invalid_argument("fit_gbt: empty feature matrix");
  if (x.rows() != y.size()) throw std::invalid_argument("fit_gbt: row count mismatch");
  if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0))
    throw std::invalid_argument("fit_gbt: learning_rate must lie in (0, 1]");
  params.tree.check(x.cols());

  const std::size_t n = x.rows();
  const double base = mean_of(y);
  std::vector<double> fitted(n, base);
  std::vector<double> residual(n);
  auto mse = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (y[i] - fitted[i]) * (y[i] - fitted[i]);
    return s / static_cast<double>(n);
  };

  RngStream rng(seed);
  std::vector<RegressionTree> trees;
  trees.reserve(params.rounds);
  std::vector<double> history{mse()};
  for (std::size_t round = 0; round < params.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - fitted[i];
    auto tree = fit_tree(x, residual, params.tree, rng);
    for (std::size_t i = 0; i < n; ++i) fitted[i] += params.learning_rate * tree.predict(x.row(i));
    trees.push_back(std::move(tree));
    history.push_back(mse());
  }
  return GradientBoostedModel(base, std::move(trees), params, x.cols(), std::move(history));
}

}  // namespace famine
