#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "famine/models/tree.hpp"
#include "famine/parallel.hpp"
#include "famine/rng.hpp"

namespace famine {

struct RandomForestParams {
  std::size_t n_trees = 300;
  std::optional<std::size_t> max_depth;
  std::size_t min_samples_leaf = 2;
  std::optional<std::size_t> mtry;  // nullopt = max(1, floor(p / 3))
  bool bootstrap = true;            // false only for degenerate-ensemble checks

  TreeParams tree_params(std::size_t n_features) const {
    TreeParams t;
    t.max_depth = max_depth;
    t.min_samples_leaf = min_samples_leaf;
    t.mtry = mtry ? *mtry : std::max<std::size_t>(1, n_features / 3);
    if (t.mtry >= n_features) t.mtry = 0;
    return t;
  }
};

class RandomForestModel {
 public:
  RandomForestModel(std::vector<RegressionTree> trees, RandomForestParams params, std::uint64_t seed, std::size_t n_features);

  /// Arithmetic mean of the member trees: summed in index order, divided once.
  double predict(std::span<const double> row) const {
    if (row.size() != n_features_)
      throw std::invalid_argument("RandomForestModel::predict: row has " + std::to_string(row.size()) +
                                  " values, expected " + std::to_string(n_features_));
    double sum = 0.0;
    for (const auto& t : trees_) sum += t.predict(row);
    return sum / static_cast<double>(trees_.size());
  }

  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
  const RandomForestParams& params() const noexcept { return params_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t n_features() const noexcept { return n_features_; }
  std::size_t n_trees() const noexcept { return trees_.size(); }
  const std::vector<double>& importances() const noexcept { return importances_; }

  friend bool operator==(const RandomForestModel& a, const RandomForestModel& b) {
    return a.trees_ == b.trees_ && a.seed_ == b.seed_ && a.n_features_ == b.n_features_ &&
           a.importances_ == b.importances_;
  }

 private:
  std::vector<RegressionTree> trees_;
  RandomForestParams params_;
  std::uint64_t seed_ = 0;
  std::size_t n_features_ = 0;
  std::vector<double> importances_;
};

/// Mean decrease in impurity. Each tree's split gains are summed per feature
/// and normalized to 1 (split-free trees contribute zeros); the forest vector
/// is the mean over trees, renormalized to 1 when nonzero.
inline std::vector<double> mdi_importance(std::span<const RegressionTree> trees, std::size_t n_features) {
  std::vector<double> total(n_features, 0.0);
  std::vector<double> per_tree(n_features);
  for (const auto& tree : trees) {
    std::fill(per_tree.begin(), per_tree.end(), 0.0);
    double tree_sum = 0.0;
    for (const auto& node : tree.nodes()) {
      if (node.leaf) continue;
      per_tree[node.feature] += node.gain;
      tree_sum += node.gain;
    }
    if (!(tree_sum > 0.0)) continue;
    for (std::size_t f = 0; f < n_features; ++f) total[f] += per_tree[f] / tree_sum;
  }
  if (!trees.empty())
    for (auto& v : total) v /= static_cast<double>(trees.size());
  double sum = 0.0;
  for (double v : total) sum += v;
  if (sum > 0.0)
    for (auto& v : total) v /= sum;
  return total;
}

inline std::vector<double> mdi_importance(const RandomForestModel& forest) {
  return mdi_importance(forest.trees(), forest.n_features());
}

inline RandomForestModel::RandomForestModel(std::vector<RegressionTree> trees, RandomForestParams params,
                                            std::uint64_t seed, std::size_t n_features)
    : trees_(std::move(trees)), params_(params), seed_(seed), n_features_(n_features) {
  if (trees_.empty()) throw std::invalid_argument("RandomForestModel: at least one tree is required");
  importances_ = mdi_importance(trees_, n_features_);
}

/// Bagged CART ensemble. Tree t draws its bootstrap sample and its per-node
/// feature subsets from the stream derive_seed(seed, t), so the fitted model
/// does not depend on `threads`.
inline RandomForestModel fit_random_forest(const Matrix& x, std::span<const double> y, const RandomForestParams& params,
                                           std::uint64_t seed, std::size_t threads = 1) {
  if (params.n_trees == 0) throw std::invalid_argument("fit_random_forest: n_trees must be > 0");
  if (x.rows() == 0 || x.cols() == 0) throw std::invalid_argument("fit_random_forest: empty feature matrix");
  if (x.rows() != y.size()) throw std::invalid_argument("fit_random_forest: row count mismatch");
  const TreeParams tree_params = params.tree_params(x.cols());
  tree_params.check(x.cols());

  const std::size_t n = x.rows();
  std::vector<RegressionTree> trees(params.n_trees);
  parallel_for(params.n_trees, threads, [&](std::size_t t) {
    RngStream rng(derive_seed(seed, t));
    std::vector<std::size_t> sample(n);
    if (params.bootstrap) {
      for (auto& s : sample) s = static_cast<std::size_t>(rng.below(n));
      std::sort(sample.begin(), sample.end());
    } else {
      for (std::size_t i = 0; i < n; ++i) sample[i] = i;
    }
    trees[t] = fit_tree(x, y, std::move(sample), tree_params, rng);
  });
  return RandomForestModel(std::move(trees), params, seed, x.cols());
}

}  // namespace famine
