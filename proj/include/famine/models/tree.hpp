#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "famine/numeric.hpp"
#include "famine/rng.hpp"

namespace famine {

struct TreeParams {
  std::optional<std::size_t> max_depth;  // nullopt = unlimited
  std::size_t min_samples_leaf = 1;
  std::size_t mtry = 0;  // candidate features per node, 0 = all

  void check(std::size_t n_features) const {
    if (min_samples_leaf < 1) throw std::invalid_argument("TreeParams: min_samples_leaf must be >= 1");
    if (mtry > n_features)
      throw std::invalid_argument("TreeParams: mtry " + std::to_string(mtry) + " exceeds feature count " +
                                  std::to_string(n_features));
  }
};

/// Internal nodes route rows with x[feature] <= threshold to `left`.
struct TreeNode {
  bool leaf = true;
  std::uint32_t feature = 0;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double value = 0.0;       // mean training target of the node
  std::size_t count = 0;    // training samples reaching the node
  double gain = 0.0;        // impurity decrease of the split, 0 for leaves

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class RegressionTree {
 public:
  RegressionTree() = default;
  RegressionTree(std::vector<TreeNode> nodes, std::size_t n_features)
      : nodes_(std::move(nodes)), n_features_(n_features) {}

  static RegressionTree constant(double value, std::size_t count, std::size_t n_features) {
    TreeNode leaf;
    leaf.value = value;
    leaf.count = count;
    return RegressionTree({leaf}, n_features);
  }

  double predict(std::span<const double> row) const {
    if (row.size() != n_features_)
      throw std::invalid_argument("RegressionTree::predict: row has " + std::to_string(row.size()) + " values, expected " +
                                  std::to_string(n_features_));
    return nodes_[leaf_index(row)].value;
  }

  std::size_t leaf_index(std::span<const double> row) const {
    std::size_t i = 0;
    while (!nodes_[i].leaf) i = row[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
    return i;
  }

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t n_features() const noexcept { return n_features_; }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.leaf; }));
  }
  std::size_t split_count() const { return nodes_.size() - leaf_count(); }

  std::size_t depth() const { return nodes_.empty() ? 0 : depth_from(0); }

  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

 private:
  std::size_t depth_from(std::size_t i) const {
    if (nodes_[i].leaf) return 0;
    return 1 + std::max(depth_from(nodes_[i].left), depth_from(nodes_[i].right));
  }

  std::vector<TreeNode> nodes_;
  std::size_t n_features_ = 0;
};

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

namespace detail {

// Relative slack for comparing gains. Gains closer than this fraction of the
// parent's sum of squares count as ties, so rounding noise cannot override
// the (feature, threshold) tie order.
inline constexpr double kGainTolerance = 1e-12;

struct SplitScratch {
  std::vector<std::pair<double, double>> pairs;  // (feature value, centered target)
};

/// Best split over the samples `rows` (duplicates allowed). Gain is
/// n*Var(parent) - n_L*Var(L) - n_R*Var(R) with population variances.
inline std::optional<SplitCandidate> best_split_rows(const Matrix& x, std::span<const double> y,
                                                     std::span<const std::size_t> rows,
                                                     std::span<const std::size_t> candidates,
                                                     std::size_t min_samples_leaf, SplitScratch& scratch) {
  const std::size_t m = rows.size();
  if (m < 2 || m < 2 * min_samples_leaf) return std::nullopt;

  double sum = 0.0;
  for (std::size_t r : rows) sum += y[r];
  const double mean = sum / static_cast<double>(m);
  double sse = 0.0;
  for (std::size_t r : rows) sse += (y[r] - mean) * (y[r] - mean);
  if (!(sse > 0.0)) return std::nullopt;
  const double tol = kGainTolerance * sse;
  const double md = static_cast<double>(m);

  std::optional<SplitCandidate> best;
  auto& pairs = scratch.pairs;
  for (std::size_t f : candidates) {
    pairs.resize(m);
    for (std::size_t i = 0; i < m; ++i) pairs[i] = {x(rows[i], f), y[rows[i]] - mean};
    std::sort(pairs.begin(), pairs.end());
    if (pairs.front().first == pairs.back().first) continue;

    double total = 0.0;
    for (const auto& p : pairs) total += p.second;
    const double parent_term = total * total / md;

    double left = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      left += pairs[i].second;
      const std::size_t nl = i + 1;
      const std::size_t nr = m - nl;
      if (nr < min_samples_leaf) break;
      if (nl < min_samples_leaf || pairs[i].first == pairs[i + 1].first) continue;
      const double right = total - left;
      const double gain = left * left / static_cast<double>(nl) + right * right / static_cast<double>(nr) - parent_term;
      if (!(gain > tol)) continue;
      if (best && !(gain > best->gain + tol)) continue;
      const double a = pairs[i].first, b = pairs[i + 1].first;
      double threshold = a + (b - a) / 2.0;
      if (!(threshold < b)) threshold = a;
      best = SplitCandidate{f, threshold, gain};
    }
  }
  return best;
}

}  // namespace detail

/// Maximum-gain axis-aligned split over all rows of `x`. Candidate features
/// are visited in ascending order; ties keep the lower feature index, then
/// the lower threshold. Returns nullopt when no legal split has positive gain.
inline std::optional<SplitCandidate> best_split(const Matrix& x, std::span<const double> y,
                                                std::span<const std::size_t> candidate_features,
                                                std::size_t min_samples_leaf) {
  if (x.rows() != y.size()) throw std::invalid_argument("best_split: row count mismatch");
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<std::size_t> candidates(candidate_features.begin(), candidate_features.end());
  std::sort(candidates.begin(), candidates.end());
  detail::SplitScratch scratch;
  return detail::best_split_rows(x, y, rows, candidates, min_samples_leaf, scratch);
}

namespace detail {

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const double> y, const TreeParams& params, RngStream& rng)
      : x_(x), y_(y), params_(params), rng_(rng) {
    all_features_.resize(x.cols());
    std::iota(all_features_.begin(), all_features_.end(), 0);
  }

  RegressionTree build(std::vector<std::size_t> rows) {
    rows_ = std::move(rows);
    grow(0, rows_.size(), 0);
    return RegressionTree(std::move(nodes_), x_.cols());
  }

 private:
  std::uint32_t grow(std::size_t begin, std::size_t end, std::size_t depth) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    const std::span<const std::size_t> rows(rows_.data() + begin, end - begin);

    double sum = 0.0;
    for (std::size_t r : rows) sum += y_[r];
    nodes_[id].value = sum / static_cast<double>(rows.size());
    nodes_[id].count = rows.size();

    if (params_.max_depth && depth >= *params_.max_depth) return id;
    if (rows.size() < 2 * params_.min_samples_leaf) return id;

    std::span<const std::size_t> candidates = all_features_;
    std::vector<std::size_t> sampled;
    if (params_.mtry > 0 && params_.mtry < x_.cols()) {
      sampled = rng_.sample_without_replacement(x_.cols(), params_.mtry);
      candidates = sampled;
    }
    auto split = best_split_rows(x_, y_, rows, candidates, params_.min_samples_leaf, scratch_);
    if (!split) return id;

    const auto mid_it = std::stable_partition(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                                              rows_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t r) {
                                                return x_(r, split->feature) <= split->threshold;
                                              });
    const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());

    nodes_[id].leaf = false;
    nodes_[id].feature = static_cast<std::uint32_t>(split->feature);
    nodes_[id].threshold = split->threshold;
    nodes_[id].gain = split->gain;
    const auto left = grow(begin, mid, depth + 1);
    const auto right = grow(mid, end, depth + 1);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  const Matrix& x_;
  std::span<const double> y_;
  const TreeParams& params_;
  RngStream& rng_;
  std::vector<std::size_t> all_features_;
  std::vector<std::size_t> rows_;
  std::vector<TreeNode> nodes_;
  SplitScratch scratch_;
};

}  // namespace detail

/// Greedy CART regression tree over the given sample (duplicates allowed).
inline RegressionTree fit_tree(const Matrix& x, std::span<const double> y, std::vector<std::size_t> sample,
                               const TreeParams& params, RngStream& rng) {
  if (x.rows() == 0 || x.cols() == 0) throw std::invalid_argument("fit_tree: empty feature matrix");
  if (x.rows() != y.size()) throw std::invalid_argument("fit_tree: row count mismatch");
  if (sample.empty()) throw std::invalid_argument("fit_tree: empty sample");
  params.check(x.cols());
  return detail::TreeBuilder(x, y, params, rng).build(std::move(sample));
}

inline RegressionTree fit_tree(const Matrix& x, std::span<const double> y, const TreeParams& params, RngStream& rng) {
  std::vector<std::size_t> all(x.rows());
  std::iota(all.begin(), all.end(), 0);
  return fit_tree(x, y, std::move(all), params, rng);
}

}  // namespace famine
