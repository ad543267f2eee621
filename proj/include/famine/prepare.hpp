#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "famine/dataset.hpp"
#include "famine/error.hpp"
#include "famine/numeric.hpp"
#include "famine/rng.hpp"
#include "famine/validate.hpp"

namespace famine {

enum class SplitMode { Random, Chronological };

struct PrepareConfig {
  double availability_threshold = 0.5;  // strict: kept iff fraction > threshold
  double test_fraction = 0.2;
  SplitMode split_mode = SplitMode::Random;
  std::size_t min_rows = 40;
  std::uint64_t seed = 0;

  void check() const {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw UsageError("test_fraction must lie in (0, 1)");
    if (!(availability_threshold >= 0.0 && availability_threshold <= 1.0))
      throw UsageError("availability_threshold must lie in [0, 1]");
    if (min_rows < 5) throw UsageError("min_rows must be at least 5");
  }
};

struct DroppedFeature {
  std::string feature;
  std::string reason;
  friend bool operator==(const DroppedFeature&, const DroppedFeature&) = default;
};

/// One country's design matrices. Rows of train/test are in input order.
struct PreparedCountry {
  std::string country;
  std::vector<std::string> selected_features;
  Matrix train_matrix;
  std::vector<double> train_targets;
  Matrix test_matrix;
  std::vector<double> test_targets;
  std::vector<double> medians;
  std::vector<DroppedFeature> dropped_features;
  // Dataset observation indices behind each matrix row.
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

struct Skip {
  std::string country;
  std::string reason;
};

using PrepareResult = std::variant<PreparedCountry, Skip>;

/// Keeps features whose availability is strictly above the threshold,
/// preserving input (catalog) order.
inline std::vector<std::string> select_features(std::span<const std::pair<std::string, double>> avail, double threshold) {
  std::vector<std::string> out;
  for (const auto& [name, fraction] : avail)
    if (fraction > threshold) out.push_back(name);
  return out;
}

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

inline std::size_t test_size(std::size_t n, double test_fraction) {
  return static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
}

/// Partitions positions [0, n) where n = dates.size(). Random mode shuffles
/// with the seeded stream and takes the last round(f*n) positions as test;
/// chronological mode takes the latest-dated rows, later input rows first
/// among equal dates. Both index lists come back sorted.
inline SplitIndices train_test_split(std::span<const Date> dates, double test_fraction, std::uint64_t seed,
                                     SplitMode mode) {
  const std::size_t n = dates.size();
  if (n < 2) throw DataError("train_test_split: need at least 2 rows, got " + std::to_string(n));
  const std::size_t k = test_size(n, test_fraction);
  if (k == 0 || k >= n)
    throw DataError("train_test_split: " + std::to_string(n) + " rows cannot give a nonempty train and test set at fraction " +
                    format_double(test_fraction));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (mode == SplitMode::Random) {
    RngStream rng(seed);
    rng.shuffle(order);
  } else {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dates[a] < dates[b]; });
  }

  SplitIndices split;
  split.train.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(k));
  split.test.assign(order.end() - static_cast<std::ptrdiff_t>(k), order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

struct ImputerFit {
  std::vector<double> medians;          // NaN where a column has no observed value
  std::vector<std::size_t> unobserved;  // columns flagged for removal
};

inline double median_of(std::vector<double> values) {
  if (values.empty()) return kMissing;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return lower + (upper - lower) / 2.0;
}

/// Per-column median of the observed (non-NaN) cells.
inline ImputerFit fit_imputer(const Matrix& m) {
  ImputerFit fit;
  fit.medians.resize(m.cols());
  std::vector<double> observed;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    observed.clear();
    for (std::size_t r = 0; r < m.rows(); ++r)
      if (!is_missing(m(r, c))) observed.push_back(m(r, c));
    fit.medians[c] = median_of(observed);
    if (observed.empty()) fit.unobserved.push_back(c);
  }
  return fit;
}

/// Replaces NaN cells by the column's median; observed cells are untouched.
inline Matrix impute(Matrix m, std::span<const double> medians) {
  if (medians.size() != m.cols())
    throw std::invalid_argument("impute: " + std::to_string(medians.size()) + " medians for " + std::to_string(m.cols()) +
                                " columns");
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (is_missing(m(r, c))) {
        if (is_missing(medians[c])) throw std::invalid_argument("impute: column " + std::to_string(c) + " has no median");
        m(r, c) = medians[c];
      }
  return m;
}

namespace detail {

inline Matrix gather(const PanelDataset& ds, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
  Matrix m(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& values = ds.observations()[rows[i]].values;
    for (std::size_t j = 0; j < cols.size(); ++j) m(i, j) = values[cols[j]];
  }
  return m;
}

}  // namespace detail

/// availability -> select_features -> split -> fit medians on train -> impute.
inline PrepareResult prepare_country(const PanelDataset& ds, const std::string& country, const PrepareConfig& config) {
  config.check();
  const auto& rows = ds.rows_of(country);
  if (rows.size() < config.min_rows)
    return Skip{country, "insufficient rows (" + std::to_string(rows.size()) + " < min_rows " +
                             std::to_string(config.min_rows) + ")"};

  const auto& catalog = ds.catalog();
  std::vector<bool> in_file(catalog.size(), false);
  for (std::size_t c : ds.columns()) in_file[c] = true;

  auto avail_all = availability(ds, country);
  std::vector<std::pair<std::string, double>> avail;
  for (std::size_t c = 0; c < catalog.size(); ++c)
    if (in_file[c]) avail.push_back(avail_all[c]);

  PreparedCountry out;
  out.country = country;
  auto selected = select_features(avail, config.availability_threshold);
  for (const auto& [name, fraction] : avail)
    if (std::find(selected.begin(), selected.end(), name) == selected.end())
      out.dropped_features.push_back(
          {name, "availability " + format_double(fraction) + " not above threshold " + format_double(config.availability_threshold)});
  if (selected.empty()) return Skip{country, "no feature survives selection"};

  std::vector<Date> dates;
  dates.reserve(rows.size());
  for (std::size_t r : rows) dates.push_back(ds.observations()[r].date);
  SplitIndices split;
  try {
    split = train_test_split(dates, config.test_fraction, derive_seed(config.seed, country), config.split_mode);
  } catch (const DataError& e) {
    return Skip{country, e.what()};
  }
  for (auto& i : split.train) i = rows[i];
  for (auto& i : split.test) i = rows[i];

  std::vector<std::size_t> cols;
  for (const auto& name : selected) cols.push_back(*catalog.index_of(name));

  auto fit = fit_imputer(detail::gather(ds, split.train, cols));
  if (!fit.unobserved.empty()) {
    std::vector<std::size_t> kept;
    std::vector<std::string> kept_names;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (std::find(fit.unobserved.begin(), fit.unobserved.end(), j) != fit.unobserved.end()) {
        out.dropped_features.push_back({selected[j], "no training observations"});
      } else {
        kept.push_back(cols[j]);
        kept_names.push_back(selected[j]);
      }
    }
    cols = std::move(kept);
    selected = std::move(kept_names);
    if (cols.empty()) return Skip{country, "no feature survives selection"};
    fit = fit_imputer(detail::gather(ds, split.train, cols));
  }

  // Dropped features in catalog order regardless of the stage that dropped them.
  std::stable_sort(out.dropped_features.begin(), out.dropped_features.end(),
                   [&](const DroppedFeature& a, const DroppedFeature& b) {
                     return *catalog.index_of(a.feature) < *catalog.index_of(b.feature);
                   });

  out.selected_features = std::move(selected);
  out.medians = fit.medians;
  out.train_matrix = impute(detail::gather(ds, split.train, cols), out.medians);
  out.test_matrix = impute(detail::gather(ds, split.test, cols), out.medians);
  for (std::size_t r : split.train) out.train_targets.push_back(ds.observations()[r].target);
  for (std::size_t r : split.test) out.test_targets.push_back(ds.observations()[r].target);
  out.train_rows = std::move(split.train);
  out.test_rows = std::move(split.test);
  return out;
}

}  // namespace famine
