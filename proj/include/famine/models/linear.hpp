#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "famine/numeric.hpp"

namespace famine {

class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(double intercept, std::vector<double> coefficients, std::optional<std::string> warning = std::nullopt)
      : intercept_(intercept), coefficients_(std::move(coefficients)), warning_(std::move(warning)) {}

  double predict(std::span<const double> row) const {
    if (row.size() != coefficients_.size())
      throw std::invalid_argument("LinearModel::predict: row has " + std::to_string(row.size()) + " values, expected " +
                                  std::to_string(coefficients_.size()));
    double s = intercept_;
    for (std::size_t j = 0; j < row.size(); ++j) s += coefficients_[j] * row[j];
    return s;
  }

  double intercept() const noexcept { return intercept_; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  std::size_t n_features() const noexcept { return coefficients_.size(); }
  /// Set when the normal equations were singular or ill-conditioned and a
  /// ridge term was added.
  const std::optional<std::string>& conditioning_warning() const noexcept { return warning_; }

  friend bool operator==(const LinearModel&, const LinearModel&) = default;

 private:
  double intercept_ = 0.0;
  std::vector<double> coefficients_;
  std::optional<std::string> warning_;
};

namespace detail {

// Smallest admissible Cholesky pivot of the unit-diagonal (correlation
// scaled) normal matrix; below it the system is treated as ill-conditioned.
inline constexpr double kMinScaledPivot = 1e-10;

/// In-place lower Cholesky factor of a symmetric p x p matrix. Returns the
/// smallest pivot seen, or a nonpositive value if factorization broke down.
inline double cholesky(std::vector<double>& a, std::size_t p) {
  double min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < p; ++j) {
    double d = a[j * p + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * p + k] * a[j * p + k];
    min_pivot = std::min(min_pivot, d);
    if (!(d > 0.0)) return d;
    const double l = std::sqrt(d);
    a[j * p + j] = l;
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = a[i * p + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * p + k] * a[j * p + k];
      a[i * p + j] = s / l;
    }
  }
  return min_pivot;
}

inline std::vector<double> cholesky_solve(const std::vector<double>& l, std::size_t p, std::vector<double> b) {
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l[i * p + k] * b[k];
    b[i] /= l[i * p + i];
  }
  for (std::size_t i = p; i-- > 0;) {
    for (std::size_t k = i + 1; k < p; ++k) b[i] -= l[k * p + i] * b[k];
    b[i] /= l[i * p + i];
  }
  return b;
}

}  // namespace detail

/// Ordinary least squares with intercept, solved on centered data through the
/// normal equations. A singular or ill-conditioned system is refit with a
/// ridge term of 1e-8 times the mean diagonal magnitude.
inline LinearModel fit_linear(const Matrix& x, std::span<const double> y) {
  if (x.rows() == 0) throw std::invalid_argument("fit_linear: empty feature matrix");
  if (x.rows() != y.size()) throw std::invalid_argument("fit_linear: row count mismatch");
  const std::size_t n = x.rows(), p = x.cols();

  std::vector<double> x_mean(p, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < p; ++j) x_mean[j] += x(r, j);
  for (auto& m : x_mean) m /= static_cast<double>(n);
  // Constant columns center to exact zeros so they land on the ridge path with a zero coefficient.
  for (std::size_t j = 0; j < p; ++j) {
    bool constant = true;
    for (std::size_t r = 1; r < n && constant; ++r) constant = x(r, j) == x(0, j);
    if (constant) x_mean[j] = x(0, j);
  }
  const double y_mean = mean_of(y);
  if (p == 0) return LinearModel(y_mean, {});

  std::vector<double> gram(p * p, 0.0), rhs(p, 0.0), centered(p);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < p; ++j) centered[j] = x(r, j) - x_mean[j];
    const double yc = y[r] - y_mean;
    for (std::size_t i = 0; i < p; ++i) {
      rhs[i] += centered[i] * yc;
      for (std::size_t j = 0; j <= i; ++j) gram[i * p + j] += centered[i] * centered[j];
    }
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) gram[j * p + i] = gram[i * p + j];

  // Conditioning probe on the correlation-scaled matrix.
  bool well_conditioned = true;
  {
    std::vector<double> scaled(p * p);
    for (std::size_t i = 0; i < p; ++i) {
      if (!(gram[i * p + i] > 0.0)) well_conditioned = false;
    }
    if (well_conditioned) {
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
          scaled[i * p + j] = gram[i * p + j] / std::sqrt(gram[i * p + i] * gram[j * p + j]);
      well_conditioned = detail::cholesky(scaled, p) > detail::kMinScaledPivot;
    }
  }

  std::optional<std::string> warning;
  std::vector<double> factor = gram;
  if (well_conditioned) {
    detail::cholesky(factor, p);
  } else {
    double diag = 0.0;
    for (std::size_t i = 0; i < p; ++i) diag += std::abs(gram[i * p + i]);
    diag /= static_cast<double>(p);
    // All-constant columns: any positive ridge yields zero coefficients.
    const double lambda = diag > 0.0 ? 1e-8 * diag : 1.0;
    for (std::size_t i = 0; i < p; ++i) factor[i * p + i] += lambda;
    if (!(detail::cholesky(factor, p) > 0.0)) throw std::runtime_error("fit_linear: ridge system is not positive definite");
    warning = "normal equations singular or ill-conditioned; ridge lambda=" + format_double(lambda) + " applied";
  }

  auto beta = detail::cholesky_solve(factor, p, rhs);
  double intercept = y_mean;
  for (std::size_t j = 0; j < p; ++j) intercept -= beta[j] * x_mean[j];
  return LinearModel(intercept, std::move(beta), std::move(warning));
}

}  // namespace famine
