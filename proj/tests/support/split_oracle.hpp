#pragma once

// Exhaustive split enumeration used as the reference for best_split.
// Integer data is scored with exact rationals; real data with long double
// two-pass variances.

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "famine/numeric.hpp"
#include "famine/rng.hpp"

namespace oracle {

struct Rational {
  __int128 num = 0;
  __int128 den = 1;  // > 0

  friend bool operator<(const Rational& a, const Rational& b) { return a.num * b.den < b.num * a.den; }
  friend bool operator==(const Rational& a, const Rational& b) { return a.num * b.den == b.num * a.den; }
  double value() const { return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den)); }
};

struct ExactSplit {
  std::size_t feature;
  double threshold;
  Rational gain;
};

// gain = S_L^2/n_L + S_R^2/n_R - S^2/n, the sum-of-squares form of
// n Var(P) - n_L Var(L) - n_R Var(R).
inline Rational rational_gain(std::int64_t sl, std::int64_t nl, std::int64_t sr, std::int64_t nr) {
  const __int128 s = sl + sr, n = nl + nr;
  Rational g;
  g.den = static_cast<__int128>(nl) * nr * n;
  g.num = static_cast<__int128>(sl) * sl * nr * n + static_cast<__int128>(sr) * sr * nl * n - s * s * nl * nr;
  return g;
}

/// Requires integer-valued x and y.
inline std::optional<ExactSplit> brute_force_exact(const famine::Matrix& x, std::span<const double> y,
                                                   std::span<const std::size_t> rows,
                                                   std::span<const std::size_t> candidates, std::size_t msl) {
  std::set<std::size_t> feats(candidates.begin(), candidates.end());
  std::optional<ExactSplit> best;
  for (std::size_t f : feats) {
    std::set<double> values;
    for (std::size_t r : rows) values.insert(x(r, f));
    std::vector<double> v(values.begin(), values.end());
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      const double thr = v[k] + (v[k + 1] - v[k]) / 2.0;
      std::int64_t sl = 0, sr = 0, nl = 0, nr = 0;
      for (std::size_t r : rows) {
        const auto yi = static_cast<std::int64_t>(y[r]);
        if (x(r, f) <= thr) sl += yi, ++nl;
        else sr += yi, ++nr;
      }
      if (nl < static_cast<std::int64_t>(msl) || nr < static_cast<std::int64_t>(msl)) continue;
      const Rational g = rational_gain(sl, nl, sr, nr);
      if (!(Rational{} < g)) continue;
      if (!best || best->gain < g) best = ExactSplit{f, thr, g};
    }
  }
  return best;
}

struct RealSplit {
  std::size_t feature;
  double threshold;
  long double gain;
};

inline long double sse(const std::vector<long double>& v) {
  if (v.empty()) return 0.0L;
  long double m = 0.0L;
  for (auto a : v) m += a;
  m /= static_cast<long double>(v.size());
  long double s = 0.0L;
  for (auto a : v) s += (a - m) * (a - m);
  return s;
}

inline std::optional<RealSplit> brute_force_real(const famine::Matrix& x, std::span<const double> y,
                                                 std::span<const std::size_t> candidates, std::size_t msl) {
  std::set<std::size_t> feats(candidates.begin(), candidates.end());
  std::vector<long double> all(y.begin(), y.end());
  const long double parent = sse(all);
  std::optional<RealSplit> best;
  for (std::size_t f : feats) {
    std::set<double> values;
    for (std::size_t r = 0; r < x.rows(); ++r) values.insert(x(r, f));
    std::vector<double> v(values.begin(), values.end());
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      const double thr = v[k] + (v[k + 1] - v[k]) / 2.0;
      std::vector<long double> l, r;
      for (std::size_t i = 0; i < x.rows(); ++i) (x(i, f) <= thr ? l : r).push_back(y[i]);
      if (l.size() < msl || r.size() < msl) continue;
      const long double g = parent - sse(l) - sse(r);
      if (!(g > 1e-12L * parent)) continue;
      // Gains this close are the same split up to rounding (e.g. two features
      // inducing one partition); the lower feature, then lower threshold, wins.
      if (!best || g > best->gain + 1e-12L * parent) best = RealSplit{f, thr, g};
    }
  }
  return best;
}

/// Random small instance: n in [2, 8], p in [1, 3]. Integer mode draws x
/// from {0..3} (forcing value ties) and y from {0..9}.
struct Instance {
  famine::Matrix x;
  std::vector<double> y;
  std::vector<std::size_t> candidates;
  std::size_t msl;
};

inline Instance random_instance(std::uint64_t seed, bool integer) {
  famine::RngStream rng(famine::derive_seed(0xC0FFEEULL, seed));
  const std::size_t n = 2 + rng.below(7);
  const std::size_t p = 1 + rng.below(3);
  Instance inst{famine::Matrix(n, p), std::vector<double>(n), {}, 1 + rng.below(3)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j)
      inst.x(i, j) = integer ? static_cast<double>(rng.below(4)) : rng.normal();
    inst.y[i] = integer ? static_cast<double>(rng.below(10)) : 10.0 * rng.normal();
  }
  const std::size_t k = 1 + rng.below(p);
  inst.candidates = rng.sample_without_replacement(p, k);
  // Hand the candidates over in a shuffled order; the result must not depend on it.
  rng.shuffle(inst.candidates);
  return inst;
}

}  // namespace oracle
