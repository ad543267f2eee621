#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "famine/evaluate.hpp"
#include "famine/synthetic.hpp"

using famine::CountryEvaluation;
using famine::ModelKind;
using famine::slot;

namespace {

// Train/test split of a generated design; f gives the target for a row of features.
famine::PreparedCountry make_prepared(std::size_t n_train, std::size_t n_test, std::size_t p, std::uint64_t seed,
                                      auto f, double noise = 0.0) {
  famine::RngStream rng(seed);
  famine::PreparedCountry pc;
  pc.country = "TST";
  for (std::size_t j = 0; j < p; ++j) pc.selected_features.push_back("f" + std::to_string(j));
  auto fill = [&](famine::Matrix& m, std::vector<double>& y, std::size_t n) {
    m = famine::Matrix(n, p);
    y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row(p);
      for (std::size_t j = 0; j < p; ++j) row[j] = m(i, j) = rng.uniform(-2.0, 2.0);
      y[i] = f(row) + noise * rng.normal();
    }
  };
  fill(pc.train_matrix, pc.train_targets, n_train);
  fill(pc.test_matrix, pc.test_targets, n_test);
  pc.medians.assign(p, 0.0);
  return pc;
}

famine::ModelConfig small_models() {
  famine::ModelConfig mc;
  mc.forest.n_trees = 60;
  mc.boosting.rounds = 60;
  return mc;
}

CountryEvaluation fake(std::string code, double lin, double rf, double gbt) {
  CountryEvaluation ev;
  ev.country = std::move(code);
  ev.mae = {lin, rf, gbt};
  return ev;
}

}  // namespace

TEST(Mae, Examples) {
  const std::vector<double> a{1, 2}, b{1, 4}, d{2, 4};
  EXPECT_EQ(famine::mae(a, a), 0.0);
  EXPECT_EQ(famine::mae(a, b), 1.0);
  EXPECT_EQ(famine::mae(a, d), 1.5);
  const std::vector<double> c{1, 2, 3};
  EXPECT_THROW(famine::mae(a, c), std::invalid_argument);
  EXPECT_THROW(famine::mae(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}

TEST(Mae, PermutationAndTranslation) {
  famine::RngStream rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(30);
    std::vector<double> p(n), a(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = rng.normal() * 10, a[i] = rng.normal() * 10;
    const double base = famine::mae(p, a);
    EXPECT_GE(base, 0.0);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<double> pp(n), ap(n), ps(n), as(n);
    const double c = rng.uniform(-50, 50);
    for (std::size_t i = 0; i < n; ++i) pp[i] = p[perm[i]], ap[i] = a[perm[i]], ps[i] = p[i] + c, as[i] = a[i] + c;
    EXPECT_NEAR(famine::mae(pp, ap), base, 1e-12 * std::max(1.0, base));
    EXPECT_NEAR(famine::mae(ps, as), base, 1e-12 * (std::abs(c) + base + 1.0));
  }
}

TEST(EvaluateCountry, NoiselessLinearTargetPicksLinear) {
  const auto pc = make_prepared(200, 50, 3, 1, [](const auto& r) { return 5.0 + 3.0 * r[0] - 2.0 * r[1] + 0.5 * r[2]; });
  const auto ev = famine::evaluate_country(pc, small_models(), 7);
  EXPECT_LE(ev.mae_of(ModelKind::Linear), 1e-6);
  EXPECT_EQ(ev.best_model, ModelKind::Linear);
}

TEST(EvaluateCountry, InteractionTargetFavoursForest) {
  const auto pc = make_prepared(400, 100, 3, 2, [](const auto& r) { return 10.0 * r[0] * r[1]; }, 0.5);
  const auto ev = famine::evaluate_country(pc, small_models(), 3);
  EXPECT_LT(ev.mae_of(ModelKind::RandomForest), ev.mae_of(ModelKind::Linear));
}

TEST(EvaluateCountry, RecordShape) {
  const auto pc = make_prepared(120, 30, 4, 3, [](const auto& r) { return r[0] > 0 ? 40.0 : 20.0 + r[2]; }, 1.0);
  const auto ev = famine::evaluate_country(pc, small_models(), 11, true);
  EXPECT_EQ(ev.country, "TST");
  EXPECT_EQ(ev.n_train, 120u);
  EXPECT_EQ(ev.n_test, 30u);
  EXPECT_EQ(ev.test_actual.size(), ev.n_test);
  EXPECT_EQ(ev.best_predictions.size(), ev.n_test);
  EXPECT_EQ(ev.rf_predictions.size(), ev.n_test);
  EXPECT_EQ(famine::mae(ev.rf_predictions, ev.test_actual), ev.mae_of(ModelKind::RandomForest));
  EXPECT_EQ(famine::mae(ev.best_predictions, ev.test_actual), ev.mae_of(ev.best_model));
  for (double m : ev.mae) EXPECT_LE(ev.mae_of(ev.best_model), m);
  ASSERT_EQ(ev.importances.size(), 4u);
  double total = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_EQ(ev.importances[j].first, pc.selected_features[j]);
    EXPECT_GE(ev.importances[j].second, 0.0);
    total += ev.importances[j].second;
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_EQ(ev.ranked_importances().front().first, "f0");
  ASSERT_EQ(ev.models.size(), 3u);
  EXPECT_EQ(famine::kind_of(ev.models[0]), ModelKind::Linear);
  EXPECT_EQ(famine::kind_of(ev.models[1]), ModelKind::RandomForest);
  EXPECT_EQ(famine::kind_of(ev.models[2]), ModelKind::GradientBoosted);
  EXPECT_TRUE(famine::evaluate_country(pc, small_models(), 11).models.empty());
}

TEST(EvaluateCountry, TiesPreferForest) {
  // Constant targets: every model predicts the constant exactly, so all MAEs are 0.
  const auto pc = make_prepared(50, 10, 2, 4, [](const auto&) { return 42.0; });
  const auto ev = famine::evaluate_country(pc, small_models(), 1);
  EXPECT_EQ(ev.mae, (famine::PerModel<double>{0.0, 0.0, 0.0}));
  EXPECT_EQ(ev.best_model, ModelKind::RandomForest);
}

TEST(EvaluateCountry, DeterministicAcrossThreads) {
  const auto pc = make_prepared(150, 40, 3, 5, [](const auto& r) { return std::sin(3 * r[0]) * 10 + r[1]; }, 1.0);
  const auto a = famine::evaluate_country(pc, small_models(), 21, false, 1);
  const auto b = famine::evaluate_country(pc, small_models(), 21, false, 4);
  EXPECT_EQ(a.mae, b.mae);
  EXPECT_EQ(a.rf_predictions, b.rf_predictions);
  EXPECT_EQ(a.importances, b.importances);
  const auto c = famine::evaluate_country(pc, small_models(), 22, false, 1);
  EXPECT_NE(a.rf_predictions, c.rf_predictions);
}

TEST(EvaluateCountry, ErrorsCarryCountry) {
  auto pc = make_prepared(30, 5, 2, 6, [](const auto& r) { return r[0]; });
  auto mc = small_models();
  mc.boosting.learning_rate = 0.0;
  try {
    famine::evaluate_country(pc, mc, 1);
    FAIL() << "expected DataError";
  } catch (const famine::DataError& e) {
    EXPECT_NE(std::string(e.what()).find("TST"), std::string::npos);
  }
  pc.test_matrix = famine::Matrix(0, 2);
  pc.test_targets.clear();
  EXPECT_THROW(famine::evaluate_country(pc, small_models(), 1), famine::DataError);
}

TEST(Aggregate, AveragesAndOrder) {
  auto r = famine::aggregate({fake("ZWE", 1, 30, 4), fake("AFG", 3, 2, 8)}, {{"MLI", "x"}, {"BFA", "y"}});
  ASSERT_EQ(r.evaluations.size(), 2u);
  EXPECT_EQ(r.evaluations[0].country, "AFG");
  EXPECT_EQ(r.skipped[0].country, "BFA");
  EXPECT_EQ(r.average_rf_mae, 16.0);
  EXPECT_EQ(r.average_mae_per_model, (famine::PerModel<double>{2.0, 16.0, 6.0}));
  ASSERT_EQ(r.comparison_points.size(), 2u);
  EXPECT_EQ(r.comparison_points[1].country, "ZWE");
  EXPECT_EQ(r.comparison_points[1].rf_mae, 30.0);
  EXPECT_EQ(r.comparison_points[1].gbt_mae, 4.0);

  const auto one = famine::aggregate({fake("NPL", 1, 3.44, 5)}, {});
  EXPECT_EQ(one.average_rf_mae, 3.44);
}

TEST(Aggregate, PermutationInvariantBitForBit) {
  famine::RngStream rng(8);
  std::vector<CountryEvaluation> evs;
  for (const auto& code : famine::detail::country_codes(25))
    evs.push_back(fake(code, rng.uniform(0, 30), rng.uniform(0, 30), rng.uniform(0, 30)));
  const auto base = famine::aggregate(evs, {});
  for (int trial = 0; trial < 20; ++trial) {
    rng.shuffle(evs);
    const auto r = famine::aggregate(evs, {});
    EXPECT_EQ(r.average_mae_per_model, base.average_mae_per_model);
  }
}

TEST(Aggregate, NoEvaluableCountries) {
  try {
    famine::aggregate({}, {{"ETH", "insufficient rows (3 < min_rows 40)"}});
    FAIL() << "expected DataError";
  } catch (const famine::DataError& e) {
    EXPECT_STREQ(e.what(), "no evaluable countries");
  }
}
