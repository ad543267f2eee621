#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "famine/models/model.hpp"

using famine::Matrix;

namespace {

struct Data {
  Matrix x;
  std::vector<double> y;
};

Data noisy_product(std::uint64_t seed, std::size_t n = 300, std::size_t p = 4) {
  famine::RngStream rng(seed);
  Data d{Matrix(n, p), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) d.x(i, j) = rng.uniform(-2.0, 2.0);
    d.y[i] = d.x(i, 0) * d.x(i, 1) + 0.5 * d.x(i, 2) + 0.3 * rng.normal();
  }
  return d;
}

famine::RandomForestParams small_forest(std::size_t trees = 40) {
  famine::RandomForestParams p;
  p.n_trees = trees;
  return p;
}

}  // namespace

// ---- random forest -------------------------------------------------------

TEST(RandomForest, ConstantTreesAverage) {
  std::vector<famine::RegressionTree> trees;
  for (double v : {1.0, 2.0, 3.0}) trees.push_back(famine::RegressionTree::constant(v, 1, 1));
  const famine::RandomForestModel forest(std::move(trees), famine::RandomForestParams{}, 0, 1);
  const double row[] = {0.0};
  EXPECT_EQ(forest.predict(row), 2.0);
  // No splits anywhere: importances are all zero.
  EXPECT_EQ(forest.importances(), std::vector<double>{0.0});
}

TEST(RandomForest, MeanLawIsExact) {
  const auto d = noisy_product(1);
  const auto forest = famine::fit_random_forest(d.x, d.y, small_forest(), 7);
  for (std::size_t i = 0; i < d.x.rows(); ++i) {
    double sum = 0.0;
    for (const auto& t : forest.trees()) sum += t.predict(d.x.row(i));
    EXPECT_EQ(forest.predict(d.x.row(i)), sum / static_cast<double>(forest.n_trees()));
  }
}

TEST(RandomForest, ThreadCountDoesNotChangeTheModel) {
  const auto d = noisy_product(2);
  const auto a = famine::fit_random_forest(d.x, d.y, small_forest(64), 11, 1);
  const auto b = famine::fit_random_forest(d.x, d.y, small_forest(64), 11, 8);
  EXPECT_TRUE(a == b);
  const auto c = famine::fit_random_forest(d.x, d.y, small_forest(64), 12, 1);
  EXPECT_FALSE(a == c);
}

TEST(RandomForest, DegenerateEnsembleEqualsSingleTree) {
  const auto d = noisy_product(3);
  auto params = small_forest(1);
  params.bootstrap = false;
  params.mtry = d.x.cols();
  const auto forest = famine::fit_random_forest(d.x, d.y, params, 5);
  famine::RngStream rng(123);
  famine::TreeParams tp;
  tp.min_samples_leaf = params.min_samples_leaf;
  const auto tree = famine::fit_tree(d.x, d.y, tp, rng);
  EXPECT_EQ(forest.trees().front(), tree);
  for (std::size_t i = 0; i < d.x.rows(); ++i) EXPECT_EQ(forest.predict(d.x.row(i)), tree.predict(d.x.row(i)));
}

TEST(RandomForest, DefaultMtry) {
  famine::RandomForestParams p;
  EXPECT_EQ(p.tree_params(31).mtry, 10u);
  EXPECT_EQ(p.tree_params(2).mtry, 1u);
  EXPECT_EQ(p.tree_params(1).mtry, 0u);  // one feature: every node sees it
  EXPECT_EQ(p.n_trees, 300u);
  EXPECT_EQ(p.min_samples_leaf, 2u);
  EXPECT_FALSE(p.max_depth);
}

TEST(RandomForest, RejectsZeroTrees) {
  const auto d = noisy_product(4, 20);
  EXPECT_THROW(famine::fit_random_forest(d.x, d.y, small_forest(0), 0), std::invalid_argument);
}

TEST(Mdi, SingleSplitIsOneHot) {
  std::vector<famine::TreeNode> nodes(3);
  nodes[0].leaf = false;
  nodes[0].feature = 2;
  nodes[0].gain = 5.0;
  nodes[0].left = 1;
  nodes[0].right = 2;
  std::vector<famine::RegressionTree> trees{famine::RegressionTree(nodes, 4)};
  EXPECT_EQ(famine::mdi_importance(trees, 4), (std::vector<double>{0, 0, 1, 0}));
}

TEST(Mdi, NormalizedAndNonnegative) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = noisy_product(seed, 150, 5);
    const auto forest = famine::fit_random_forest(d.x, d.y, small_forest(30), seed);
    double s = 0.0;
    for (double v : forest.importances()) {
      EXPECT_GE(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(Mdi, PlantedSignalDominates) {
  famine::RngStream rng(77);
  const std::size_t n = 400, p = 5;
  Matrix x(n, p);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
    y[i] = 10.0 * x(i, 0) + 0.5 * rng.normal();
  }
  // With every feature a candidate at each node the signal takes nearly all the impurity decrease.
  famine::RandomForestParams all;
  all.mtry = p;
  const auto forest = famine::fit_random_forest(x, y, all, 3);
  EXPECT_GT(forest.importances()[0], 0.8);
  // Under the default mtry noise columns get forced splits, but the signal still ranks first.
  const auto imp = famine::fit_random_forest(x, y, famine::RandomForestParams{}, 3).importances();
  EXPECT_EQ(std::max_element(imp.begin(), imp.end()) - imp.begin(), 0);
  EXPECT_GT(imp[0], 0.5);
}

// ---- gradient boosting ---------------------------------------------------

TEST(Boosting, ZeroRoundsPredictsMean) {
  const auto d = noisy_product(5, 50);
  famine::GradientBoostedParams p;
  p.rounds = 0;
  const auto m = famine::fit_gbt(d.x, d.y, p, 0);
  const double mean = famine::mean_of(d.y);
  EXPECT_EQ(m.base_score(), mean);
  for (std::size_t i = 0; i < d.x.rows(); ++i) EXPECT_EQ(m.predict(d.x.row(i)), mean);
}

TEST(Boosting, OneFullRoundInterpolates) {
  const auto d = noisy_product(6, 80);
  famine::GradientBoostedParams p;
  p.rounds = 1;
  p.learning_rate = 1.0;
  p.tree = famine::TreeParams{std::nullopt, 1, 0};
  const auto m = famine::fit_gbt(d.x, d.y, p, 0);
  for (std::size_t i = 0; i < d.x.rows(); ++i) EXPECT_NEAR(m.predict(d.x.row(i)), d.y[i], 1e-9);
}

TEST(Boosting, TrainingMseNeverIncreases) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto d = noisy_product(seed, 200);
    const auto m = famine::fit_gbt(d.x, d.y, famine::GradientBoostedParams{}, seed);
    const auto& h = m.training_mse();
    ASSERT_EQ(h.size(), 301u);
    for (std::size_t k = 1; k < h.size(); ++k) EXPECT_LE(h[k], h[k - 1]) << "round " << k;
    EXPECT_LT(h.back(), 0.5 * h.front());
  }
}

TEST(Boosting, PredictionIsBasePlusScaledSum) {
  const auto d = noisy_product(8, 100);
  famine::GradientBoostedParams p;
  p.rounds = 25;
  p.learning_rate = 0.3;
  const auto m = famine::fit_gbt(d.x, d.y, p, 1);
  for (std::size_t i = 0; i < d.x.rows(); ++i) {
    double s = 0.0;
    for (const auto& t : m.trees()) s += t.predict(d.x.row(i));
    EXPECT_EQ(m.predict(d.x.row(i)), m.base_score() + 0.3 * s);
  }
}

TEST(Boosting, RejectsBadLearningRate) {
  const auto d = noisy_product(9, 20);
  famine::GradientBoostedParams p;
  for (double lr : {0.0, -0.1, 1.5}) {
    p.learning_rate = lr;
    EXPECT_THROW(famine::fit_gbt(d.x, d.y, p, 0), std::invalid_argument);
  }
}

// ---- linear --------------------------------------------------------------

TEST(Linear, AffinePrediction) {
  const famine::LinearModel m(5.0, {3.0});
  const double row[] = {2.0};
  EXPECT_EQ(m.predict(row), 11.0);
  const double bad[] = {1.0, 2.0};
  EXPECT_THROW(m.predict(bad), std::invalid_argument);
}

TEST(Linear, RecoversSlopeThreeInterceptFive) {
  Matrix x(20, 1);
  std::vector<double> y(20);
  for (std::size_t i = 0; i < 20; ++i) {
    x(i, 0) = static_cast<double>(i) * 0.7 - 3.0;
    y[i] = 3.0 * x(i, 0) + 5.0;
  }
  const auto m = famine::fit_linear(x, y);
  EXPECT_NEAR(m.coefficients()[0], 3.0, 1e-8);
  EXPECT_NEAR(m.intercept(), 5.0, 1e-8);
  EXPECT_FALSE(m.conditioning_warning());
}

TEST(Linear, RecoversPlantedCoefficientPair) {
  famine::RngStream rng(4);
  Matrix x(100, 2);
  std::vector<double> y(100);
  for (std::size_t i = 0; i < 100; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.uniform(0.0, 50.0);
    y[i] = 3.0 * x(i, 0) + 5.0 * x(i, 1) - 2.0;
  }
  const auto m = famine::fit_linear(x, y);
  EXPECT_NEAR(m.coefficients()[0], 3.0, 1e-8);
  EXPECT_NEAR(m.coefficients()[1], 5.0, 1e-8);
  EXPECT_NEAR(m.intercept(), -2.0, 1e-8);
}

TEST(Linear, ConstantTarget) {
  const auto d = noisy_product(10, 40);
  const std::vector<double> y(40, 4.25);
  const auto m = famine::fit_linear(d.x, y);
  for (double c : m.coefficients()) EXPECT_EQ(c, 0.0);
  EXPECT_EQ(m.intercept(), 4.25);
}

TEST(Linear, ResidualsOrthogonalToDesign) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = noisy_product(seed, 150, 5);
    const auto m = famine::fit_linear(d.x, d.y);
    std::vector<double> resid(d.y.size());
    for (std::size_t i = 0; i < d.y.size(); ++i) resid[i] = d.y[i] - m.predict(d.x.row(i));
    double scale = 0.0, ynorm = 0.0, worst = std::abs(std::accumulate(resid.begin(), resid.end(), 0.0));
    for (double v : d.y) ynorm += v * v;
    for (std::size_t j = 0; j < d.x.cols(); ++j) {
      double dot = 0.0, xn = 0.0;
      for (std::size_t i = 0; i < d.y.size(); ++i) dot += d.x(i, j) * resid[i], xn += d.x(i, j) * d.x(i, j);
      worst = std::max(worst, std::abs(dot));
      scale = std::max(scale, std::sqrt(xn * ynorm));
    }
    EXPECT_LE(worst, 1e-6 * std::max(1.0, scale)) << "seed " << seed;
  }
}

TEST(Linear, CollinearColumnMatchesPseudoinverse) {
  famine::RngStream rng(21);
  const std::size_t n = 60;
  Matrix x(n, 3);
  std::vector<double> y(n);
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.uniform(-3.0, 3.0);
    x(i, 2) = x(i, 0);  // exact duplicate
    y[i] = 2.0 * x(i, 0) - x(i, 1) + 1.0 + 0.2 * rng.normal();
    a(i, 0) = 1.0;
    for (int j = 0; j < 3; ++j) a(i, j + 1) = x(i, j);
    b(i) = y[i];
  }
  const auto m = famine::fit_linear(x, y);
  EXPECT_TRUE(m.conditioning_warning());
  const Eigen::VectorXd beta = a.completeOrthogonalDecomposition().solve(b);
  for (std::size_t i = 0; i < n; ++i) {
    const double want = (a.row(i) * beta)(0);
    const double got = m.predict(x.row(i));
    ASSERT_TRUE(std::isfinite(got));
    EXPECT_NEAR(got, want, 1e-6);
  }
  // Minimum-norm split of the duplicated weight.
  EXPECT_NEAR(m.coefficients()[0], m.coefficients()[2], 1e-6);
}

TEST(Linear, AllConstantColumns) {
  Matrix x(10, 2, 3.0);
  std::vector<double> y{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto m = famine::fit_linear(x, y);
  EXPECT_TRUE(m.conditioning_warning());
  EXPECT_EQ(m.coefficients(), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(m.intercept(), 5.5);
}

// ---- model variant and dump ----------------------------------------------

TEST(ModelDump, RoundTripsNumbersExactly) {
  const auto d = noisy_product(12, 80);
  famine::GradientBoostedParams gp;
  gp.rounds = 5;
  const std::vector<famine::Model> models{famine::fit_linear(d.x, d.y),
                                          famine::fit_random_forest(d.x, d.y, small_forest(3), 1),
                                          famine::fit_gbt(d.x, d.y, gp, 2)};
  const std::vector<std::string> names{"a", "b", "c", "d"};
  for (const auto& m : models) {
    const auto j = famine::model_to_json(m, names);
    EXPECT_EQ(j["format"], "famine-model/1");
    EXPECT_EQ(j["kind"], std::string(famine::to_string(famine::kind_of(m))));
    EXPECT_EQ(j["features"].size(), 4u);
    EXPECT_EQ(j.dump(), famine::model_to_json(m, names).dump());
  }
  const auto& lin = std::get<famine::LinearModel>(models[0]);
  const auto j = famine::model_to_json(models[0]);
  EXPECT_EQ(std::stod(j["intercept"].get<std::string>()), lin.intercept());

  const auto& gbt = std::get<famine::GradientBoostedModel>(models[2]);
  const auto jg = famine::model_to_json(models[2]);
  ASSERT_EQ(jg["trees"].size(), 5u);
  const auto& root = jg["trees"][0][0];
  const auto& node = gbt.trees()[0].nodes()[0];
  EXPECT_EQ(root["feature"], node.feature);
  EXPECT_EQ(std::stod(root["threshold"].get<std::string>()), node.threshold);
}

TEST(ModelKinds, NamesRoundTrip) {
  for (auto k : {famine::ModelKind::Linear, famine::ModelKind::RandomForest, famine::ModelKind::GradientBoosted})
    EXPECT_EQ(famine::parse_model_kind(famine::to_string(k)), k);
  EXPECT_FALSE(famine::parse_model_kind("xgboost"));
}
