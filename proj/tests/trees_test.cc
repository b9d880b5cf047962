/*
 * Copyright 2026 The HybridML Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "hybridml/trees.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "hybridml/random.hpp"
#include "oracles.hpp"

namespace hybridml::trees {
namespace {

const Dataset kStump({"x"}, {{0, 1, 2, 3}}, Target{"y", {0, 0, 1, 1}});

Dataset random_regression(Rng& rng, std::size_t n, std::size_t p) {
  std::vector<std::vector<double>> cols(p, std::vector<double>(n));
  std::vector<double> y(n);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) names.push_back("f" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& c : cols) c[i] = std::round(rng.uniform(0, 20)) / 4.0;  // ties on purpose
    y[i] = std::sin(cols[0][i]) + (p > 1 ? cols[1][i] * 0.3 : 0.0) + rng.normal(0, 0.3);
  }
  return Dataset(names, cols, Target{"y", y});
}

Dataset random_binary(Rng& rng, std::size_t n, std::size_t p) {
  auto d = random_regression(rng, n, p);
  std::vector<double> y(d.y().begin(), d.y().end());
  for (double& v : y) v = v > 0.8 ? 1.0 : 0.0;
  y[0] = 0;
  y[1] = 1;
  return d.with_target(Target{"y", y});
}

TEST(BestSplit, HandExample) {
  const std::vector<std::uint32_t> order{0, 1, 2, 3};
  const std::vector<double> x{0, 1, 2, 3}, g{0.5, 0.5, -0.5, -0.5}, h{1, 1, 1, 1};
  const auto s = best_split(order, x, g, h, 0.0, 1);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->threshold, 1.5);
  // GL = 1, GR = -1, HL = HR = 2: half of (1/2 + 1/2 - 0).
  EXPECT_DOUBLE_EQ(s->gain, 0.5);
  EXPECT_EQ(s->n_left, 2u);
}

TEST(BestSplit, DegenerateInputs) {
  const std::vector<std::uint32_t> order{0, 1, 2, 3};
  const std::vector<double> constant{2, 2, 2, 2}, x{0, 1, 2, 3}, g{0.5, 0.5, -0.5, -0.5}, zero{0, 0, 0, 0},
      h{1, 1, 1, 1};
  EXPECT_FALSE(best_split(order, constant, g, h, 0.0, 1));
  EXPECT_FALSE(best_split(order, x, zero, h, 0.0, 1));
  EXPECT_FALSE(best_split(order, x, g, h, 0.0, 3));
}

TEST(BestSplit, MatchesExhaustiveSearch) {
  Rng rng(6);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 5 + rng.index(60);
    std::vector<std::vector<double>> cols(3, std::vector<double>(n));
    std::vector<double> g(n), h(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& c : cols) c[i] = static_cast<double>(rng.index(8));
      g[i] = rng.normal();
    }
    double best = 0.0;
    for (const auto& col : cols) {
      std::vector<std::uint32_t> order(n);
      std::iota(order.begin(), order.end(), 0u);
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return col[a] < col[b]; });
      if (auto s = best_split(order, col, g, h, 0.0, 1)) best = std::max(best, s->gain);
    }
    EXPECT_NEAR(best, oracle::brute_best_gain(cols, g), 1e-10);
  }
}

TEST(Gbdt, StumpExampleIsExact) {
  GbtConfig c;
  c.n_trees = 1;
  c.max_depth = 1;
  c.learning_rate = 1.0;
  const auto m = fit_gbdt(kStump, c);
  EXPECT_EQ(m.base_score, 0.5);
  EXPECT_EQ(m.predict(kStump), (std::vector<double>{0, 0, 1, 1}));
  EXPECT_EQ(m.trees[0].nodes[0].threshold, 1.5);
}

TEST(Gbdt, ConstantTargetAndZeroLearningRate) {
  const Dataset d({"x"}, {{0, 1, 2, 3, 4}}, Target{"y", {2.5, 2.5, 2.5, 2.5, 2.5}});
  for (auto growth : {Growth::kDepthWise, Growth::kLeafWise, Growth::kSymmetric}) {
    GbtConfig c;
    c.growth = growth;
    c.n_trees = 20;
    for (double v : fit_gbdt(d, c).predict(d)) EXPECT_NEAR(v, 2.5, 1e-12);
  }
  Rng rng(2);
  const auto r = random_regression(rng, 50, 3);
  GbtConfig c;
  c.learning_rate = 0.0;
  const auto m = fit_gbdt(r, c);
  for (double v : m.predict(r)) EXPECT_EQ(v, m.base_score);
  c.learning_rate = 0.1;
  c.n_trees = 0;
  for (double v : fit_gbdt(r, c).predict(r)) EXPECT_EQ(v, m.base_score);
}

TEST(Gbdt, LogisticDegenerateAndHalfProbability) {
  const Dataset d({"x"}, {{0, 1, 2}}, Target{"y", {1, 1, 1}});
  GbtConfig c;
  c.loss = Loss::kLogistic;
  const auto m = fit_gbdt(d, c);
  EXPECT_TRUE(m.degenerate);
  EXPECT_TRUE(m.trees.empty());
  const Dataset balanced({"x"}, {{0, 1, 2, 3}}, Target{"y", {0, 1, 0, 1}});
  c.learning_rate = 0.0;
  for (double p : fit_gbdt(balanced, c).predict(balanced)) EXPECT_EQ(p, 0.5);
}

TEST(Gbdt, LossNonIncreasing) {
  Rng rng(10);
  for (int rep = 0; rep < 20; ++rep) {
    const bool logistic = rep % 2 == 1;
    const auto d = logistic ? random_binary(rng, 60 + rng.index(100), 1 + rng.index(5))
                            : random_regression(rng, 60 + rng.index(100), 1 + rng.index(5));
    GbtConfig c;
    c.loss = logistic ? Loss::kLogistic : Loss::kSquared;
    c.growth = static_cast<Growth>(rep % 3);
    c.n_trees = 25;
    c.max_depth = 1 + rng.index(5);
    c.learning_rate = rng.uniform(0.05, 1.0);
    c.l2_leaf_reg = rng.uniform(0.0, 3.0);
    c.first_order = rep % 4 == 3;
    std::vector<double> trace;
    fit_gbdt(d, c, &trace);
    ASSERT_EQ(trace.size(), 26u);
    for (std::size_t t = 1; t < trace.size(); ++t) EXPECT_LE(trace[t], trace[t - 1] * (1 + 1e-12)) << rep;
  }
}

TEST(Gbdt, LeafWeightIsMeanResidual) {
  Rng rng(3);
  const auto d = random_regression(rng, 80, 2);
  GbtConfig c;
  c.n_trees = 1;
  c.max_depth = 3;
  c.learning_rate = 1.0;
  const auto m = fit_gbdt(d, c);
  const auto cols = columns_by_name(d, m.feature_names);
  std::map<const Node*, std::pair<double, double>> acc;
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    auto& [sum, count] = acc[&m.trees[0].leaf_for(cols, i)];
    sum += d.y()[i] - m.base_score;
    count += 1;
  }
  for (const auto& [leaf, sc] : acc) EXPECT_NEAR(leaf->value, sc.first / sc.second, 1e-10);
}

TEST(Gbdt, ThresholdsLieBetweenObservedValues) {
  Rng rng(4);
  const auto d = random_regression(rng, 90, 3);
  GbtConfig c;
  c.n_trees = 5;
  const auto m = fit_gbdt(d, c);
  for (const auto& t : m.trees) {
    for (const auto& n : t.nodes) {
      if (n.is_leaf()) continue;
      const auto col = d.column(static_cast<std::size_t>(n.feature));
      bool below = false, above = false;
      for (double v : col) {
        below |= v < n.threshold;
        above |= v > n.threshold;
      }
      EXPECT_TRUE(below && above);
    }
  }
}

TEST(Gbdt, MonotoneTransformLeavesPredictionsBitIdentical) {
  Rng rng(15);
  for (auto growth : {Growth::kDepthWise, Growth::kLeafWise, Growth::kSymmetric}) {
    const auto d = random_binary(rng, 150, 3);
    std::vector<double> warped(d.column(0).begin(), d.column(0).end());
    for (double& v : warped) v = std::exp(v) * 3.0 - 7.0;
    const auto e = d.with_column("f0", warped);
    GbtConfig c;
    c.loss = Loss::kLogistic;
    c.growth = growth;
    c.n_trees = 30;
    c.max_depth = 4;
    EXPECT_EQ(fit_gbdt(d, c).predict(d), fit_gbdt(e, c).predict(e));
  }
}

TEST(Gbdt, GrowthLimits) {
  Rng rng(21);
  const auto d = random_regression(rng, 300, 4);
  GbtConfig c;
  c.n_trees = 5;
  c.max_depth = 3;
  for (const auto& t : fit_gbdt(d, c).trees) EXPECT_LE(t.depth(), 3u);
  c.growth = Growth::kSymmetric;
  for (const auto& t : fit_gbdt(d, c).trees) EXPECT_LE(t.depth(), 3u);
  c.growth = Growth::kLeafWise;
  c.max_depth = 0;
  c.num_leaves = 7;
  for (const auto& t : fit_gbdt(d, c).trees) {
    EXPECT_LE(t.n_leaves(), 7u);
    EXPECT_GE(t.n_leaves(), 2u);
  }
}

TEST(Gbdt, SymmetricLevelsShareTheSplit) {
  Rng rng(22);
  const auto d = random_regression(rng, 200, 3);
  GbtConfig c;
  c.growth = Growth::kSymmetric;
  c.n_trees = 3;
  c.max_depth = 4;
  for (const auto& t : fit_gbdt(d, c).trees) {
    std::map<std::size_t, std::set<std::pair<int, double>>> per_level;
    std::vector<std::size_t> depth(t.nodes.size(), 0);
    for (std::size_t k = 0; k < t.nodes.size(); ++k) {
      const auto& n = t.nodes[k];
      if (n.is_leaf()) continue;
      per_level[depth[k]].insert({n.feature, n.threshold});
      depth[static_cast<std::size_t>(n.left)] = depth[static_cast<std::size_t>(n.right)] = depth[k] + 1;
    }
    for (const auto& [level, splits] : per_level) EXPECT_EQ(splits.size(), 1u);
  }
}

TEST(Gbdt, ConfigValidation) {
  GbtConfig c;
  c.learning_rate = 1.5;
  EXPECT_THROW(fit_gbdt(kStump, c), ConfigError);
  c = {};
  c.max_depth = 0;
  EXPECT_THROW(fit_gbdt(kStump, c), ConfigError);
  c = {};
  c.growth = Growth::kLeafWise;
  c.num_leaves = 1;
  EXPECT_THROW(fit_gbdt(kStump, c), ConfigError);
  c = {};
  c.loss = Loss::kLogistic;
  EXPECT_THROW(fit_gbdt(Dataset({"x"}, {{1, 2}}, Target{"y", {0.5, 2}}), c), DataError);
}

TEST(Gbdt, PredictRequiresTrainingSchema) {
  GbtConfig c;
  c.n_trees = 2;
  const auto m = fit_gbdt(kStump, c);
  EXPECT_THROW(m.predict(Dataset({"other"}, {{1.0}})), SchemaError);
}

TEST(Forest, SeparableDataIsLearnedExactly) {
  ForestConfig c;
  c.n_trees = 1;
  c.bootstrap = false;
  const auto m = fit_random_forest(kStump, c);
  EXPECT_TRUE(m.classification);
  EXPECT_EQ(m.predict(kStump), (std::vector<double>{0, 0, 1, 1}));
}

TEST(Forest, FullMtryWithoutBootstrapGivesIdenticalTrees) {
  Rng rng(8);
  const auto d = random_binary(rng, 120, 4);
  ForestConfig c;
  c.n_trees = 4;
  c.mtry = 4;
  c.bootstrap = false;
  const auto m = fit_random_forest(d, c);
  for (std::size_t t = 1; t < m.trees.size(); ++t) {
    ASSERT_EQ(m.trees[t].nodes.size(), m.trees[0].nodes.size());
    for (std::size_t k = 0; k < m.trees[0].nodes.size(); ++k) {
      EXPECT_EQ(m.trees[t].nodes[k].feature, m.trees[0].nodes[k].feature);
      EXPECT_EQ(m.trees[t].nodes[k].threshold, m.trees[0].nodes[k].threshold);
    }
  }
}

TEST(Forest, BeatsInterceptOnlyOnFriedman) {
  Rng rng(40);
  auto make = [&](std::size_t n) {
    std::vector<std::vector<double>> cols(5, std::vector<double>(n));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& c : cols) c[i] = rng.uniform();
      y[i] = 10 * std::sin(std::numbers::pi * cols[0][i] * cols[1][i]) + 20 * std::pow(cols[2][i] - 0.5, 2) +
             10 * cols[3][i] + 5 * cols[4][i] + rng.normal();
    }
    return Dataset({"x1", "x2", "x3", "x4", "x5"}, cols, Target{"y", y});
  };
  const auto train = make(500), test = make(500);
  ForestConfig c;
  c.n_trees = 500;
  const auto m = fit_random_forest(train, c);
  EXPECT_FALSE(m.classification);
  const auto y = test.y();
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  const std::vector<double> flat(y.size(), mean);
  EXPECT_LT(metrics::rmse(y, m.predict(test)), metrics::rmse(y, flat));
}

TEST(Forest, Validation) {
  ForestConfig c;
  c.mtry = 2;
  EXPECT_THROW(fit_random_forest(kStump, c), ConfigError);
  EXPECT_EQ(default_mtry(16, true), 4u);
  EXPECT_EQ(default_mtry(16, false), 5u);
  EXPECT_EQ(default_mtry(2, false), 1u);
}

TEST(Forest, Deterministic) {
  Rng rng(9);
  const auto d = random_regression(rng, 100, 3);
  ForestConfig c;
  c.n_trees = 20;
  c.seed = 5;
  EXPECT_EQ(fit_random_forest(d, c).predict(d), fit_random_forest(d, c).predict(d));
}

TEST(Importance, GainSumsToEnsembleGain) {
  Rng rng(11);
  const auto d = random_regression(rng, 150, 4);
  GbtConfig c;
  c.n_trees = 10;
  const Model m = fit_gbdt(d, c);
  const auto imp = importance_gain(m);
  double total = 0.0, by_feature = 0.0;
  for (const auto& t : trees_of(m)) {
    for (const auto& n : t.nodes) total += n.is_leaf() ? 0.0 : n.gain;
  }
  for (const auto& [name, v] : imp) {
    EXPECT_GE(v, 0.0);
    by_feature += v;
  }
  EXPECT_NEAR(by_feature, total, 1e-9 * total);
}

TEST(Importance, StumpPutsAllMassOnItsFeature) {
  const Dataset d({"a", "b"}, {{0, 1, 2, 3}, {5, 5, 5, 5}}, Target{"y", {0, 0, 1, 1}});
  GbtConfig c;
  c.n_trees = 1;
  c.max_depth = 1;
  const Model m = fit_gbdt(d, c);
  const auto imp = importance_gain(m);
  EXPECT_GT(imp.at("a"), 0.0);
  EXPECT_EQ(imp.at("b"), 0.0);
}

TEST(Importance, PermutationOnPerfectSingleSplit) {
  Rng rng(12);
  const std::size_t n = 400;
  std::vector<double> a(n), b(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.uniform();
    b[i] = rng.uniform();
    y[i] = a[i] > 0.5;
  }
  const Dataset d({"a", "b"}, {a, b}, Target{"y", y});
  GbtConfig c;
  c.loss = Loss::kLogistic;
  c.n_trees = 1;
  c.max_depth = 1;
  c.learning_rate = 1.0;
  const Model m = fit_gbdt(d, c);
  const auto imp = importance_permutation(m, d, ImportanceMetric::kAuc, 3, 10);
  EXPECT_EQ(imp.at("b"), 0.0);
  EXPECT_NEAR(1.0 - imp.at("a"), 0.5, 0.08);
  const auto again = importance_permutation(m, d, ImportanceMetric::kAuc, 3, 10);
  EXPECT_EQ(imp, again);
}

TEST(Importance, TrueFriedmanPredictorsRankFirst) {
  int hits = 0;
  const int runs = 10;
  for (int run = 0; run < runs; ++run) {
    Rng rng(derive_seed(77, static_cast<std::uint64_t>(run)));
    const std::size_t n = 500;
    std::vector<std::vector<double>> cols(10, std::vector<double>(n));
    std::vector<double> y(n);
    std::vector<std::string> names;
    for (int j = 0; j < 10; ++j) names.push_back("x" + std::to_string(j + 1));
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& c : cols) c[i] = rng.uniform();
      y[i] = 10 * std::sin(std::numbers::pi * cols[0][i] * cols[1][i]) + 20 * std::pow(cols[2][i] - 0.5, 2) +
             10 * cols[3][i] + 5 * cols[4][i] + rng.normal();
    }
    GbtConfig c;
    c.n_trees = 200;
    c.max_depth = 3;
    c.learning_rate = 0.1;
    const Model m = fit_gbdt(Dataset(names, cols, Target{"y", y}), c);
    auto imp = importance_gain(m);
    std::vector<std::pair<double, std::string>> ranked;
    for (const auto& [k, v] : imp) ranked.push_back({-v, k});
    std::sort(ranked.begin(), ranked.end());
    std::set<std::string> top;
    for (int r = 0; r < 5; ++r) top.insert(ranked[r].second);
    hits += top == std::set<std::string>{"x1", "x2", "x3", "x4", "x5"};
  }
  EXPECT_GE(hits, 9);
}

TEST(Json, TreeDumpRescoresExactly) {
  Rng rng(13);
  const auto d = random_regression(rng, 100, 3);
  GbtConfig c;
  c.n_trees = 8;
  const auto m = fit_gbdt(d, c);
  nlohmann::ordered_json j = m;
  const auto pred = m.predict(d);
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    double raw = j["base_score"].get<double>();
    for (const auto& t : j["trees"]) {
      int k = 0;
      while (t["feature"][k].get<int>() >= 0) {
        const double x = d.column(t["feature"][k].get<std::size_t>())[i];
        k = x <= t["threshold"][k].get<double>() ? t["left"][k].get<int>() : t["right"][k].get<int>();
      }
      raw += j["learning_rate"].get<double>() * t["value"][k].get<double>();
    }
    EXPECT_EQ(raw, pred[i]);
  }
}

}  // namespace
}  // namespace hybridml::trees
