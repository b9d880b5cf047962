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

#include "hybridml/tuner.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <set>

#include "hybridml/learners.hpp"
#include "test_util.hpp"

namespace hybridml::tuning {
namespace {

// Kolmogorov-Smirnov distance between a sample and U(0, 1).
double ks_uniform(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max({d, (static_cast<double>(i) + 1) / n - u[i], u[i] - static_cast<double>(i) / n});
  }
  return d;
}

Dataset noisy_binary(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> cols(3, std::vector<double>(n));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& c : cols) c[i] = rng.normal();
    y[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-2.0 * cols[0][i])) ? 1.0 : 0.0;
  }
  return Dataset({"a", "b", "c"}, cols, Target{"y", y});
}

TEST(Sample, IntegerRangeIsInclusive) {
  Rng rng(1);
  const auto d = Distribution::uniform_int(100, 1000);
  std::set<double> seen;
  for (int i = 0; i < 20000; ++i) {
    const double v = d.sample(rng);
    ASSERT_GE(v, 100);
    ASSERT_LE(v, 1000);
    ASSERT_EQ(v, std::floor(v));
    seen.insert(v);
  }
  EXPECT_TRUE(seen.count(100) && seen.count(1000));
  const auto small = Distribution::uniform_int(3, 4);
  std::set<double> both;
  for (int i = 0; i < 100; ++i) both.insert(small.sample(rng));
  EXPECT_EQ(both, (std::set<double>{3, 4}));
}

TEST(Sample, LogUniformPassesKsTest) {
  Rng rng(2);
  const auto d = Distribution::log_uniform(0.001, 0.2);
  std::vector<double> u;
  for (int i = 0; i < 10000; ++i) {
    const double v = d.sample(rng);
    ASSERT_GE(v, 0.001);
    ASSERT_LT(v, 0.2);
    u.push_back((std::log(v) - std::log(0.001)) / (std::log(0.2) - std::log(0.001)));
  }
  // 1.628 / sqrt(n) is the asymptotic critical value at the 1% level.
  EXPECT_LT(ks_uniform(u), 1.628 / std::sqrt(10000.0));
}

TEST(Sample, Pow2AndFixed) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double v = Distribution::pow2_int(2, 7).sample(rng);
    const int e = static_cast<int>(std::log2(v));
    EXPECT_EQ(std::ldexp(1.0, e), v);
    EXPECT_GE(e, 2);
    EXPECT_LE(e, 7);
  }
  EXPECT_EQ(Distribution::fixed(0.5).sample(rng), 0.5);
}

TEST(Sample, DeterministicGivenState) {
  const auto space = learners::default_space(learners::Preset::kLgbmLike, 10);
  Rng a(9), b(9);
  EXPECT_EQ(sample_config(space, a), sample_config(space, b));
}

TEST(Space, ValidationAndJson) {
  EXPECT_THROW(Distribution::uniform_real(2, 1).validate("x"), ConfigError);
  EXPECT_THROW(Distribution::log_uniform(0, 1).validate("x"), ConfigError);
  EXPECT_THROW(Distribution::uniform_int(1.5, 3).validate("x"), ConfigError);
  const auto j = nlohmann::ordered_json::parse(
      R"({"n_trees": {"uniform_int": [100, 1000]}, "learning_rate": {"log_uniform": [0.001, 0.2]}, "l2_leaf_reg": 1})");
  const auto space = j.get<SearchSpace>();
  ASSERT_EQ(space.params.size(), 3u);
  EXPECT_EQ(space.find("l2_leaf_reg")->kind, Distribution::Kind::kFixed);
  EXPECT_EQ(nlohmann::ordered_json(space), j);
  EXPECT_THROW(nlohmann::ordered_json::parse(R"({"x": {"normal": [0, 1]}})").get<SearchSpace>(), ConfigError);
  EXPECT_THROW(nlohmann::ordered_json::parse(R"({"x": {"uniform": [3, 1]}})").get<SearchSpace>(), ConfigError);
}

// A learner whose score is a known function of its hyperparameter, so the
// argmax is known in advance.
TrialFn scripted(std::atomic<int>* calls = nullptr) {
  return [calls](const Hyperparams& h, const Dataset&, const Dataset& eval, std::uint64_t) {
    if (calls) ++*calls;
    const double q = h.at("q");
    if (q > 0.9) throw ModelError("diverged");
    std::vector<double> pred(eval.y().begin(), eval.y().end());
    // Mix the labels with a constant: AUC falls as q moves away from 0.5.
    for (double& p : pred) p = std::abs(q - 0.5) < 0.2 ? p : 0.5;
    return pred;
  };
}

TEST(RandomSearch, RecordsAndArgmax) {
  const auto d = noisy_binary(200, 1);
  const auto folds = kfold_stratified(d, 5, 1);
  SearchSpace space;
  space.set("q", Distribution::uniform_real(0.0, 1.0));
  std::atomic<int> calls{0};
  const auto r = random_search(d, space, 12, folds, TuneMetric::kAuc, scripted(&calls), 7);
  ASSERT_EQ(r.trials.size(), 12u);
  EXPECT_EQ(calls.load(), 60);
  std::optional<std::size_t> expected;
  for (const auto& t : r.trials) {
    if (t.config.at("q") > 0.9) {
      EXPECT_TRUE(t.failure);
      continue;
    }
    ASSERT_FALSE(t.failure);
    double sum = 0.0;
    for (double v : t.per_fold_metric) sum += v;
    EXPECT_NEAR(t.mean_metric, sum / 5.0, 1e-12);
    if (!expected || t.mean_metric > r.trials[*expected].mean_metric) expected = t.index;
  }
  ASSERT_TRUE(expected);
  EXPECT_EQ(r.best_trial, *expected);
  EXPECT_EQ(r.best, r.trials[*expected].config);
  EXPECT_EQ(r.trials[r.best_trial].mean_metric, 1.0);
}

TEST(RandomSearch, PaperBudgetAndSingleTrial) {
  const auto d = noisy_binary(150, 2);
  const auto folds = kfold_stratified(d, 5, 2);
  SearchSpace space;
  space.set("q", Distribution::uniform_real(0.4, 0.6));
  EXPECT_EQ(random_search(d, space, 5, folds, TuneMetric::kAuc, scripted(), 1).trials.size(), 5u);
  const auto one = random_search(d, space, 1, folds, TuneMetric::kAuc, scripted(), 1);
  EXPECT_EQ(one.best_trial, 0u);
  EXPECT_EQ(one.best, one.trials[0].config);
  EXPECT_THROW(random_search(d, space, 0, folds, TuneMetric::kAuc, scripted(), 1), ConfigError);
}

TEST(RandomSearch, AllTrialsFailing) {
  const auto d = noisy_binary(100, 3);
  SearchSpace space;
  space.set("q", Distribution::fixed(0.95));
  EXPECT_THROW(random_search(d, space, 3, kfold_stratified(d, 5, 3), TuneMetric::kAuc, scripted(), 1),
               SearchError);
}

TEST(RandomSearch, DegenerateSpaceGivesIdenticalTrials) {
  const auto d = noisy_binary(200, 4);
  const auto folds = kfold_stratified(d, 4, 4);
  SearchSpace space;
  space.set("n_trees", Distribution::fixed(20));
  space.set("max_depth", Distribution::fixed(3));
  space.set("learning_rate", Distribution::fixed(0.1));
  const auto r = random_search(d, space, 4, folds, TuneMetric::kAuc,
                               learners::trial_fn(learners::Preset::kXgbLike, learners::Task::kClassification), 4);
  for (const auto& t : r.trials) {
    EXPECT_EQ(t.config, r.trials[0].config);
    EXPECT_EQ(t.per_fold_metric, r.trials[0].per_fold_metric);
  }
  EXPECT_EQ(r.best_trial, 0u);
}

TEST(RandomSearch, EvaluationRowsAreDisjointFromFitRows) {
  const auto d = noisy_binary(120, 5);
  SearchSpace space;
  space.set("q", Distribution::fixed(0.5));
  std::mutex mu;
  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> seen;
  TrialFn spy = [&](const Hyperparams&, const Dataset& fit, const Dataset& eval, std::uint64_t) {
    std::lock_guard lock(mu);
    seen.push_back({{fit.row_ids().begin(), fit.row_ids().end()}, {eval.row_ids().begin(), eval.row_ids().end()}});
    return std::vector<double>(eval.y().begin(), eval.y().end());
  };
  random_search(d, space, 2, kfold_stratified(d, 3, 5), TuneMetric::kAuc, spy, 5);
  ASSERT_EQ(seen.size(), 6u);
  for (const auto& [fit, eval] : seen) {
    std::set<std::size_t> a(fit.begin(), fit.end());
    for (auto id : eval) EXPECT_FALSE(a.count(id));
    EXPECT_EQ(fit.size() + eval.size(), 120u);
  }
}

TEST(RandomSearch, WorkerCountDoesNotChangeResults) {
  const auto d = noisy_binary(200, 6);
  const auto folds = kfold_stratified(d, 3, 6);
  auto space = learners::default_space(learners::Preset::kCatLike, 3);
  space.set("n_trees", Distribution::uniform_int(10, 40));
  const auto fn = learners::trial_fn(learners::Preset::kCatLike, learners::Task::kClassification);
  const auto a = random_search(d, space, 4, folds, TuneMetric::kAuc, fn, 11, 1);
  const auto b = random_search(d, space, 4, folds, TuneMetric::kAuc, fn, 11, 4);
  EXPECT_EQ(nlohmann::ordered_json(a.trials).dump(), nlohmann::ordered_json(b.trials).dump());
  EXPECT_EQ(a.best, b.best);
}

TEST(RandomSearch, RmseIsMinimized) {
  Rng rng(7);
  std::vector<double> x(120), y(120);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.uniform();
    y[i] = 3 * x[i] + rng.normal(0, 0.1);
  }
  const Dataset d({"x"}, {x}, Target{"y", y});
  SearchSpace space;
  space.set("shift", Distribution::uniform_real(-1, 1));
  TrialFn fn = [](const Hyperparams& h, const Dataset&, const Dataset& eval, std::uint64_t) {
    std::vector<double> pred(eval.n_rows());
    for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = 3 * eval.column("x")[i] + h.at("shift");
    return pred;
  };
  FoldAssignment folds = kfold_stratified(std::vector<int>(120, 0), 4, 7);
  const auto r = random_search(d, space, 10, folds, TuneMetric::kRmse, fn, 7);
  for (const auto& t : r.trials) EXPECT_LE(std::abs(r.best.at("shift")), std::abs(t.config.at("shift")));
}

TEST(Learners, PresetsAndSpaces) {
  using learners::Preset;
  EXPECT_EQ(learners::parse_preset("cat-like"), Preset::kCatLike);
  EXPECT_THROW(learners::parse_preset("catboost"), ConfigError);
  for (auto p : learners::all_presets()) {
    const auto space = learners::default_space(p, 12);
    space.validate();
    ASSERT_TRUE(space.find("n_trees"));
    EXPECT_EQ(space.find("n_trees")->lo, 100);
    EXPECT_EQ(space.find("n_trees")->hi, 1000);
    if (learners::is_boosted(p)) {
      EXPECT_EQ(space.find("learning_rate")->kind, Distribution::Kind::kLogUniform);
      EXPECT_EQ(space.find("max_depth")->lo, 3);
    }
  }
  EXPECT_EQ(learners::default_space(Preset::kRf, 12).find("mtry")->hi, 12);
  EXPECT_EQ(learners::default_space(Preset::kLgbmLike, 12).find("num_leaves")->kind, Distribution::Kind::kPow2Int);
  const auto c = learners::gbt_config(Preset::kGbmLike, {{"max_depth", 5}}, learners::Task::kRegression, 1);
  EXPECT_TRUE(c.first_order);
  EXPECT_EQ(c.max_depth, 5u);
  EXPECT_THROW(learners::gbt_config(Preset::kXgbLike, {{"max_depth", 2.5}}, learners::Task::kRegression, 1),
               ConfigError);
}

TEST(Learners, EveryPresetFitsBothTasks) {
  const auto cls = noisy_binary(150, 8);
  std::vector<double> yr(cls.y().begin(), cls.y().end());
  for (std::size_t i = 0; i < yr.size(); ++i) yr[i] = cls.column("a")[i] * 2 + yr[i];
  const auto reg = cls.with_target(Target{"y", yr});
  for (auto p : learners::all_presets()) {
    auto h = learners::default_params(p);
    h["n_trees"] = 30;
    const auto mc = learners::fit_learner(p, h, cls, learners::Task::kClassification, 3);
    for (double v : trees::predict(mc, cls)) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_GT(metrics::auc(cls.y(), trees::predict(mc, cls)), 0.7) << learners::preset_name(p);
    const auto mr = learners::fit_learner(p, h, reg, learners::Task::kRegression, 3);
    EXPECT_EQ(trees::predict(mr, reg).size(), reg.n_rows());
  }
}

}  // namespace
}  // namespace hybridml::tuning
