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

#ifndef HYBRIDML_LEARNERS_HPP_
#define HYBRIDML_LEARNERS_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hybridml/dataframe.hpp"
#include "hybridml/errors.hpp"
#include "hybridml/trees.hpp"
#include "hybridml/tuner.hpp"

namespace hybridml::learners {

using tuning::Distribution;
using tuning::Hyperparams;
using tuning::SearchSpace;

// Five black-box learners built on the two tree engines. The boosted presets
// differ in growth policy, leaf regularization and leaf-weight order.
enum class Preset { kRf, kXgbLike, kLgbmLike, kCatLike, kGbmLike };

enum class Task { kClassification, kRegression };

inline const std::vector<Preset>& all_presets() {
  static const std::vector<Preset> v{Preset::kRf, Preset::kXgbLike, Preset::kLgbmLike, Preset::kCatLike,
                                     Preset::kGbmLike};
  return v;
}

inline const char* preset_name(Preset p) {
  switch (p) {
    case Preset::kRf: return "rf";
    case Preset::kXgbLike: return "xgb-like";
    case Preset::kLgbmLike: return "lgbm-like";
    case Preset::kCatLike: return "cat-like";
    case Preset::kGbmLike: return "gbm-like";
  }
  return "?";
}

inline Preset parse_preset(std::string_view name) {
  for (auto p : all_presets()) {
    if (name == preset_name(p)) return p;
  }
  throw ConfigError("unknown learner preset '" + std::string(name) + "'");
}

inline bool is_boosted(Preset p) { return p != Preset::kRf; }

inline Task task_of(const Dataset& d) {
  return d.has_binary_target() ? Task::kClassification : Task::kRegression;
}

// Search space over the training features of width `p`.
inline SearchSpace default_space(Preset preset, std::size_t p) {
  SearchSpace s;
  s.set("n_trees", Distribution::uniform_int(100, 1000));
  if (preset == Preset::kRf) {
    if (p > 1) s.set("mtry", Distribution::uniform_int(1, static_cast<double>(p)));
    else s.set("mtry", Distribution::fixed(1));
    return s;
  }
  s.set("learning_rate", Distribution::log_uniform(0.001, 0.2));
  switch (preset) {
    case Preset::kXgbLike:
      s.set("max_depth", Distribution::uniform_int(3, 15));
      s.set("l2_leaf_reg", Distribution::fixed(1.0));
      break;
    case Preset::kLgbmLike:
      s.set("max_depth", Distribution::uniform_int(3, 15));
      s.set("num_leaves", Distribution::pow2_int(2, 7));
      break;
    case Preset::kCatLike:
      // Oblivious trees have 2^depth leaves; depth stays at 10 or below.
      s.set("max_depth", Distribution::uniform_int(3, 10));
      s.set("l2_leaf_reg", Distribution::uniform_real(1.0, 10.0));
      break;
    case Preset::kGbmLike:
      s.set("max_depth", Distribution::uniform_int(3, 15));
      break;
    case Preset::kRf: break;
  }
  return s;
}

// Configuration used when no search is run.
inline Hyperparams default_params(Preset preset) {
  switch (preset) {
    case Preset::kRf: return {{"n_trees", 300}, {"mtry", 0}};
    case Preset::kXgbLike: return {{"n_trees", 300}, {"learning_rate", 0.05}, {"max_depth", 4}, {"l2_leaf_reg", 1.0}};
    case Preset::kLgbmLike:
      return {{"n_trees", 300}, {"learning_rate", 0.05}, {"max_depth", 8}, {"num_leaves", 16}};
    case Preset::kCatLike: return {{"n_trees", 300}, {"learning_rate", 0.05}, {"max_depth", 4}, {"l2_leaf_reg", 3.0}};
    case Preset::kGbmLike: return {{"n_trees", 300}, {"learning_rate", 0.05}, {"max_depth", 4}};
  }
  return {};
}

namespace detail {

inline std::size_t count_param(const Hyperparams& h, const char* name, std::size_t fallback) {
  const auto it = h.find(name);
  if (it == h.end()) return fallback;
  if (!(it->second >= 0.0) || std::floor(it->second) != it->second) {
    throw ConfigError(std::string("hyperparameter '") + name + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(it->second);
}

inline double real_param(const Hyperparams& h, const char* name, double fallback) {
  const auto it = h.find(name);
  return it == h.end() ? fallback : it->second;
}

}  // namespace detail

inline trees::GbtConfig gbt_config(Preset preset, const Hyperparams& h, Task task, std::uint64_t seed) {
  trees::GbtConfig c;
  c.loss = task == Task::kClassification ? trees::Loss::kLogistic : trees::Loss::kSquared;
  c.seed = seed;
  switch (preset) {
    case Preset::kXgbLike:
      c.growth = trees::Growth::kDepthWise;
      c.l2_leaf_reg = 1.0;
      c.min_samples_leaf = 1;
      break;
    case Preset::kLgbmLike:
      c.growth = trees::Growth::kLeafWise;
      c.num_leaves = 31;
      c.min_samples_leaf = 20;
      break;
    case Preset::kCatLike:
      c.growth = trees::Growth::kSymmetric;
      c.l2_leaf_reg = 3.0;
      c.min_samples_leaf = 1;
      break;
    case Preset::kGbmLike:
      c.growth = trees::Growth::kDepthWise;
      c.first_order = true;
      c.min_samples_leaf = 10;
      break;
    case Preset::kRf: throw ConfigError("rf is not a boosted preset");
  }
  c.n_trees = detail::count_param(h, "n_trees", c.n_trees);
  c.max_depth = detail::count_param(h, "max_depth", c.max_depth);
  c.learning_rate = detail::real_param(h, "learning_rate", c.learning_rate);
  c.l2_leaf_reg = detail::real_param(h, "l2_leaf_reg", c.l2_leaf_reg);
  c.num_leaves = detail::count_param(h, "num_leaves", c.num_leaves);
  c.min_samples_leaf = detail::count_param(h, "min_samples_leaf", c.min_samples_leaf);
  c.validate();
  return c;
}

inline trees::ForestConfig forest_config(const Hyperparams& h, Task task, std::uint64_t seed) {
  trees::ForestConfig c;
  c.classification = task == Task::kClassification;
  c.min_samples_leaf = task == Task::kClassification ? 1 : 5;
  c.seed = seed;
  c.n_trees = detail::count_param(h, "n_trees", c.n_trees);
  c.mtry = detail::count_param(h, "mtry", c.mtry);
  c.min_samples_leaf = detail::count_param(h, "min_samples_leaf", c.min_samples_leaf);
  c.max_depth = detail::count_param(h, "max_depth", c.max_depth);
  return c;
}

inline trees::Model fit_learner(Preset preset, const Hyperparams& h, const Dataset& train, Task task,
                                std::uint64_t seed) {
  if (preset == Preset::kRf) return trees::fit_random_forest(train, forest_config(h, task, seed));
  return trees::fit_gbdt(train, gbt_config(preset, h, task, seed));
}

// Adapter for the tuner: fit on one table, score another.
inline tuning::TrialFn trial_fn(Preset preset, Task task) {
  return [preset, task](const Hyperparams& h, const Dataset& fit, const Dataset& eval, std::uint64_t seed) {
    return trees::predict(fit_learner(preset, h, fit, task, seed), eval);
  };
}

}  // namespace hybridml::learners

#endif  // HYBRIDML_LEARNERS_HPP_
