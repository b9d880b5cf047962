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

#ifndef HYBRIDML_TUNER_HPP_
#define HYBRIDML_TUNER_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hybridml/dataframe.hpp"
#include "hybridml/errors.hpp"
#include "hybridml/metrics.hpp"
#include "hybridml/parallel.hpp"
#include "hybridml/random.hpp"
#include "json.hpp"

namespace hybridml::tuning {

// Hyperparameter values by name. Integer parameters are stored as whole
// doubles.
using Hyperparams = std::map<std::string, double>;

struct Distribution {
  enum class Kind { kFixed, kUniformInt, kUniformReal, kLogUniform, kPow2Int };

  Kind kind = Kind::kFixed;
  double lo = 0.0;
  double hi = 0.0;

  static Distribution fixed(double v) { return {Kind::kFixed, v, v}; }
  static Distribution uniform_int(double lo, double hi) { return {Kind::kUniformInt, lo, hi}; }
  static Distribution uniform_real(double lo, double hi) { return {Kind::kUniformReal, lo, hi}; }
  static Distribution log_uniform(double lo, double hi) { return {Kind::kLogUniform, lo, hi}; }
  // 2^e with e drawn as an integer from [lo, hi].
  static Distribution pow2_int(double lo, double hi) { return {Kind::kPow2Int, lo, hi}; }

  void validate(const std::string& name) const {
    auto fail = [&](const std::string& why) { throw ConfigError("search space '" + name + "': " + why); };
    if (!std::isfinite(lo) || !std::isfinite(hi)) fail("non-finite bound");
    if (kind == Kind::kFixed) return;
    if (!(lo < hi)) fail("lo must be < hi");
    if (kind == Kind::kLogUniform && !(lo > 0.0)) fail("log-uniform needs lo > 0");
    if ((kind == Kind::kUniformInt || kind == Kind::kPow2Int) &&
        (std::floor(lo) != lo || std::floor(hi) != hi)) {
      fail("integer bounds required");
    }
  }

  double sample(Rng& rng) const {
    switch (kind) {
      case Kind::kFixed: return lo;
      case Kind::kUniformInt:
        return static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
      case Kind::kUniformReal: return rng.uniform(lo, hi);
      case Kind::kLogUniform: return std::exp(rng.uniform(std::log(lo), std::log(hi)));
      case Kind::kPow2Int:
        return std::ldexp(1.0, static_cast<int>(rng.uniform_int(static_cast<std::int64_t>(lo),
                                                                static_cast<std::int64_t>(hi))));
    }
    return lo;
  }
};

inline void to_json(nlohmann::ordered_json& j, const Distribution& d) {
  using K = Distribution::Kind;
  switch (d.kind) {
    case K::kFixed: j = d.lo; return;
    case K::kUniformInt: j = {{"uniform_int", {d.lo, d.hi}}}; return;
    case K::kUniformReal: j = {{"uniform", {d.lo, d.hi}}}; return;
    case K::kLogUniform: j = {{"log_uniform", {d.lo, d.hi}}}; return;
    case K::kPow2Int: j = {{"pow2_int", {d.lo, d.hi}}}; return;
  }
}

// A bare number is a fixed value; otherwise a single-key object
// {"uniform_int" | "uniform" | "log_uniform" | "pow2_int": [lo, hi]}.
inline void from_json(const nlohmann::ordered_json& j, Distribution& d) {
  if (j.is_number()) {
    d = Distribution::fixed(j.get<double>());
    return;
  }
  if (!j.is_object() || j.size() != 1) throw ConfigError("search space: expected a number or {kind: [lo, hi]}");
  const auto& [key, bounds] = *j.items().begin();
  if (!bounds.is_array() || bounds.size() != 2) throw ConfigError("search space: '" + key + "' needs [lo, hi]");
  const double lo = bounds[0].get<double>(), hi = bounds[1].get<double>();
  if (key == "uniform_int") d = Distribution::uniform_int(lo, hi);
  else if (key == "uniform") d = Distribution::uniform_real(lo, hi);
  else if (key == "log_uniform") d = Distribution::log_uniform(lo, hi);
  else if (key == "pow2_int") d = Distribution::pow2_int(lo, hi);
  else throw ConfigError("search space: unknown distribution '" + key + "'");
}

struct SearchSpace {
  std::vector<std::pair<std::string, Distribution>> params;

  void set(const std::string& name, Distribution d) {
    for (auto& [n, existing] : params) {
      if (n == name) {
        existing = d;
        return;
      }
    }
    params.emplace_back(name, d);
  }

  const Distribution* find(const std::string& name) const {
    for (const auto& [n, d] : params) {
      if (n == name) return &d;
    }
    return nullptr;
  }

  void validate() const {
    for (const auto& [name, d] : params) d.validate(name);
  }
};

inline void to_json(nlohmann::ordered_json& j, const SearchSpace& s) {
  j = nlohmann::ordered_json::object();
  for (const auto& [name, d] : s.params) j[name] = d;
}

inline void from_json(const nlohmann::ordered_json& j, SearchSpace& s) {
  s.params.clear();
  for (auto it = j.begin(); it != j.end(); ++it) s.params.emplace_back(it.key(), it.value().get<Distribution>());
  s.validate();
}

// Parameters are drawn in declaration order from `rng`.
inline Hyperparams sample_config(const SearchSpace& space, Rng& rng) {
  Hyperparams h;
  for (const auto& [name, d] : space.params) h[name] = d.sample(rng);
  return h;
}

enum class TuneMetric { kAuc, kRmse };

inline bool better(TuneMetric m, double a, double b) { return m == TuneMetric::kAuc ? a > b : a < b; }

inline double score_predictions(TuneMetric m, std::span<const double> y, std::span<const double> pred) {
  return m == TuneMetric::kAuc ? metrics::auc(y, pred) : metrics::rmse(y, pred);
}

struct TrialRecord {
  std::size_t index = 0;
  Hyperparams config;
  std::vector<double> per_fold_metric;
  double mean_metric = std::numeric_limits<double>::quiet_NaN();
  std::optional<std::string> failure;
};

struct SearchResult {
  Hyperparams best;
  std::size_t best_trial = 0;
  std::vector<TrialRecord> trials;
};

// Fits on `fit` and returns scores for the rows of `eval`.
using TrialFn = std::function<std::vector<double>(const Hyperparams&, const Dataset& fit,
                                                  const Dataset& eval, std::uint64_t seed)>;

// Seed of the model fitted on fold `f`. It does not depend on the trial, so
// trials differ only in their hyperparameters.
inline std::uint64_t fold_seed(std::uint64_t seed, std::size_t f) {
  return derive_seed(derive_seed(seed, "fold"), f);
}

inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t t) {
  return derive_seed(derive_seed(seed, "trial"), t);
}

// Random search over `space`, scoring each configuration by k-fold CV
// inside `train`. A trial whose fit or metric fails on any fold is
// discarded with its reason; ties keep the earliest trial.
inline SearchResult random_search(const Dataset& train, const SearchSpace& space, std::size_t n_trials,
                                  const FoldAssignment& folds, TuneMetric metric, const TrialFn& fit_predict,
                                  std::uint64_t seed, int workers = 1) {
  if (n_trials < 1) throw ConfigError("random_search: n_trials must be >= 1");
  if (folds.fold_of_row.size() != train.n_rows()) throw ConfigError("random_search: folds built on another table");
  space.validate();

  SearchResult result;
  result.trials.resize(n_trials);
  for (std::size_t t = 0; t < n_trials; ++t) {
    Rng rng(trial_seed(seed, t));
    result.trials[t].index = t;
    result.trials[t].config = sample_config(space, rng);
    result.trials[t].per_fold_metric.assign(folds.k, std::numeric_limits<double>::quiet_NaN());
  }

  std::vector<Dataset> fit_sets, eval_sets;
  for (std::size_t f = 0; f < folds.k; ++f) {
    fit_sets.push_back(train.rows(folds.rows_outside(f)));
    eval_sets.push_back(train.rows(folds.rows_in(f)));
    audit_disjoint(fit_sets.back(), eval_sets.back());
  }

  std::vector<std::optional<std::string>> errors(n_trials * folds.k);
  parallel_for(n_trials * folds.k, workers, [&](std::size_t task) {
    const std::size_t t = task / folds.k, f = task % folds.k;
    try {
      const auto pred = fit_predict(result.trials[t].config, fit_sets[f], eval_sets[f], fold_seed(seed, f));
      result.trials[t].per_fold_metric[f] = score_predictions(metric, eval_sets[f].y(), pred);
    } catch (const Error& e) {
      errors[task] = "fold " + std::to_string(f) + ": " + e.what();
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t t = 0; t < n_trials; ++t) {
    auto& trial = result.trials[t];
    for (std::size_t f = 0; f < folds.k && !trial.failure; ++f) trial.failure = errors[t * folds.k + f];
    if (trial.failure) continue;
    trial.mean_metric = std::accumulate(trial.per_fold_metric.begin(), trial.per_fold_metric.end(), 0.0) /
                        static_cast<double>(folds.k);
    if (!best || better(metric, trial.mean_metric, result.trials[*best].mean_metric)) best = t;
  }
  if (!best) {
    throw SearchError("random_search: all " + std::to_string(n_trials) + " trials failed; first: " +
                      *result.trials.front().failure);
  }
  result.best_trial = *best;
  result.best = result.trials[*best].config;
  return result;
}

inline void to_json(nlohmann::ordered_json& j, const TrialRecord& t) {
  nlohmann::ordered_json folds = nlohmann::ordered_json::array();
  for (double v : t.per_fold_metric) folds.push_back(std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr);
  j = nlohmann::ordered_json{{"trial", t.index},
                             {"config", t.config},
                             {"per_fold_metric", folds},
                             {"mean_metric", std::isfinite(t.mean_metric) ? nlohmann::ordered_json(t.mean_metric)
                                                                          : nlohmann::ordered_json(nullptr)}};
  if (t.failure) j["failure"] = *t.failure;
}

}  // namespace hybridml::tuning

#endif  // HYBRIDML_TUNER_HPP_
