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

#ifndef HYBRIDML_PIPELINE_HPP_
#define HYBRIDML_PIPELINE_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "hybridml/csv.hpp"
#include "hybridml/dataframe.hpp"
#include "hybridml/errors.hpp"
#include "hybridml/featgen.hpp"
#include "hybridml/learners.hpp"
#include "hybridml/metrics.hpp"
#include "hybridml/parallel.hpp"
#include "hybridml/random.hpp"
#include "hybridml/regpath.hpp"
#include "hybridml/tuner.hpp"
#include "json.hpp"

// Penalized baselines, full-variable black-box runs and hybrid runs
// (penalized selection, then a tuned tree ensemble on the selected columns).
// Everything is fitted on the training split; the test split is only scored.
namespace hybridml::pipeline {

using learners::Preset;
using learners::Task;
using tuning::Hyperparams;

enum class SelectionMethod { kNone, kRidge, kLasso, kElasticNet, kPureRegularized };

inline const char* selection_name(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::kNone: return "none";
    case SelectionMethod::kRidge: return "ridge";
    case SelectionMethod::kLasso: return "lasso";
    case SelectionMethod::kElasticNet: return "elasticnet";
    case SelectionMethod::kPureRegularized: return "pure-regularized";
  }
  return "?";
}

inline SelectionMethod parse_selection(std::string_view name) {
  for (auto m : {SelectionMethod::kRidge, SelectionMethod::kLasso, SelectionMethod::kElasticNet}) {
    if (name == selection_name(m)) return m;
  }
  throw ConfigError("unknown selection method '" + std::string(name) + "' (ridge, lasso, elasticnet)");
}

inline const std::vector<SelectionMethod>& penalized_methods() {
  static const std::vector<SelectionMethod> v{SelectionMethod::kRidge, SelectionMethod::kLasso,
                                              SelectionMethod::kElasticNet};
  return v;
}

inline double selection_alpha(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::kRidge: return 0.0;
    case SelectionMethod::kLasso: return 1.0;
    case SelectionMethod::kElasticNet: return 0.5;
    default: throw ConfigError(std::string("selection '") + selection_name(m) + "' has no penalty");
  }
}

struct PipelineOptions {
  std::size_t k = 5;
  // 0 skips the search and fits the preset defaults.
  std::size_t n_trials = 5;
  std::uint64_t seed = 0;
  std::optional<std::size_t> ridge_top_m;  // default glm::kDefaultRidgeTopM
  glm::CvOptions cv;
  // Per-preset entries replacing those of the default search space.
  std::map<std::string, tuning::SearchSpace> space_overrides;
  double threshold = 0.5;
  int workers = 1;

  void validate() const {
    if (k < 2) throw ConfigError("k must be at least 2");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
    if (ridge_top_m && *ridge_top_m < 1) throw ConfigError("ridge_top_m must be >= 1");
    for (const auto& [name, space] : space_overrides) {
      learners::parse_preset(name);
      space.validate();
    }
  }
};

// Structural leakage bookkeeping for one record.
struct LeakageAudit {
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t overlap = 0;  // |train ids ∩ test ids|
  // Engineering statistics were fitted on exactly the training rows; empty
  // when no engineering ran.
  std::optional<bool> features_fitted_on_train;

  bool passed() const { return overlap == 0 && features_fitted_on_train.value_or(true); }
};

inline LeakageAudit audit_split(const Dataset& train, const Dataset& test) {
  std::set<std::size_t> ids(train.row_ids().begin(), train.row_ids().end());
  LeakageAudit a;
  a.n_train = train.n_rows();
  a.n_test = test.n_rows();
  for (auto id : test.row_ids()) a.overlap += ids.count(id);
  return a;
}

struct EvaluationRecord {
  std::string model_id;
  std::string learner;  // "glmnet" or a preset name
  SelectionMethod selection = SelectionMethod::kNone;
  std::vector<std::string> features;  // columns fed to the model
  Hyperparams hyperparameters;
  std::optional<metrics::MetricBlock> metrics;  // binary targets
  std::optional<double> rmse;                   // continuous targets
  std::vector<tuning::TrialRecord> trials;
  std::uint64_t seed = 0;
  LeakageAudit audit;
  std::optional<std::string> error;
  std::optional<std::string> error_kind;  // "config" | "data" | "model"
  // Test labels and scores, for ROC output; not part of the JSON record.
  std::vector<double> test_labels;
  std::vector<double> test_scores;

  bool ok() const { return !error; }
};

// ---------------------------------------------------------------------------
// Data preparation
// ---------------------------------------------------------------------------

struct PreparedSplit {
  Dataset train;
  Dataset test;
  LeakageAudit audit;
  std::optional<nlohmann::ordered_json> engineering_state;
};

inline std::uint64_t split_seed(std::uint64_t seed) { return derive_seed(seed, "split"); }

// Stratified split of the raw table, then (optionally) feature engineering
// fitted on the training rows alone and replayed on the test rows.
inline PreparedSplit prepare_split(const Dataset& raw, double test_fraction, std::uint64_t seed,
                                   const std::optional<features::FeatureRecipe>& recipe) {
  auto split = split_stratified(raw, test_fraction, split_seed(seed));
  PreparedSplit out;
  if (recipe) {
    const auto engineer = features::FeatureEngineer::fit(split.train, *recipe);
    const auto encode = [&](const Dataset& d) {
      return features::encode_categoricals(engineer.transform(d), engineer.n_age_groups(), engineer.n_clusters());
    };
    out.train = encode(split.train);
    out.test = encode(split.test);
    out.engineering_state = engineer.state_json();
    std::vector<std::size_t> fitted = engineer.fit_row_ids();
    std::vector<std::size_t> train_ids(out.train.row_ids().begin(), out.train.row_ids().end());
    std::sort(fitted.begin(), fitted.end());
    std::sort(train_ids.begin(), train_ids.end());
    out.audit = audit_split(out.train, out.test);
    out.audit.features_fitted_on_train = fitted == train_ids;
  } else {
    out.train = std::move(split.train);
    out.test = std::move(split.test);
    out.audit = audit_split(out.train, out.test);
  }
  audit_disjoint(out.train, out.test);
  return out;
}

// ---------------------------------------------------------------------------
// Building blocks
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t folds_seed(std::uint64_t seed) { return derive_seed(seed, "folds"); }

// Depends on the learner only, so a hybrid run that keeps every column
// reproduces the full-variable run exactly.
inline std::uint64_t learner_seed(std::uint64_t seed, Preset p) {
  return derive_seed(derive_seed(seed, "learner"), learners::preset_name(p));
}

inline std::uint64_t tune_seed(std::uint64_t seed, Preset p) {
  return derive_seed(derive_seed(seed, "tune"), learners::preset_name(p));
}

inline void score_into(EvaluationRecord& r, const Dataset& test, std::vector<double> scores, double threshold) {
  r.test_labels.assign(test.y().begin(), test.y().end());
  if (test.has_binary_target()) {
    r.metrics = metrics::evaluate_scores(r.test_labels, scores, threshold);
  } else {
    r.rmse = metrics::rmse(r.test_labels, scores);
  }
  r.test_scores = std::move(scores);
}

inline tuning::SearchSpace search_space(Preset preset, std::size_t p, const PipelineOptions& opts) {
  auto space = learners::default_space(preset, p);
  const auto it = opts.space_overrides.find(learners::preset_name(preset));
  if (it != opts.space_overrides.end()) {
    for (const auto& [name, d] : it->second.params) space.set(name, d);
  }
  return space;
}

}  // namespace detail

inline FoldAssignment make_folds(const Dataset& train, const PipelineOptions& opts) {
  return kfold_stratified(train, opts.k, detail::folds_seed(opts.seed));
}

struct PenalizedRun {
  glm::CvResult cv;
  glm::RegularizedFit fit;
};

// Lambda by k-fold CV (AUC for binary targets, MSE otherwise), then a refit
// on all of `train` at that lambda.
inline PenalizedRun fit_penalized(const Dataset& train, double alpha, const FoldAssignment& folds,
                                  const PipelineOptions& opts) {
  const bool binary = train.has_binary_target();
  const auto family = binary ? glm::Family::kBinomial : glm::Family::kGaussian;
  PenalizedRun run;
  run.cv = glm::cv_glmnet(train, family, alpha, folds, binary ? glm::CvMeasure::kAuc : glm::CvMeasure::kMse,
                          opts.cv);
  run.fit = glm::refit_at_best(family, train, run.cv, opts.cv.solver);
  return run;
}

inline glm::FeatureSelection selection_of(const PenalizedRun& run, const PipelineOptions& opts) {
  return glm::select_features(run.fit, opts.ridge_top_m);
}

// Selected names in the column order of `d`. Tree tie-breaking depends on
// column order, so a selection that keeps everything must present the
// columns exactly as the full-variable run does.
inline std::vector<std::string> in_column_order(const Dataset& d, const glm::FeatureSelection& sel) {
  const auto chosen = sel.names();
  std::vector<std::string> out;
  for (const auto& name : d.names()) {
    if (std::find(chosen.begin(), chosen.end(), name) != chosen.end()) out.push_back(name);
  }
  return out;
}

inline EvaluationRecord penalized_record(const PenalizedRun& run, SelectionMethod method, const Dataset& train,
                                         const Dataset& test, const PipelineOptions& opts) {
  EvaluationRecord r;
  r.model_id = selection_name(method);
  r.learner = "glmnet";
  r.selection = SelectionMethod::kPureRegularized;
  for (std::size_t j = 0; j < run.fit.beta.size(); ++j) {
    if (run.fit.beta[j] != 0.0) r.features.push_back(run.fit.feature_names[j]);
  }
  r.hyperparameters = {{"alpha", run.fit.penalty.alpha}, {"lambda", run.fit.penalty.lambda}};
  r.seed = opts.seed;
  r.audit = audit_split(train, test);
  detail::score_into(r, test, glm::predict_glm(run.fit, test), opts.threshold);
  return r;
}

// Penalized GLM baseline: CV-selected lambda, refit on train, scored on test.
inline EvaluationRecord run_regularized_baseline(const Dataset& train, const Dataset& test, SelectionMethod method,
                                                 const PipelineOptions& opts) {
  opts.validate();
  audit_disjoint(train, test);
  const auto run = fit_penalized(train, selection_alpha(method), make_folds(train, opts), opts);
  return penalized_record(run, method, train, test, opts);
}

// Tunes `preset` on the `columns` of train by k-fold random search, refits
// with the best configuration and scores test.
inline EvaluationRecord run_blackbox(const Dataset& train, const Dataset& test, Preset preset,
                                     const std::vector<std::string>& columns, SelectionMethod selection,
                                     const PipelineOptions& opts, const FoldAssignment& folds,
                                     int tuner_workers) {
  const auto fit_set = train.select(columns);
  const auto test_set = test.select(columns);
  audit_disjoint(fit_set, test_set);
  const Task task = learners::task_of(train);
  EvaluationRecord r;
  r.learner = learners::preset_name(preset);
  r.selection = selection;
  r.model_id = r.learner + ":" + (selection == SelectionMethod::kNone ? "full" : selection_name(selection));
  r.features = columns;
  r.seed = opts.seed;
  r.audit = audit_split(fit_set, test_set);
  if (opts.n_trials == 0) {
    r.hyperparameters = learners::default_params(preset);
  } else {
    const auto metric = task == Task::kClassification ? tuning::TuneMetric::kAuc : tuning::TuneMetric::kRmse;
    auto result = tuning::random_search(fit_set, detail::search_space(preset, columns.size(), opts), opts.n_trials,
                                        folds, metric, learners::trial_fn(preset, task),
                                        detail::tune_seed(opts.seed, preset), tuner_workers);
    r.hyperparameters = result.best;
    r.trials = std::move(result.trials);
  }
  const auto model =
      learners::fit_learner(preset, r.hyperparameters, fit_set, task, detail::learner_seed(opts.seed, preset));
  detail::score_into(r, test_set, trees::predict(model, test_set), opts.threshold);
  return r;
}

inline EvaluationRecord run_fullvar_blackbox(const Dataset& train, const Dataset& test, Preset preset,
                                             const PipelineOptions& opts) {
  opts.validate();
  audit_disjoint(train, test);
  return run_blackbox(train, test, preset, train.names(), SelectionMethod::kNone, opts, make_folds(train, opts),
                      opts.workers);
}

// Selection on train, then the black-box run on the selected columns.
inline EvaluationRecord run_hybrid(const Dataset& train, const Dataset& test, SelectionMethod method, Preset preset,
                                   const PipelineOptions& opts) {
  opts.validate();
  audit_disjoint(train, test);
  const auto folds = make_folds(train, opts);
  const auto run = fit_penalized(train, selection_alpha(method), folds, opts);
  return run_blackbox(train, test, preset, in_column_order(train, selection_of(run, opts)), method, opts, folds,
                      opts.workers);
}

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

struct MatrixSpec {
  std::vector<SelectionMethod> pure = penalized_methods();
  bool full = true;
  std::vector<SelectionMethod> hybrid = penalized_methods();
  std::vector<Preset> presets = learners::all_presets();

  std::size_t n_records() const { return pure.size() + presets.size() * ((full ? 1 : 0) + hybrid.size()); }
};

namespace detail {

inline void mark_failed(EvaluationRecord& r, const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const ConfigError& x) {
    r.error = x.what();
    r.error_kind = "config";
  } catch (const DataError& x) {
    r.error = x.what();
    r.error_kind = "data";
  } catch (const Error& x) {
    r.error = x.what();
    r.error_kind = "model";
  }
}

}  // namespace detail

// Pure penalized records, then per preset the full-variable record and one
// hybrid record per selection method. Records are independent tasks spread
// over opts.workers; a failing record carries its error and the rest go on.
inline std::vector<EvaluationRecord> run_matrix(const Dataset& train, const Dataset& test, const MatrixSpec& spec,
                                                const PipelineOptions& opts,
                                                const LeakageAudit* base_audit = nullptr) {
  opts.validate();
  audit_disjoint(train, test);
  const auto folds = make_folds(train, opts);

  std::vector<SelectionMethod> needed = spec.pure;
  for (auto m : spec.hybrid) {
    if (std::find(needed.begin(), needed.end(), m) == needed.end()) needed.push_back(m);
  }
  std::vector<std::optional<PenalizedRun>> runs(needed.size());
  std::vector<std::exception_ptr> run_errors(needed.size());
  parallel_for(needed.size(), opts.workers, [&](std::size_t i) {
    try {
      runs[i] = fit_penalized(train, selection_alpha(needed[i]), folds, opts);
    } catch (const Error&) {
      run_errors[i] = std::current_exception();
    }
  });
  auto run_index = [&](SelectionMethod m) {
    return static_cast<std::size_t>(std::find(needed.begin(), needed.end(), m) - needed.begin());
  };

  std::vector<EvaluationRecord> records;
  for (auto m : spec.pure) {
    const auto i = run_index(m);
    EvaluationRecord r;
    if (runs[i]) {
      try {
        r = penalized_record(*runs[i], m, train, test, opts);
      } catch (const Error&) {
        detail::mark_failed(r, std::current_exception());
      }
    } else {
      detail::mark_failed(r, run_errors[i]);
    }
    r.model_id = selection_name(m);
    r.learner = "glmnet";
    r.selection = SelectionMethod::kPureRegularized;
    records.push_back(std::move(r));
  }

  // Black-box jobs, deduplicated on (preset, columns).
  struct Slot {
    Preset preset;
    SelectionMethod selection;
    std::optional<std::size_t> job;
    std::exception_ptr error;
  };
  struct Job {
    Preset preset;
    std::vector<std::string> columns;
    SelectionMethod selection;
  };
  std::vector<Slot> slots;
  std::vector<Job> jobs;
  std::map<std::pair<int, std::vector<std::string>>, std::size_t> job_of;
  auto add = [&](Preset p, SelectionMethod sel, std::vector<std::string> columns) {
    const auto key = std::make_pair(static_cast<int>(p), columns);
    auto it = job_of.find(key);
    if (it == job_of.end()) {
      it = job_of.emplace(key, jobs.size()).first;
      jobs.push_back({p, std::move(columns), sel});
    }
    slots.push_back({p, sel, it->second, nullptr});
  };
  for (auto p : spec.presets) {
    if (spec.full) add(p, SelectionMethod::kNone, train.names());
    for (auto m : spec.hybrid) {
      const auto i = run_index(m);
      if (!runs[i]) {
        slots.push_back({p, m, std::nullopt, run_errors[i]});
        continue;
      }
      try {
        add(p, m, in_column_order(train, selection_of(*runs[i], opts)));
      } catch (const Error&) {
        slots.push_back({p, m, std::nullopt, std::current_exception()});
      }
    }
  }

  std::vector<EvaluationRecord> results(jobs.size());
  std::vector<std::exception_ptr> job_errors(jobs.size());
  parallel_for(jobs.size(), opts.workers, [&](std::size_t j) {
    try {
      results[j] = run_blackbox(train, test, jobs[j].preset, jobs[j].columns, jobs[j].selection, opts, folds, 1);
    } catch (const Error&) {
      job_errors[j] = std::current_exception();
    }
  });

  for (const auto& s : slots) {
    EvaluationRecord r;
    if (s.job) {
      if (job_errors[*s.job]) detail::mark_failed(r, job_errors[*s.job]);
      else r = results[*s.job];
    } else {
      detail::mark_failed(r, s.error);
    }
    r.learner = learners::preset_name(s.preset);
    r.selection = s.selection;
    r.model_id = r.learner + ":" + (s.selection == SelectionMethod::kNone ? "full" : selection_name(s.selection));
    records.push_back(std::move(r));
  }

  for (auto& r : records) {
    r.seed = opts.seed;
    if (r.audit.n_train == 0) r.audit = audit_split(train, test);
    if (base_audit) r.audit.features_fitted_on_train = base_audit->features_fitted_on_train;
  }
  return records;
}

// ---------------------------------------------------------------------------
// Metric versus number of variables
// ---------------------------------------------------------------------------

struct CurvePoint {
  std::size_t m = 0;
  double value = 0.0;  // AUC (binary target) or RMSE
};

// Model refitted at each prefix of a ranking: a penalized GLM (lambda
// re-selected by CV at every m) or a tree preset with fixed hyperparameters.
using CurveModel = std::variant<double /* alpha */, Preset>;

inline std::vector<CurvePoint> auc_by_nvars(const Dataset& train, const Dataset& test,
                                            const std::vector<std::string>& ranking, const CurveModel& model,
                                            const PipelineOptions& opts,
                                            const std::optional<Hyperparams>& params = std::nullopt) {
  if (ranking.empty()) throw ConfigError("auc_by_nvars: empty ranking");
  opts.validate();
  audit_disjoint(train, test);
  const auto folds = make_folds(train, opts);
  std::vector<CurvePoint> curve(ranking.size());
  parallel_for(ranking.size(), opts.workers, [&](std::size_t i) {
    const std::vector<std::string> cols(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(i + 1));
    const auto tr = train.select(cols);
    const auto te = test.select(cols);
    std::vector<double> scores;
    if (const double* alpha = std::get_if<double>(&model)) {
      scores = glm::predict_glm(fit_penalized(tr, *alpha, folds, opts).fit, te);
    } else {
      const Preset p = std::get<Preset>(model);
      auto h = params.value_or(learners::default_params(p));
      // A forest tuned on more columns may sample more than the prefix holds.
      if (auto it = h.find("mtry"); it != h.end() && it->second > static_cast<double>(cols.size())) {
        it->second = static_cast<double>(cols.size());
      }
      const auto m = learners::fit_learner(p, h, tr, learners::task_of(tr), detail::learner_seed(opts.seed, p));
      scores = trees::predict(m, te);
    }
    curve[i].m = i + 1;
    curve[i].value = te.has_binary_target() ? metrics::auc(te.y(), scores) : metrics::rmse(te.y(), scores);
  });
  return curve;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::ordered_json& j, const LeakageAudit& a) {
  j = nlohmann::ordered_json{{"n_train", a.n_train},
                             {"n_test", a.n_test},
                             {"overlap", a.overlap},
                             {"features_fitted_on_train", a.features_fitted_on_train
                                                              ? nlohmann::ordered_json(*a.features_fitted_on_train)
                                                              : nlohmann::ordered_json(nullptr)},
                             {"passed", a.passed()}};
}

inline void to_json(nlohmann::ordered_json& j, const EvaluationRecord& r) {
  j = nlohmann::ordered_json{{"model_id", r.model_id},
                             {"learner", r.learner},
                             {"selection", selection_name(r.selection)},
                             {"n_features", r.features.size()},
                             {"features", r.features},
                             {"hyperparameters", r.hyperparameters},
                             {"metrics", r.metrics ? nlohmann::ordered_json(*r.metrics) : nlohmann::ordered_json(nullptr)},
                             {"rmse", r.rmse ? nlohmann::ordered_json(*r.rmse) : nlohmann::ordered_json(nullptr)},
                             {"seed", r.seed},
                             {"audit", r.audit},
                             {"trials", r.trials},
                             {"error", r.error ? nlohmann::ordered_json(*r.error) : nlohmann::ordered_json(nullptr)}};
}

inline void write_jsonl(std::ostream& out, const std::vector<EvaluationRecord>& records) {
  for (const auto& r : records) out << nlohmann::ordered_json(r).dump() << '\n';
}

inline std::string format_hyperparameters(const Hyperparams& h) {
  std::string s;
  for (const auto& [k, v] : h) {
    if (!s.empty()) s += ';';
    s += k + '=' + csv::format_double(v);
  }
  return s;
}

inline const std::vector<std::string>& record_csv_header() {
  static const std::vector<std::string> h{"model_id", "learner",    "selection", "n_features", "auc",
                                          "accuracy", "precision",  "recall",    "specificity", "f1",
                                          "balanced_accuracy", "rmse", "hyperparameters", "error"};
  return h;
}

inline void write_csv(std::ostream& out, const std::vector<EvaluationRecord>& records) {
  csv::write_row(out, record_csv_header());
  auto cell = [](const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string(); };
  for (const auto& r : records) {
    const metrics::MetricBlock m = r.metrics.value_or(metrics::MetricBlock{});
    csv::write_row(out, {r.model_id, r.learner, selection_name(r.selection), std::to_string(r.features.size()),
                         cell(m.auc), cell(m.accuracy), cell(m.precision), cell(m.recall), cell(m.specificity),
                         cell(m.f1), cell(m.balanced_accuracy), cell(r.rmse),
                         format_hyperparameters(r.hyperparameters), r.error.value_or("")});
  }
}

// ROC vertices of every successful binary-target record.
inline void write_roc_csv(std::ostream& out, const std::vector<EvaluationRecord>& records) {
  csv::write_row(out, {"model_id", "threshold", "fpr", "tpr"});
  for (const auto& r : records) {
    if (!r.ok() || !r.metrics || !r.metrics->auc) continue;
    for (const auto& p : metrics::roc_curve(r.test_labels, r.test_scores)) {
      csv::write_row(out, {r.model_id, std::isinf(p.threshold) ? "inf" : csv::format_double(p.threshold),
                           csv::format_double(p.fpr), csv::format_double(p.tpr)});
    }
  }
}

}  // namespace hybridml::pipeline

#endif  // HYBRIDML_PIPELINE_HPP_
