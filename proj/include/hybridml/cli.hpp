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

#ifndef HYBRIDML_CLI_HPP_
#define HYBRIDML_CLI_HPP_

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hybridml/csv.hpp"
#include "hybridml/dataframe.hpp"
#include "hybridml/errors.hpp"
#include "hybridml/featgen.hpp"
#include "hybridml/learners.hpp"
#include "hybridml/pipeline.hpp"
#include "hybridml/simgen.hpp"
#include "json.hpp"

// Batch commands behind the hybridml binary: engineer, matrix, simulate and
// report. Every command is a function of its config and input files.
namespace hybridml::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitModel = 3;

// Overrides the output directory of the config file; a flag wins over both.
inline constexpr const char* kOutputDirEnv = "HYBRIDML_OUTPUT_DIR";

enum class Command { kEngineer, kMatrix, kSimulate, kReport };

inline const char* command_name(Command c) {
  switch (c) {
    case Command::kEngineer: return "engineer";
    case Command::kMatrix: return "matrix";
    case Command::kSimulate: return "simulate";
    case Command::kReport: return "report";
  }
  return "?";
}

// One metric-versus-variables curve: the columns are ranked by the
// `ranking` selection fitted on train, and `model` is either a selection
// method (a penalized GLM) or a learner preset.
struct CurveRequest {
  std::string ranking;
  std::string model;
};

struct RunConfig {
  std::optional<std::string> input;
  std::optional<std::string> schema;
  std::optional<std::string> target;
  bool engineer = false;
  std::optional<Json> recipe;
  std::optional<std::uint64_t> seed;
  std::size_t k = 5;
  double test_fraction = 0.2;
  std::size_t n_trials = 5;
  std::vector<pipeline::SelectionMethod> selection = pipeline::penalized_methods();
  std::optional<std::vector<pipeline::SelectionMethod>> pure;  // defaults to `selection`
  bool full = true;
  std::vector<learners::Preset> learners = learners::all_presets();
  std::map<std::string, tuning::SearchSpace> search_space;
  std::optional<std::size_t> ridge_top_m;
  std::size_t n_lambda = 100;
  double threshold = 0.5;
  std::vector<CurveRequest> curves;
  sim::GridSpec grid;
  std::string output_dir = "hybridml_out";
  int workers = 1;

  pipeline::MatrixSpec matrix_spec() const {
    pipeline::MatrixSpec s;
    s.pure = pure.value_or(selection);
    s.full = full;
    s.hybrid = selection;
    s.presets = learners;
    return s;
  }

  pipeline::PipelineOptions pipeline_options() const {
    pipeline::PipelineOptions o;
    o.k = k;
    o.n_trials = n_trials;
    o.seed = seed.value_or(0);
    o.ridge_top_m = ridge_top_m;
    o.cv.n_lambda = n_lambda;
    o.space_overrides = search_space;
    o.threshold = threshold;
    o.workers = workers;
    return o;
  }

  features::FeatureRecipe feature_recipe() const {
    features::FeatureRecipe r;
    if (recipe) r = recipe->get<features::FeatureRecipe>();
    // The k-means start follows the run seed unless the recipe pins it.
    if (!recipe || !recipe->contains("kmeans_seed")) r.kmeans_seed = seed.value_or(0);
    r.validate();
    return r;
  }

  void validate(Command c) const {
    if (!seed) throw ConfigError("a seed is required (config \"seed\" or --seed)");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (c == Command::kEngineer || c == Command::kMatrix) {
      if (!input) throw ConfigError(std::string(command_name(c)) + ": no input file");
      if (!fs::is_regular_file(*input)) throw ConfigError("input file not found: " + *input);
      if (schema && !fs::is_regular_file(*schema)) throw ConfigError("schema file not found: " + *schema);
      if (!target) throw ConfigError(std::string(command_name(c)) + ": no target column");
    }
    if (c == Command::kEngineer || (c == Command::kMatrix && engineer)) feature_recipe();
    if (c == Command::kMatrix) {
      if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test_fraction must lie in (0, 1)");
      for (const auto& curve : curves) {
        pipeline::parse_selection(curve.ranking);
        try {
          pipeline::parse_selection(curve.model);
        } catch (const ConfigError&) {
          learners::parse_preset(curve.model);
        }
      }
    }
    if (c == Command::kMatrix || c == Command::kSimulate) {
      pipeline_options().validate();
      if (matrix_spec().n_records() == 0) throw ConfigError("the configured matrix has no models");
    }
    if (c == Command::kSimulate) grid.validate();
  }
};

namespace detail {

inline std::string resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return (path.is_absolute() || base.empty() ? path : base / path).lexically_normal().string();
}

template <typename T, typename Fn>
std::vector<T> parse_list(const Json& j, const char* key, Fn parse) {
  if (!j.is_array()) throw ConfigError(std::string("config: \"") + key + "\" must be an array");
  std::vector<T> out;
  for (const auto& v : j) out.push_back(parse(v.get<std::string>()));
  return out;
}

inline std::vector<pipeline::SelectionMethod> parse_selections(const Json& j, const char* key) {
  return parse_list<pipeline::SelectionMethod>(j, key, [](const std::string& s) { return pipeline::parse_selection(s); });
}

inline std::vector<learners::Preset> parse_presets(const Json& j, const char* key) {
  return parse_list<learners::Preset>(j, key, [](const std::string& s) { return learners::parse_preset(s); });
}

inline Json names_of(const std::vector<pipeline::SelectionMethod>& v) {
  Json out = Json::array();
  for (auto m : v) out.push_back(pipeline::selection_name(m));
  return out;
}

inline Json names_of(const std::vector<learners::Preset>& v) {
  Json out = Json::array();
  for (auto p : v) out.push_back(learners::preset_name(p));
  return out;
}

}  // namespace detail

// Config file schema (every key optional except as the command requires):
//   input, schema, target       paths resolve against the config file's dir
//   engineer                    matrix: engineer features on the train split
//   recipe                      feature recipe overrides
//   seed, k, test_fraction, n_trials, ridge_top_m, n_lambda, threshold
//   selection, pure             subsets of ["ridge", "lasso", "elasticnet"]
//   full                        include the full-variable learners
//   learners                    subset of the five presets
//   search_space                {preset: {param: distribution}}
//   curves                      [{"ranking": "lasso", "model": "cat-like"}]
//   simulation                  {ns, ps, replicates, noise_sd, test_size}
//   output_dir, workers
inline RunConfig parse_config(const Json& j, const fs::path& base_dir = {}) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{
      "input", "schema", "target",   "engineer", "recipe",     "seed",       "k",        "test_fraction",
      "n_trials", "selection", "pure", "full",  "learners",   "search_space", "ridge_top_m", "n_lambda",
      "threshold", "curves", "simulation", "output_dir", "workers"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("config: unknown key \"" + key + "\"");
  }
  RunConfig c;
  try {
    if (j.contains("input")) c.input = detail::resolve(base_dir, j.at("input").get<std::string>());
    if (j.contains("schema")) c.schema = detail::resolve(base_dir, j.at("schema").get<std::string>());
    if (j.contains("target")) c.target = j.at("target").get<std::string>();
    c.engineer = j.value("engineer", c.engineer);
    if (j.contains("recipe")) c.recipe = j.at("recipe");
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    c.k = j.value("k", c.k);
    c.test_fraction = j.value("test_fraction", c.test_fraction);
    c.n_trials = j.value("n_trials", c.n_trials);
    if (j.contains("selection")) c.selection = detail::parse_selections(j.at("selection"), "selection");
    if (j.contains("pure")) c.pure = detail::parse_selections(j.at("pure"), "pure");
    c.full = j.value("full", c.full);
    if (j.contains("learners")) c.learners = detail::parse_presets(j.at("learners"), "learners");
    if (j.contains("search_space")) {
      for (const auto& [preset, space] : j.at("search_space").items()) {
        c.search_space[preset] = space.get<tuning::SearchSpace>();
      }
    }
    if (j.contains("ridge_top_m")) c.ridge_top_m = j.at("ridge_top_m").get<std::size_t>();
    c.n_lambda = j.value("n_lambda", c.n_lambda);
    c.threshold = j.value("threshold", c.threshold);
    if (j.contains("curves")) {
      for (const auto& curve : j.at("curves")) {
        c.curves.push_back({curve.at("ranking").get<std::string>(), curve.at("model").get<std::string>()});
      }
    }
    if (j.contains("simulation")) {
      const auto& s = j.at("simulation");
      for (const auto& [key, value] : s.items()) {
        if (key != "ns" && key != "ps" && key != "replicates" && key != "noise_sd" && key != "test_size") {
          throw ConfigError("config: unknown simulation key \"" + key + "\"");
        }
      }
      c.grid.ns = s.value("ns", c.grid.ns);
      c.grid.ps = s.value("ps", c.grid.ps);
      c.grid.replicates = s.value("replicates", c.grid.replicates);
      c.grid.noise_sd = s.value("noise_sd", c.grid.noise_sd);
      c.grid.test_size = s.value("test_size", c.grid.test_size);
    }
    if (j.contains("output_dir")) c.output_dir = detail::resolve(base_dir, j.at("output_dir").get<std::string>());
    c.workers = j.value("workers", c.workers);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  if (!fs::is_regular_file(path)) throw ConfigError("config file not found: " + path);
  Json j;
  try {
    j = Json::parse(csv::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return parse_config(j, fs::path(path).parent_path());
}

// Settings that determine the results. The output directory and worker
// count are left out: neither changes what is written.
inline Json to_json(const RunConfig& c) {
  Json j;
  auto opt = [](const auto& v) { return v ? Json(*v) : Json(nullptr); };
  j["input"] = c.input ? Json(fs::path(*c.input).filename().string()) : Json(nullptr);
  j["schema"] = c.schema ? Json(fs::path(*c.schema).filename().string()) : Json(nullptr);
  j["target"] = opt(c.target);
  j["engineer"] = c.engineer;
  j["seed"] = opt(c.seed);
  j["k"] = c.k;
  j["test_fraction"] = c.test_fraction;
  j["n_trials"] = c.n_trials;
  j["selection"] = detail::names_of(c.selection);
  j["pure"] = detail::names_of(c.pure.value_or(c.selection));
  j["full"] = c.full;
  j["learners"] = detail::names_of(c.learners);
  j["search_space"] = Json::object();
  for (const auto& [preset, space] : c.search_space) j["search_space"][preset] = space;
  j["ridge_top_m"] = c.ridge_top_m.value_or(glm::kDefaultRidgeTopM);
  j["n_lambda"] = c.n_lambda;
  j["threshold"] = c.threshold;
  j["curves"] = Json::array();
  for (const auto& curve : c.curves) j["curves"].push_back({{"ranking", curve.ranking}, {"model", curve.model}});
  j["simulation"] = {{"ns", c.grid.ns},
                     {"ps", c.grid.ps},
                     {"replicates", c.grid.replicates},
                     {"noise_sd", c.grid.noise_sd},
                     {"test_size", c.grid.test_size}};
  return j;
}

// Command-line values; each set field replaces the config value.
struct Overrides {
  std::optional<std::string> input, schema, target, output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k, n_trials, replicates;
  std::optional<double> test_fraction;
  std::optional<std::vector<std::string>> selection, learners;
  std::optional<std::vector<std::size_t>> ns, ps;
  std::optional<bool> engineer;
  std::optional<int> workers;
};

inline void apply(const Overrides& o, RunConfig& c) {
  if (o.input) c.input = *o.input;
  if (o.schema) c.schema = *o.schema;
  if (o.target) c.target = *o.target;
  if (o.seed) c.seed = *o.seed;
  if (o.k) c.k = *o.k;
  if (o.n_trials) c.n_trials = *o.n_trials;
  if (o.test_fraction) c.test_fraction = *o.test_fraction;
  if (o.engineer) c.engineer = *o.engineer;
  if (o.workers) c.workers = *o.workers;
  if (o.selection) c.selection = detail::parse_selections(Json(*o.selection), "selection");
  if (o.learners) c.learners = detail::parse_presets(Json(*o.learners), "learners");
  if (o.replicates) c.grid.replicates = *o.replicates;
  if (o.ns) c.grid.ns = *o.ns;
  if (o.ps) c.grid.ps = *o.ps;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) c.output_dir = env;
  if (o.output_dir) c.output_dir = *o.output_dir;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace detail {

inline fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw InputError("cannot create output directory " + dir);
  return fs::path(dir);
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

inline void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

inline Dataset load_input(const RunConfig& c, IngestReport& report) {
  LoadOptions options;
  options.target = c.target;
  options.bad_rows = BadRowPolicy::kReject;
  if (c.schema) return load_csv(*c.input, Schema::load(*c.schema), options, &report);
  return load_numeric_csv(*c.input, c.target, options, &report);
}

inline std::string fmt(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace detail

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::string> files;  // written, relative to the output dir
};

// Raw CSV -> engineered table (34 features and the target) and a report of
// the rows read, the rows rejected and the recipe used.
inline CommandResult cmd_engineer(const RunConfig& c, std::ostream& log) {
  c.validate(Command::kEngineer);
  IngestReport ingest;
  const Dataset raw = detail::load_input(c, ingest);
  const auto recipe = c.feature_recipe();
  const auto engineer = features::FeatureEngineer::fit(raw, recipe);
  const Dataset out = engineer.transform(raw);

  const auto dir = detail::prepare_dir(c.output_dir);
  write_csv((dir / "engineered.csv").string(), out);
  Json report;
  report["ingest"] = ingest;
  report["n_columns"] = out.n_cols() + (out.has_target() ? 1 : 0);
  report["columns"] = out.names();
  report["target"] = out.has_target() ? Json(out.target().name) : Json(nullptr);
  report["recipe"] = recipe;
  report["state"] = engineer.state_json();
  detail::write_json(dir / "engineer_report.json", report);
  log << "engineer: " << ingest.rows_accepted << " rows, " << ingest.rejected.size() << " rejected, "
      << report["n_columns"].get<std::size_t>() << " columns -> " << (dir / "engineered.csv").string() << "\n";
  return {kExitOk, {"engineered.csv", "engineer_report.json"}};
}

namespace detail {

inline std::vector<std::string> curve_ranking(const Dataset& train, pipeline::SelectionMethod method,
                                              const pipeline::PipelineOptions& opts) {
  const auto run = pipeline::fit_penalized(train, pipeline::selection_alpha(method), pipeline::make_folds(train, opts),
                                           opts);
  return pipeline::selection_of(run, opts).names();
}

inline void write_curves(std::ostream& out, const RunConfig& c, const Dataset& train, const Dataset& test,
                         const std::vector<pipeline::EvaluationRecord>& records,
                         const pipeline::PipelineOptions& opts) {
  csv::write_row(out, {"model", "ranking", "m", "feature", "metric", "value"});
  const char* metric = train.has_binary_target() ? "auc" : "rmse";
  for (const auto& req : c.curves) {
    const auto method = pipeline::parse_selection(req.ranking);
    const auto ranking = curve_ranking(train, method, opts);
    std::vector<pipeline::CurvePoint> curve;
    try {
      curve = pipeline::auc_by_nvars(train, test, ranking, pipeline::selection_alpha(pipeline::parse_selection(req.model)),
                                     opts);
    } catch (const ConfigError&) {
      // A learner preset: reuse the tuned configuration of its hybrid record.
      const auto preset = learners::parse_preset(req.model);
      std::optional<tuning::Hyperparams> params;
      const std::string id = req.model + ":" + req.ranking;
      for (const auto& r : records) {
        if (r.model_id == id && r.ok()) params = r.hyperparameters;
      }
      curve = pipeline::auc_by_nvars(train, test, ranking, preset, opts, params);
    }
    for (const auto& p : curve) {
      csv::write_row(out, {req.model, req.ranking, std::to_string(p.m), ranking[p.m - 1], metric,
                           csv::format_double(p.value)});
    }
  }
}

}  // namespace detail

// Split, optional train-only feature engineering, the model matrix and the
// optional metric-versus-variables curves.
inline CommandResult cmd_matrix(const RunConfig& c, std::ostream& log) {
  c.validate(Command::kMatrix);
  IngestReport ingest;
  const Dataset raw = detail::load_input(c, ingest);
  if (raw.n_rows() == 0) throw DataError("matrix: no usable rows in " + *c.input);
  std::optional<features::FeatureRecipe> recipe;
  if (c.engineer) recipe = c.feature_recipe();
  const auto split = pipeline::prepare_split(raw, c.test_fraction, *c.seed, recipe);
  const auto opts = c.pipeline_options();
  const auto records = pipeline::run_matrix(split.train, split.test, c.matrix_spec(), opts, &split.audit);

  const auto dir = detail::prepare_dir(c.output_dir);
  CommandResult result;
  auto emit = [&](const std::string& name, const std::string& text) {
    detail::write_text(dir / name, text);
    result.files.push_back(name);
  };
  std::ostringstream jsonl, table, roc;
  pipeline::write_jsonl(jsonl, records);
  pipeline::write_csv(table, records);
  pipeline::write_roc_csv(roc, records);
  emit("records.jsonl", jsonl.str());
  emit("records.csv", table.str());
  if (split.train.has_binary_target()) emit("roc.csv", roc.str());
  if (!c.curves.empty()) {
    std::ostringstream curves;
    detail::write_curves(curves, c, split.train, split.test, records, opts);
    emit("auc_by_nvars.csv", curves.str());
  }
  Json run;
  run["config"] = to_json(c);
  run["ingest"] = ingest;
  run["split"] = split.audit;
  run["features"] = split.train.names();
  if (split.engineering_state) run["engineering"] = *split.engineering_state;
  emit("run.json", run.dump(2) + "\n");

  std::size_t failed = 0;
  for (const auto& r : records) {
    if (!r.ok()) {
      ++failed;
      log << "matrix: " << r.model_id << " failed (" << r.error_kind.value_or("model") << "): " << *r.error << "\n";
    }
  }
  log << "matrix: " << records.size() << " records, " << failed << " failed -> " << dir.string() << "\n";
  // Data or config problems inside a record still count as model failures
  // of the run: the other records were produced.
  result.exit_code = failed ? kExitModel : kExitOk;
  return result;
}

inline CommandResult cmd_simulate(const RunConfig& c, std::ostream& log) {
  c.validate(Command::kSimulate);
  auto grid = c.grid;
  grid.seed = *c.seed;
  auto opts = c.pipeline_options();
  opts.workers = 1;
  const auto records = sim::run_simulation_grid(grid, opts, c.matrix_spec(), c.workers);

  const auto dir = detail::prepare_dir(c.output_dir);
  std::ostringstream table;
  sim::write_csv(table, records);
  detail::write_text(dir / "sim_records.csv", table.str());
  auto summary = sim::summary_json(records, grid);
  summary["config"] = to_json(c);
  detail::write_json(dir / "sim_summary.json", summary);

  std::size_t failed = 0;
  for (const auto& r : records) failed += r.error ? 1 : 0;
  log << "simulate: " << records.size() << " records, " << failed << " failed -> " << dir.string() << "\n";
  return {failed ? kExitModel : kExitOk, {"sim_records.csv", "sim_summary.json"}};
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

namespace detail {

inline std::string cell(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return "-";
  return fmt(j.at(key).get<double>());
}

inline std::string matrix_table(const fs::path& jsonl) {
  std::ifstream in(jsonl, std::ios::binary);
  std::ostringstream out;
  out << pad("model_id", 22) << pad("n_feat", 8) << pad("auc", 9) << pad("accuracy", 9) << pad("f1", 9)
      << pad("bal_acc", 9) << pad("rmse", 9) << "status\n";
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json r;
    try {
      r = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(n + 1, jsonl.string() + ": " + e.what());
    }
    ++n;
    const auto& m = r["metrics"];
    out << pad(r.value("model_id", "?"), 22) << pad(std::to_string(r.value("n_features", std::size_t{0})), 8)
        << pad(cell(m, "auc"), 9) << pad(cell(m, "accuracy"), 9) << pad(cell(m, "f1"), 9)
        << pad(cell(m, "balanced_accuracy"), 9) << pad(cell(r, "rmse"), 9)
        << (r["error"].is_null() ? std::string("ok") : "failed: " + r["error"].get<std::string>()) << "\n";
  }
  if (n == 0) throw DataError(jsonl.string() + ": no records");
  return out.str();
}

inline std::vector<sim::SimRecord> read_sim_records(const fs::path& path) {
  const auto rows = csv::parse(csv::read_file(path.string()));
  const std::vector<std::string> header{"model_id", "n", "p", "replicate", "rmse", "error"};
  if (rows.empty() || rows.front().fields != header) throw SchemaError(path.string() + ": unexpected header");
  std::vector<sim::SimRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i].fields;
    if (f.size() != header.size()) throw ParseError(rows[i].line, "expected 6 fields");
    sim::SimRecord r;
    r.model_id = f[0];
    const auto n = csv::parse_double(f[1]), p = csv::parse_double(f[2]), rep = csv::parse_double(f[3]);
    if (!n || !p || !rep) throw ParseError(rows[i].line, "bad cell coordinates");
    r.n = static_cast<std::size_t>(*n);
    r.p = static_cast<std::size_t>(*p);
    r.replicate = static_cast<std::size_t>(*rep);
    if (!f[4].empty()) {
      r.rmse = csv::parse_double(f[4]);
      if (!r.rmse) throw ParseError(rows[i].line, "bad rmse '" + f[4] + "'");
    }
    if (!f[5].empty()) r.error = f[5];
    out.push_back(std::move(r));
  }
  return out;
}

// Per (n, p) cell and per model: mean and standard deviation of test RMSE.
inline std::string sim_tables(const std::vector<sim::SimRecord>& records, std::ostream& summary_csv) {
  std::set<std::pair<std::size_t, std::size_t>> cells;
  for (const auto& r : records) cells.emplace(r.n, r.p);
  csv::write_row(summary_csv, {"n", "p", "model_id", "mean_rmse", "std_rmse", "count"});
  std::ostringstream out;
  for (const auto& [n, p] : cells) {
    std::vector<sim::RmseSummary> rows;
    try {
      rows = sim::summarize_rmse(records, n, p);
    } catch (const DataError&) {
      out << "n = " << n << ", p = " << p << ": no successful records\n\n";
      continue;
    }
    out << "n = " << n << ", p = " << p << "\n"
        << pad("model_id", 22) << pad("mean", 9) << pad("std", 9) << "count\n";
    for (const auto& s : rows) {
      out << pad(s.model_id, 22) << pad(fmt(s.mean), 9) << pad(fmt(s.std), 9) << s.count << "\n";
      csv::write_row(summary_csv, {std::to_string(n), std::to_string(p), s.model_id, csv::format_double(s.mean),
                                   csv::format_double(s.std), std::to_string(s.count)});
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace detail

// Summarizes a matrix or simulation output directory into report.txt (also
// printed) without refitting anything. Plot-ready companions that are
// absent are listed.
inline CommandResult cmd_report(const std::string& dir_name, std::ostream& out, std::ostream& log) {
  const fs::path dir(dir_name);
  const bool matrix = fs::is_regular_file(dir / "records.jsonl");
  const bool simulation = fs::is_regular_file(dir / "sim_records.csv");
  if (!matrix && !simulation) {
    std::string msg = "report: nothing to summarize in " + dir.string() + "; missing files:";
    for (const char* f : {"records.jsonl (matrix)", "sim_records.csv (simulate)"}) msg += std::string("\n  ") + f;
    throw InputError(msg);
  }
  std::ostringstream text;
  CommandResult result;
  std::vector<std::string> missing;
  if (matrix) {
    text << "Model matrix\n\n" << detail::matrix_table(dir / "records.jsonl") << "\n";
    for (const char* f : {"records.csv", "roc.csv", "auc_by_nvars.csv", "run.json"}) {
      if (!fs::is_regular_file(dir / f)) missing.push_back(f);
    }
  }
  if (simulation) {
    std::ostringstream summary;
    text << "Simulation test RMSE\n\n" << detail::sim_tables(detail::read_sim_records(dir / "sim_records.csv"), summary);
    detail::write_text(dir / "rmse_summary.csv", summary.str());
    result.files.push_back("rmse_summary.csv");
    if (!fs::is_regular_file(dir / "sim_summary.json")) missing.push_back("sim_summary.json");
  }
  if (!missing.empty()) {
    text << "Absent files:\n";
    for (const auto& f : missing) text << "  " << f << "\n";
  }
  detail::write_text(dir / "report.txt", text.str());
  result.files.push_back("report.txt");
  out << text.str();
  log << "report: " << (dir / "report.txt").string() << "\n";
  return result;
}

// Maps library errors onto the exit-code contract.
inline int exit_code_of(const std::exception_ptr& e, std::ostream& log) {
  try {
    std::rethrow_exception(e);
  } catch (const ConfigError& x) {
    log << "config error: " << x.what() << "\n";
    return kExitConfig;
  } catch (const DataError& x) {
    log << "data error: " << x.what() << "\n";
    return kExitData;
  } catch (const Error& x) {
    log << "model error: " << x.what() << "\n";
    return kExitModel;
  } catch (const std::exception& x) {
    log << "error: " << x.what() << "\n";
    return kExitModel;
  }
}

}  // namespace hybridml::cli

#endif  // HYBRIDML_CLI_HPP_
