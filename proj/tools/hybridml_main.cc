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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hybridml/cli.hpp"

namespace {

using hybridml::cli::Overrides;

void add_run_flags(CLI::App* cmd, std::string& config, Overrides& o) {
  cmd->add_option("-c,--config", config, "JSON run configuration");
  cmd->add_option("--input", o.input, "input CSV");
  cmd->add_option("--schema", o.schema, "column schema JSON");
  cmd->add_option("--target", o.target, "target column");
  cmd->add_option("--seed", o.seed, "random seed (required here or in the config)");
  cmd->add_option("-o,--output-dir", o.output_dir, "output directory");
  cmd->add_option("--workers", o.workers, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
}

void add_model_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--k", o.k, "cross-validation folds");
  cmd->add_option("--n-trials", o.n_trials, "random-search trials per model (0: preset defaults)");
  cmd->add_option("--selection", o.selection, "selection methods: ridge lasso elasticnet")->delimiter(',');
  cmd->add_option("--learners", o.learners, "learner presets")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = hybridml::cli;
  CLI::App app{"Penalized selection, tree ensembles and their hybrids on tabular data"};
  app.require_subcommand(1);

  std::string config;
  Overrides o;
  std::string report_dir;

  auto* engineer = app.add_subcommand("engineer", "raw CSV -> engineered feature table");
  add_run_flags(engineer, config, o);

  auto* matrix = app.add_subcommand("matrix", "pure, full-variable and hybrid models on one split");
  add_run_flags(matrix, config, o);
  add_model_flags(matrix, o);
  matrix->add_option("--test-fraction", o.test_fraction, "held-out share of rows");
  matrix->add_flag("--engineer,!--no-engineer", o.engineer, "engineer features on the training split");

  auto* simulate = app.add_subcommand("simulate", "Friedman simulation grid");
  add_run_flags(simulate, config, o);
  add_model_flags(simulate, o);
  simulate->add_option("--replicates", o.replicates, "replicates per (n, p) cell");
  simulate->add_option("--ns", o.ns, "training sizes")->delimiter(',');
  simulate->add_option("--ps", o.ps, "predictor counts")->delimiter(',');

  auto* report = app.add_subcommand("report", "summarize a matrix or simulate output directory");
  report->add_option("dir", report_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitConfig;
  }

  try {
    if (report->parsed()) return cli::cmd_report(report_dir, std::cout, std::cerr).exit_code;
    cli::RunConfig run = config.empty() ? cli::RunConfig{} : cli::load_config(config);
    cli::apply(o, run);
    if (engineer->parsed()) return cli::cmd_engineer(run, std::cerr).exit_code;
    if (matrix->parsed()) return cli::cmd_matrix(run, std::cerr).exit_code;
    return cli::cmd_simulate(run, std::cerr).exit_code;
  } catch (...) {
    return cli::exit_code_of(std::current_exception(), std::cerr);
  }
}
