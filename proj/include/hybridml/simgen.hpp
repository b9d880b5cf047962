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

#ifndef HYBRIDML_SIMGEN_HPP_
#define HYBRIDML_SIMGEN_HPP_

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "hybridml/csv.hpp"
#include "hybridml/dataframe.hpp"
#include "hybridml/errors.hpp"
#include "hybridml/parallel.hpp"
#include "hybridml/pipeline.hpp"
#include "hybridml/random.hpp"
#include "json.hpp"

// Friedman #1 regression benchmark with extra noise predictors, and the
// n x p simulation grid over the 23-model matrix.
namespace hybridml::sim {

struct FriedmanSpec {
  std::size_t n = 500;
  std::size_t p = 10;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (p < 5) throw ConfigError("friedman1: p must be >= 5, got " + std::to_string(p));
    if (n < 1) throw ConfigError("friedman1: n must be >= 1");
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw ConfigError("friedman1: noise_sd must be >= 0");
  }
};

// Noise-free response; only the first five coordinates enter.
inline double friedman_mean(std::span<const double> x) {
  return 10.0 * std::sin(std::numbers::pi * x[0] * x[1]) + 20.0 * (x[2] - 0.5) * (x[2] - 0.5) + 10.0 * x[3] +
         5.0 * x[4];
}

inline std::vector<std::string> friedman_names(std::size_t p) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

// Rows are drawn in order: p uniforms, then the noise term.
inline Dataset friedman1(const FriedmanSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<std::vector<double>> cols(spec.p, std::vector<double>(spec.n));
  std::vector<double> y(spec.n), x(spec.p);
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = 0; j < spec.p; ++j) cols[j][i] = x[j] = rng.uniform();
    const double eps = rng.normal();
    y[i] = friedman_mean(x) + spec.noise_sd * eps;
  }
  return Dataset(friedman_names(spec.p), std::move(cols), Target{"y", std::move(y)});
}

struct SimRecord {
  std::string model_id;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t replicate = 0;
  std::optional<double> rmse;
  std::optional<std::string> error;
};

struct GridSpec {
  std::vector<std::size_t> ns{200, 500, 1000};
  std::vector<std::size_t> ps{5, 10, 50};
  std::size_t replicates = 30;
  double noise_sd = 1.0;
  std::size_t test_size = 1000;
  std::uint64_t seed = 0;

  void validate() const {
    if (ns.empty() || ps.empty()) throw ConfigError("simulation grid: ns and ps must be non-empty");
    if (replicates < 1) throw ConfigError("simulation grid: replicates must be >= 1");
    if (test_size < 1) throw ConfigError("simulation grid: test_size must be >= 1");
    for (auto p : ps) FriedmanSpec{10, p, noise_sd, 0}.validate();
  }
};

inline std::uint64_t cell_seed(std::uint64_t seed, std::size_t n, std::size_t p, std::size_t replicate) {
  return derive_seed(seed, n, p, replicate);
}

// Training and test tables of one grid cell.
inline std::pair<Dataset, Dataset> cell_data(const GridSpec& grid, std::size_t n, std::size_t p,
                                             std::size_t replicate) {
  const auto s = cell_seed(grid.seed, n, p, replicate);
  auto train = friedman1({n, p, grid.noise_sd, derive_seed(s, "train")});
  // Test ids start after the training ids, so the two never share a row id.
  auto test = friedman1({grid.test_size, p, grid.noise_sd, derive_seed(s, "test")});
  std::vector<std::size_t> ids(test.n_rows());
  std::iota(ids.begin(), ids.end(), n);
  test = Dataset(test.names(), [&] {
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < test.n_cols(); ++j) cols.emplace_back(test.column(j).begin(), test.column(j).end());
    return cols;
  }(), test.target(), std::move(ids));
  return {std::move(train), std::move(test)};
}

// Every (n, p, replicate) cell runs the model matrix on a fresh training
// set and an independent test set. Cells are spread over `workers`; each
// cell runs single-threaded, so the output does not depend on the schedule.
inline std::vector<SimRecord> run_simulation_grid(const GridSpec& grid, const pipeline::PipelineOptions& base,
                                                  const pipeline::MatrixSpec& matrix = {}, int workers = 1) {
  grid.validate();
  base.validate();
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> cells;
  for (auto n : grid.ns) {
    for (auto p : grid.ps) {
      for (std::size_t r = 0; r < grid.replicates; ++r) cells.emplace_back(n, p, r);
    }
  }
  std::vector<std::vector<SimRecord>> per_cell(cells.size());
  parallel_for(cells.size(), workers, [&](std::size_t c) {
    const auto [n, p, rep] = cells[c];
    auto opts = base;
    opts.seed = cell_seed(grid.seed, n, p, rep);
    opts.workers = 1;
    std::vector<pipeline::EvaluationRecord> records;
    try {
      const auto [train, test] = cell_data(grid, n, p, rep);
      records = pipeline::run_matrix(train, test, matrix, opts);
    } catch (const Error& e) {
      per_cell[c].push_back({"*", n, p, rep, std::nullopt, e.what()});
      return;
    }
    for (const auto& r : records) per_cell[c].push_back({r.model_id, n, p, rep, r.rmse, r.error});
  });
  std::vector<SimRecord> out;
  for (auto& v : per_cell) out.insert(out.end(), v.begin(), v.end());
  return out;
}

struct RmseSummary {
  std::string model_id;
  double mean = 0.0;
  double std = 0.0;  // n - 1 denominator; 0 for a single record
  std::size_t count = 0;
};

// Per-model mean and spread of the successful records, ascending by mean
// (model id breaks ties). Optional filters restrict to one grid cell.
inline std::vector<RmseSummary> summarize_rmse(const std::vector<SimRecord>& records,
                                               std::optional<std::size_t> n = std::nullopt,
                                               std::optional<std::size_t> p = std::nullopt) {
  std::map<std::string, std::vector<double>> groups;
  for (const auto& r : records) {
    if (!r.rmse || (n && r.n != *n) || (p && r.p != *p)) continue;
    groups[r.model_id].push_back(*r.rmse);
  }
  if (groups.empty()) throw DataError("summarize_rmse: no successful records");
  std::vector<RmseSummary> out;
  for (const auto& [id, v] : groups) {
    RmseSummary s{id, sample_mean(v), v.size() > 1 ? sample_std(v) : 0.0, v.size()};
    out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(), [](const RmseSummary& a, const RmseSummary& b) { return a.mean < b.mean; });
  return out;
}

inline void write_csv(std::ostream& out, const std::vector<SimRecord>& records) {
  csv::write_row(out, {"model_id", "n", "p", "replicate", "rmse", "error"});
  for (const auto& r : records) {
    csv::write_row(out, {r.model_id, std::to_string(r.n), std::to_string(r.p), std::to_string(r.replicate),
                         r.rmse ? csv::format_double(*r.rmse) : std::string(), r.error.value_or("")});
  }
}

inline void to_json(nlohmann::ordered_json& j, const RmseSummary& s) {
  j = nlohmann::ordered_json{{"model_id", s.model_id}, {"mean", s.mean}, {"std", s.std}, {"count", s.count}};
}

// Overall ranking plus one ranking per (n, p) cell.
inline nlohmann::ordered_json summary_json(const std::vector<SimRecord>& records, const GridSpec& grid) {
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (auto n : grid.ns) {
    for (auto p : grid.ps) {
      nlohmann::ordered_json cell{{"n", n}, {"p", p}};
      try {
        cell["ranking"] = summarize_rmse(records, n, p);
      } catch (const DataError&) {
        cell["ranking"] = nlohmann::ordered_json::array();
      }
      cells.push_back(std::move(cell));
    }
  }
  std::size_t failures = 0;
  for (const auto& r : records) failures += r.error ? 1 : 0;
  nlohmann::ordered_json overall = nlohmann::ordered_json::array();
  try {
    overall = summarize_rmse(records);
  } catch (const DataError&) {
  }
  return nlohmann::ordered_json{{"grid",
                                 {{"n", grid.ns},
                                  {"p", grid.ps},
                                  {"replicates", grid.replicates},
                                  {"noise_sd", grid.noise_sd},
                                  {"test_size", grid.test_size},
                                  {"seed", grid.seed}}},
                                {"n_records", records.size()},
                                {"n_failed", failures},
                                {"overall", std::move(overall)},
                                {"cells", std::move(cells)}};
}

}  // namespace hybridml::sim

#endif  // HYBRIDML_SIMGEN_HPP_
