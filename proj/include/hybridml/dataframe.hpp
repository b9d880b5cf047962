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

#ifndef HYBRIDML_DATAFRAME_HPP_
#define HYBRIDML_DATAFRAME_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hybridml/csv.hpp"
#include "hybridml/errors.hpp"
#include "hybridml/random.hpp"
#include "json.hpp"

namespace hybridml {

struct Target {
  std::string name;
  std::vector<double> values;
};

// Immutable column-major table. Every transform returns a new Dataset.
// Rows carry stable ids (the row's position in the originally loaded table)
// so splits can be audited for train/test overlap.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::vector<std::string> names, std::vector<std::vector<double>> columns,
          std::optional<Target> target = std::nullopt,
          std::vector<std::size_t> row_ids = {})
      : names_(std::move(names)),
        columns_(std::move(columns)),
        target_(std::move(target)),
        row_ids_(std::move(row_ids)) {
    if (names_.size() != columns_.size()) {
      throw SchemaError("dataset: " + std::to_string(names_.size()) + " names for " +
                        std::to_string(columns_.size()) + " columns");
    }
    n_rows_ = !columns_.empty() ? columns_.front().size()
              : target_         ? target_->values.size()
                                : row_ids_.size();
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      if (columns_[j].size() != n_rows_) {
        throw SchemaError("dataset: column '" + names_[j] + "' has " +
                          std::to_string(columns_[j].size()) + " rows, expected " +
                          std::to_string(n_rows_));
      }
    }
    std::set<std::string_view> seen;
    for (const auto& name : names_) {
      if (!seen.insert(name).second) throw SchemaError("dataset: duplicate column '" + name + "'");
    }
    if (target_) {
      if (target_->values.size() != n_rows_) throw SchemaError("dataset: target length mismatch");
      if (seen.count(target_->name)) {
        throw SchemaError("dataset: target '" + target_->name + "' is also a feature");
      }
    }
    if (row_ids_.empty()) {
      row_ids_.resize(n_rows_);
      std::iota(row_ids_.begin(), row_ids_.end(), std::size_t{0});
    } else if (row_ids_.size() != n_rows_) {
      throw SchemaError("dataset: row id count mismatch");
    }
  }

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return columns_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::vector<double>>& columns() const { return columns_; }

  std::span<const double> column(std::size_t j) const { return columns_.at(j); }
  std::span<const double> column(std::string_view name) const {
    return columns_[index_of(name)];
  }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t j = 0; j < names_.size(); ++j) {
      if (names_[j] == name) return j;
    }
    return std::nullopt;
  }

  std::size_t index_of(std::string_view name) const {
    if (auto j = find(name)) return *j;
    throw SchemaError("missing column '" + std::string(name) + "'");
  }

  bool has_target() const { return target_.has_value(); }
  const Target& target() const {
    if (!target_) throw SchemaError("dataset has no target");
    return *target_;
  }
  std::span<const double> y() const { return target().values; }

  std::span<const std::size_t> row_ids() const { return row_ids_; }

  // True when the target exists and every value is 0 or 1.
  bool has_binary_target() const {
    if (!target_) return false;
    return std::all_of(target_->values.begin(), target_->values.end(),
                       [](double v) { return v == 0.0 || v == 1.0; });
  }

  // Subset by row positions (not ids); order follows `positions`.
  Dataset rows(std::span<const std::size_t> positions) const {
    std::vector<std::vector<double>> cols(columns_.size());
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      cols[j].reserve(positions.size());
      for (std::size_t i : positions) cols[j].push_back(columns_[j].at(i));
    }
    std::optional<Target> target;
    if (target_) {
      target = Target{target_->name, {}};
      target->values.reserve(positions.size());
      for (std::size_t i : positions) target->values.push_back(target_->values.at(i));
    }
    std::vector<std::size_t> ids;
    ids.reserve(positions.size());
    for (std::size_t i : positions) ids.push_back(row_ids_.at(i));
    return Dataset(names_, std::move(cols), std::move(target), std::move(ids));
  }

  Dataset rows(std::initializer_list<std::size_t> positions) const {
    return rows(std::span<const std::size_t>(positions.begin(), positions.size()));
  }

  // Projection onto the named feature columns (target kept).
  Dataset select(std::span<const std::string> names) const {
    std::vector<std::vector<double>> cols;
    cols.reserve(names.size());
    for (const auto& name : names) cols.push_back(columns_[index_of(name)]);
    return Dataset({names.begin(), names.end()}, std::move(cols), target_, row_ids_);
  }

  Dataset select(std::initializer_list<std::string> names) const {
    return select(std::span<const std::string>(names.begin(), names.size()));
  }

  Dataset with_column(std::string name, std::vector<double> values) const {
    auto names = names_;
    auto cols = columns_;
    if (auto j = find(name)) {
      cols[*j] = std::move(values);
    } else {
      names.push_back(std::move(name));
      cols.push_back(std::move(values));
    }
    return Dataset(std::move(names), std::move(cols), target_, row_ids_);
  }

  Dataset with_target(std::optional<Target> target) const {
    return Dataset(names_, columns_, std::move(target), row_ids_);
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  std::optional<Target> target_;
  std::vector<std::size_t> row_ids_;
  std::size_t n_rows_ = 0;
};

// Throws LeakageError when the two datasets share a row id.
inline void audit_disjoint(const Dataset& train, const Dataset& test) {
  std::vector<std::size_t> a(train.row_ids().begin(), train.row_ids().end());
  std::vector<std::size_t> b(test.row_ids().begin(), test.row_ids().end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<std::size_t> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  if (!common.empty()) {
    throw LeakageError(std::to_string(common.size()) +
                       " row ids shared between train and test (first: " +
                       std::to_string(common.front()) + ")");
  }
}

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

struct ColumnScale {
  std::string name;
  double mean = 0.0;
  double std = 1.0;
  bool constant = false;
};

struct StandardizationParams {
  std::vector<ColumnScale> columns;
};

inline double sample_mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
inline double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mean = sample_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline Dataset apply_standardization(const StandardizationParams& params, const Dataset& d) {
  auto names = d.names();
  auto cols = d.columns();
  for (const auto& scale : params.columns) {
    auto& col = cols[d.index_of(scale.name)];
    for (double& x : col) x = (x - scale.mean) / scale.std;
  }
  return Dataset(std::move(names), std::move(cols),
                 d.has_target() ? std::optional<Target>(d.target()) : std::nullopt,
                 {d.row_ids().begin(), d.row_ids().end()});
}

// z-scores the named columns. Constant columns are centered, recorded with
// std = 1 and flagged.
inline std::pair<Dataset, StandardizationParams> standardize(
    const Dataset& d, std::span<const std::string> cols) {
  StandardizationParams params;
  for (const auto& name : cols) {
    const auto values = d.column(name);
    ColumnScale scale{name, sample_mean(values), sample_std(values), false};
    if (!(scale.std > 0.0)) {
      scale.std = 1.0;
      scale.constant = true;
    }
    params.columns.push_back(std::move(scale));
  }
  return {apply_standardization(params, d), std::move(params)};
}

inline std::pair<Dataset, StandardizationParams> standardize(const Dataset& d) {
  return standardize(d, d.names());
}

// ---------------------------------------------------------------------------
// Stratified splitting
// ---------------------------------------------------------------------------

// Stratum label per row: the class for binary targets, a single stratum for
// continuous targets (plain shuffled partitioning).
inline std::vector<int> strata_of(const Dataset& d) {
  std::vector<int> strata(d.n_rows(), 0);
  if (d.has_binary_target()) {
    const auto y = d.y();
    for (std::size_t i = 0; i < y.size(); ++i) strata[i] = static_cast<int>(y[i]);
  }
  return strata;
}

namespace detail {

inline std::map<int, std::vector<std::size_t>> group_rows(std::span<const int> strata) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < strata.size(); ++i) groups[strata[i]].push_back(i);
  return groups;
}

}  // namespace detail

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

// Test rows: floor(n * test_fraction) in total. Each stratum receives the
// floor of its proportional share; the leftover slots go to strata picked by
// a seeded shuffle, so each stratum is within one row of its share.
inline TrainTestSplit split_stratified(const Dataset& d, double test_fraction,
                                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in (0, 1)");
  }
  const std::size_t n = d.n_rows();
  const auto strata = strata_of(d);
  auto groups = detail::group_rows(strata);
  if (d.has_binary_target()) {
    for (const auto& [label, rows] : groups) {
      if (rows.size() < 2) {
        throw StratificationError("class " + std::to_string(label) + " has fewer than 2 rows");
      }
    }
  }
  const auto test_total =
      static_cast<std::size_t>(std::floor(static_cast<double>(n) * test_fraction));

  Rng rng(seed);
  std::vector<int> labels;
  std::map<int, std::size_t> quota;
  std::size_t assigned = 0;
  for (auto& [label, rows] : groups) {
    rng.shuffle(std::span<std::size_t>(rows));
    const auto share = static_cast<std::size_t>(
        std::floor(static_cast<double>(rows.size()) * test_fraction));
    quota[label] = share;
    assigned += share;
    labels.push_back(label);
  }
  rng.shuffle(std::span<int>(labels));
  for (std::size_t i = 0; assigned < test_total && i < labels.size(); ++i) {
    ++quota[labels[i]];
    ++assigned;
  }

  std::vector<std::size_t> train_rows, test_rows;
  for (const auto& [label, rows] : groups) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      (i < quota[label] ? test_rows : train_rows).push_back(rows[i]);
    }
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {d.rows(train_rows), d.rows(test_rows)};
}

struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> fold_of_row;

  std::vector<std::size_t> rows_in(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of_row.size(); ++i) {
      if (fold_of_row[i] == fold) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> rows_outside(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of_row.size(); ++i) {
      if (fold_of_row[i] != fold) out.push_back(i);
    }
    return out;
  }
};

// Deals each stratum's shuffled rows round-robin over the folds, continuing
// the rotation from one stratum to the next so fold sizes also stay within
// one row of each other.
inline FoldAssignment kfold_stratified(std::span<const int> strata, std::size_t k,
                                       std::uint64_t seed) {
  if (k < 2) throw ConfigError("k must be at least 2");
  auto groups = detail::group_rows(strata);
  for (const auto& [label, rows] : groups) {
    if (rows.size() < k) {
      throw StratificationError("stratum " + std::to_string(label) + " has " +
                                std::to_string(rows.size()) + " rows, fewer than k = " +
                                std::to_string(k));
    }
  }
  Rng rng(seed);
  FoldAssignment folds{k, std::vector<std::size_t>(strata.size(), 0)};
  std::size_t next = 0;
  for (auto& [label, rows] : groups) {
    rng.shuffle(std::span<std::size_t>(rows));
    for (std::size_t row : rows) {
      folds.fold_of_row[row] = next;
      next = (next + 1) % k;
    }
  }
  return folds;
}

inline FoldAssignment kfold_stratified(const Dataset& d, std::size_t k, std::uint64_t seed) {
  const auto strata = strata_of(d);
  return kfold_stratified(std::span<const int>(strata), k, seed);
}

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

enum class ColumnKind { kNumeric, kBinary, kCategorical };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  std::string yes_token;             // binary: encodes to 1
  std::string no_token;              // binary: encodes to 0
  std::vector<std::string> levels;   // categorical
  std::string rename;                // optional output name
  const std::string& output_name() const { return rename.empty() ? name : rename; }
};

// JSON form:
//   { "Age": "numeric",
//     "FrequentFlyer": {"binary": ["Yes", "No"]},
//     "Employment Type": {"categorical": ["a", "b"], "as": "Employment.Type"} }
// Key order in the file is preserved for the output column order.
struct Schema {
  std::vector<ColumnSpec> columns;

  static Schema from_json(const nlohmann::ordered_json& j) {
    if (!j.is_object()) throw ConfigError("schema must be a JSON object");
    Schema schema;
    for (const auto& [name, spec] : j.items()) {
      ColumnSpec col;
      col.name = name;
      if (spec.is_string()) {
        if (spec.get<std::string>() != "numeric") {
          throw ConfigError("schema: unknown type '" + spec.get<std::string>() + "' for " + name);
        }
      } else if (spec.is_object()) {
        if (spec.contains("binary")) {
          const auto& tokens = spec.at("binary");
          if (!tokens.is_array() || tokens.size() != 2) {
            throw ConfigError("schema: binary needs [yes_token, no_token] for " + name);
          }
          col.kind = ColumnKind::kBinary;
          col.yes_token = tokens[0].get<std::string>();
          col.no_token = tokens[1].get<std::string>();
        } else if (spec.contains("categorical")) {
          col.kind = ColumnKind::kCategorical;
          col.levels = spec.at("categorical").get<std::vector<std::string>>();
          if (col.levels.size() < 2) throw ConfigError("schema: categorical needs 2+ levels: " + name);
        } else if (spec.value("type", std::string()) != "numeric") {
          throw ConfigError("schema: cannot read type of " + name);
        }
        col.rename = spec.value("as", std::string());
      } else {
        throw ConfigError("schema: bad entry for " + name);
      }
      schema.columns.push_back(std::move(col));
    }
    return schema;
  }

  static Schema load(const std::string& path) {
    try {
      return from_json(nlohmann::ordered_json::parse(csv::read_file(path)));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("schema " + path + ": " + e.what());
    }
  }
};

struct RejectedRow {
  std::size_t line = 0;
  std::string reason;
};

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_accepted = 0;
  std::vector<RejectedRow> rejected;
  std::vector<std::string> ignored_columns;
};

inline void to_json(nlohmann::ordered_json& j, const IngestReport& r) {
  j = nlohmann::ordered_json{{"rows_read", r.rows_read},
                             {"rows_accepted", r.rows_accepted},
                             {"rows_rejected", r.rejected.size()}};
  auto rejected = nlohmann::ordered_json::array();
  for (const auto& row : r.rejected) rejected.push_back({{"line", row.line}, {"reason", row.reason}});
  j["rejected"] = std::move(rejected);
  j["ignored_columns"] = r.ignored_columns;
}

enum class BadRowPolicy {
  kThrow,   // unparseable cell -> ParseError naming the row
  kReject,  // unparseable cell -> row skipped and counted
};

struct LoadOptions {
  std::optional<std::string> target;
  BadRowPolicy bad_rows = BadRowPolicy::kThrow;
};

namespace detail {

struct EncodedCell {
  std::vector<double> values;
  std::string error;
  bool missing = false;
};

inline EncodedCell encode_cell(const ColumnSpec& spec, const std::string& raw,
                               const std::vector<std::string>& sorted_levels) {
  EncodedCell cell;
  const std::string text = csv::trim(raw);
  if (text.empty() || text == "NA") {
    cell.missing = true;
    cell.error = "missing value in '" + spec.name + "'";
    return cell;
  }
  switch (spec.kind) {
    case ColumnKind::kNumeric: {
      auto value = csv::parse_double(text);
      if (!value) {
        cell.error = "cannot parse '" + text + "' in '" + spec.name + "'";
      } else {
        cell.values.push_back(*value);
      }
      break;
    }
    case ColumnKind::kBinary:
      if (text == spec.yes_token || text == "1") {
        cell.values.push_back(1.0);
      } else if (text == spec.no_token || text == "0") {
        cell.values.push_back(0.0);
      } else {
        cell.error = "unexpected token '" + text + "' in binary column '" + spec.name + "'";
      }
      break;
    case ColumnKind::kCategorical: {
      auto it = std::find(sorted_levels.begin(), sorted_levels.end(), text);
      if (it == sorted_levels.end()) {
        cell.error = "unknown level '" + text + "' in '" + spec.name + "'";
        break;
      }
      // First level (lexicographic) is the dropped reference.
      for (std::size_t l = 1; l < sorted_levels.size(); ++l) {
        cell.values.push_back(sorted_levels[l] == text ? 1.0 : 0.0);
      }
      break;
    }
  }
  return cell;
}

}  // namespace detail

// Reads a CSV according to `schema`. Header columns not in the schema are
// ignored (and listed in the report); schema columns missing from the header
// raise SchemaError. Rows with missing cells are always rejected and counted.
inline Dataset load_csv(const std::string& path, const Schema& schema,
                        const LoadOptions& options = {}, IngestReport* report = nullptr) {
  const auto records = csv::parse(csv::read_file(path));
  if (records.empty()) throw InputError(path + ": empty file (no header row)");

  const auto& header = records.front().fields;
  std::vector<std::string> header_names;
  for (const auto& h : header) header_names.push_back(csv::trim(h));

  IngestReport local;
  IngestReport& rep = report ? *report : local;
  rep = IngestReport{};

  struct Binding {
    const ColumnSpec* spec;
    std::size_t source;
    std::vector<std::string> sorted_levels;
    std::vector<std::size_t> outputs;
  };
  std::vector<Binding> bindings;
  std::vector<std::string> names;
  std::optional<std::size_t> target_binding;
  for (const auto& spec : schema.columns) {
    auto it = std::find(header_names.begin(), header_names.end(), spec.name);
    if (it == header_names.end()) throw SchemaError(path + ": missing column '" + spec.name + "'");
    Binding b{&spec, static_cast<std::size_t>(it - header_names.begin()), spec.levels, {}};
    std::sort(b.sorted_levels.begin(), b.sorted_levels.end());
    const bool is_target = options.target && (*options.target == spec.name ||
                                              *options.target == spec.output_name());
    if (is_target) {
      if (spec.kind == ColumnKind::kCategorical) {
        throw SchemaError("target '" + spec.name + "' cannot be multi-level categorical");
      }
      target_binding = bindings.size();
    } else if (spec.kind == ColumnKind::kCategorical) {
      for (std::size_t l = 1; l < b.sorted_levels.size(); ++l) {
        b.outputs.push_back(names.size());
        names.push_back(spec.output_name() + "=" + b.sorted_levels[l]);
      }
    } else {
      b.outputs.push_back(names.size());
      names.push_back(spec.output_name());
    }
    bindings.push_back(std::move(b));
  }
  if (options.target && !target_binding) {
    throw SchemaError(path + ": target '" + *options.target + "' not declared in schema");
  }
  for (const auto& h : header_names) {
    if (std::none_of(schema.columns.begin(), schema.columns.end(),
                     [&](const ColumnSpec& s) { return s.name == h; })) {
      rep.ignored_columns.push_back(h);
    }
  }

  std::vector<std::vector<double>> cols(names.size());
  std::vector<double> target_values;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    ++rep.rows_read;
    std::string error;
    bool missing = false;
    if (rec.fields.size() != header.size()) {
      error = "expected " + std::to_string(header.size()) + " fields, found " +
              std::to_string(rec.fields.size());
    }
    std::vector<detail::EncodedCell> cells;
    for (std::size_t b = 0; b < bindings.size() && error.empty(); ++b) {
      auto cell = detail::encode_cell(*bindings[b].spec, rec.fields[bindings[b].source],
                                      bindings[b].sorted_levels);
      if (!cell.error.empty()) {
        error = cell.error;
        missing = cell.missing;
        break;
      }
      cells.push_back(std::move(cell));
    }
    if (!error.empty()) {
      if (!missing && options.bad_rows == BadRowPolicy::kThrow) {
        throw ParseError(rec.line, error);
      }
      rep.rejected.push_back({rec.line, error});
      continue;
    }
    for (std::size_t b = 0; b < bindings.size(); ++b) {
      if (target_binding && b == *target_binding) {
        target_values.push_back(cells[b].values.front());
        continue;
      }
      for (std::size_t o = 0; o < bindings[b].outputs.size(); ++o) {
        cols[bindings[b].outputs[o]].push_back(cells[b].values[o]);
      }
    }
    ++rep.rows_accepted;
  }

  std::optional<Target> target;
  if (target_binding) {
    target = Target{bindings[*target_binding].spec->output_name(), std::move(target_values)};
  }
  if (names.empty() && !target) return Dataset();
  if (names.empty()) {
    std::vector<std::size_t> ids(target->values.size());
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    return Dataset({}, {}, std::move(target), std::move(ids));
  }
  return Dataset(std::move(names), std::move(cols), std::move(target));
}

// Every header column is numeric; `target` (if given) becomes the target.
inline Dataset load_numeric_csv(const std::string& path, const std::optional<std::string>& target,
                                const LoadOptions& base = {}, IngestReport* report = nullptr) {
  const auto records = csv::parse(csv::read_file(path));
  if (records.empty()) throw InputError(path + ": empty file (no header row)");
  Schema schema;
  for (const auto& h : records.front().fields) {
    ColumnSpec spec;
    spec.name = csv::trim(h);
    schema.columns.push_back(std::move(spec));
  }
  LoadOptions options = base;
  options.target = target;
  return load_csv(path, schema, options, report);
}

// Features first, then the target (if any).
inline void write_csv(std::ostream& out, const Dataset& d) {
  std::vector<std::string> header = d.names();
  if (d.has_target()) header.push_back(d.target().name);
  csv::write_row(out, header);
  std::vector<std::string> fields(header.size());
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    for (std::size_t j = 0; j < d.n_cols(); ++j) fields[j] = csv::format_double(d.column(j)[i]);
    if (d.has_target()) fields.back() = csv::format_double(d.y()[i]);
    csv::write_row(out, fields);
  }
}

inline void write_csv(const std::string& path, const Dataset& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  write_csv(out, d);
}

// Replaces an integer-coded column by drop-first one-hot indicators named
// "<name>=<level>". Levels default to the distinct values observed in `d`.
inline Dataset one_hot(const Dataset& d, std::string_view name,
                       std::vector<double> levels = {}) {
  const auto j = d.index_of(name);
  const auto values = d.column(j);
  if (levels.empty()) {
    levels.assign(values.begin(), values.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  }
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  for (std::size_t c = 0; c < d.n_cols(); ++c) {
    if (c != j) {
      names.push_back(d.names()[c]);
      cols.push_back(d.columns()[c]);
      continue;
    }
    for (std::size_t l = 1; l < levels.size(); ++l) {
      names.push_back(std::string(name) + "=" + csv::format_double(levels[l]));
      std::vector<double> indicator(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) indicator[i] = values[i] == levels[l];
      cols.push_back(std::move(indicator));
    }
  }
  return Dataset(std::move(names), std::move(cols),
                 d.has_target() ? std::optional<Target>(d.target()) : std::nullopt,
                 {d.row_ids().begin(), d.row_ids().end()});
}

}  // namespace hybridml

#endif  // HYBRIDML_DATAFRAME_HPP_
