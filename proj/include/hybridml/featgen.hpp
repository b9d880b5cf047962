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

#ifndef HYBRIDML_FEATGEN_HPP_
#define HYBRIDML_FEATGEN_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hybridml/dataframe.hpp"
#include "hybridml/errors.hpp"
#include "hybridml/random.hpp"
#include "json.hpp"

namespace hybridml::features {

// Raw attributes after ingestion (binary columns already 0/1; employment is
// 1 for the private/self-employed sector).
namespace raw {
inline constexpr const char* kAge = "Age";
inline constexpr const char* kIncome = "AnnualIncome";
inline constexpr const char* kFamily = "FamilyMembers";
inline constexpr const char* kGraduate = "GraduateOrNot";
inline constexpr const char* kEmployment = "Employment.Type";
inline constexpr const char* kChronic = "ChronicDiseases";
inline constexpr const char* kFlyer = "FrequentFlyer";
inline constexpr const char* kAbroad = "EverTravelledAbroad";
inline constexpr const char* kTarget = "TravelInsurance";
}  // namespace raw

inline const std::vector<std::string>& raw_predictors() {
  static const std::vector<std::string> names{raw::kAge,        raw::kIncome,  raw::kFamily,
                                              raw::kGraduate,   raw::kEmployment, raw::kChronic,
                                              raw::kFlyer,      raw::kAbroad};
  return names;
}

inline const std::vector<std::string>& derived_names() {
  static const std::vector<std::string> names{
      "IncomePerCapita",     "HighIncome",          "AgeNormalized",
      "HighChronicDiseases", "TravelFrequency",     "PrivateEmployment",
      "LowDependence",       "IncomeByAge",         "AgeGroup",
      "HighIncomeTraveler",  "HighIncome90",        "IncomePerCapitaNorm",
      "ExperiencedTraveler", "LargeFamily",         "ChronicByAge",
      "InsuranceScore",      "FinancialDependence", "TravelScore",
      "WorkExperience",      "StableJob",           "AdjustedTravelIncome",
      "RiskScore",           "RiskScoreNorm",       "ClusterScore",
      "ClusterInsuranceRate", "MovingAvgInsurance"};
  return names;
}

// Feature columns of the engineered table (the target is carried separately).
inline std::vector<std::string> engineered_feature_names() {
  auto names = raw_predictors();
  const auto& derived = derived_names();
  names.insert(names.end(), derived.begin(), derived.end());
  return names;
}

// Integer-coded categorical outputs; one-hot encode before modeling.
inline const std::vector<std::string>& categorical_outputs() {
  static const std::vector<std::string> names{"AgeGroup", "ClusterScore"};
  return names;
}

// ---------------------------------------------------------------------------
// Building blocks
// ---------------------------------------------------------------------------

// Linear-interpolation quantile of the sorted sample (R type 7).
inline double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw DataError("quantile: empty column");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile: q must lie in [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double h = static_cast<double>(v.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

inline std::vector<double> flag_above(std::span<const double> values, double threshold) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] > threshold ? 1.0 : 0.0;
  return out;
}

// 1 where the value exceeds the q-quantile of the same column.
inline std::vector<double> percentile_flag(std::span<const double> values, double q) {
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("percentile_flag: q must lie in (0, 1)");
  return flag_above(values, quantile(values, q));
}

struct ZScore {
  double mean = 0.0;
  double sd = 1.0;

  static ZScore fit(std::span<const double> v) {
    ZScore z{sample_mean(v), sample_std(v)};
    if (!(z.sd > 0.0)) z.sd = 1.0;
    return z;
  }
  double operator()(double x) const { return (x - mean) / sd; }
};

struct MinMax {
  double lo = 0.0;
  double hi = 1.0;

  static MinMax fit(std::span<const double> v) {
    if (v.empty()) return {};
    const auto [a, b] = std::minmax_element(v.begin(), v.end());
    return {*a, *b};
  }
  double operator()(double x) const { return hi > lo ? (x - lo) / (hi - lo) : 0.0; }
};

// Mean of a value per group label, fitted once and replayed on new rows.
// Unseen labels receive the overall mean.
struct GroupMeans {
  std::map<double, double> means;
  double global_mean = 0.0;

  static GroupMeans fit(std::span<const double> groups, std::span<const double> values) {
    if (groups.size() != values.size()) throw SchemaError("group means: length mismatch");
    if (values.empty()) throw DataError("group means: empty column");
    std::map<double, std::pair<double, std::size_t>> acc;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      auto& [sum, count] = acc[groups[i]];
      sum += values[i];
      ++count;
    }
    GroupMeans g;
    g.global_mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    for (const auto& [label, sc] : acc) g.means[label] = sc.first / static_cast<double>(sc.second);
    return g;
  }

  double operator()(double label) const {
    const auto it = means.find(label);
    return it == means.end() ? global_mean : it->second;
  }

  std::vector<double> apply(std::span<const double> groups) const {
    std::vector<double> out(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) out[i] = (*this)(groups[i]);
    return out;
  }
};

inline std::vector<double> moving_avg_by_group(const Dataset& d, std::string_view group,
                                               std::string_view value) {
  const auto g = d.column(group);
  const auto v = value == (d.has_target() ? d.target().name : std::string()) ? d.y() : d.column(value);
  return GroupMeans::fit(g, v).apply(g);
}

// ---------------------------------------------------------------------------
// k-means
// ---------------------------------------------------------------------------

using Point = std::vector<double>;

inline double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

struct KMeansModel {
  std::vector<Point> centroids;
  std::vector<std::size_t> assignments;
  std::vector<double> inertia_trace;  // after each Lloyd iteration
  std::size_t iterations = 0;

  // Nearest centroid; ties go to the lower label.
  std::size_t assign(const Point& p) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      const double dist = squared_distance(p, centroids[c]);
      if (dist < best_d) {
        best_d = dist;
        best = c;
      }
    }
    return best;
  }

  double inertia(const std::vector<Point>& points) const {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) s += squared_distance(points[i], centroids[assignments[i]]);
    return s;
  }
};

// k-means++ seeding followed by Lloyd iterations until the assignments stop
// changing or `max_iter` is reached.
inline KMeansModel kmeans(const std::vector<Point>& points, std::size_t k, std::uint64_t seed,
                          std::size_t max_iter = 100) {
  const std::size_t n = points.size();
  if (k < 1) throw ConfigError("kmeans: k must be >= 1");
  if (n < k) throw DataError("kmeans: " + std::to_string(n) + " points for k = " + std::to_string(k));
  for (const auto& p : points) {
    for (double v : p) {
      if (!std::isfinite(v)) throw DataError("kmeans: non-finite coordinate");
    }
  }
  Rng rng(seed);
  KMeansModel m;
  m.centroids.push_back(points[rng.index(n)]);
  std::vector<double> d2(n);
  while (m.centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = squared_distance(points[i], m.centroids[0]);
      for (std::size_t c = 1; c < m.centroids.size(); ++c) d2[i] = std::min(d2[i], squared_distance(points[i], m.centroids[c]));
      total += d2[i];
    }
    std::size_t pick = n - 1;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (u < d2[i]) {
          pick = i;
          break;
        }
        u -= d2[i];
      }
    } else {
      pick = rng.index(n);
    }
    m.centroids.push_back(points[pick]);
  }

  const std::size_t dim = points.front().size();
  m.assignments.assign(n, k);  // k = unassigned
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = m.assign(points[i]);
      if (c != m.assignments[i]) {
        m.assignments[i] = c;
        changed = true;
      }
    }
    if (!changed) break;
    m.iterations = iter + 1;
    std::vector<Point> sums(k, Point(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[m.assignments[i]];
      for (std::size_t t = 0; t < dim; ++t) sums[m.assignments[i]][t] += points[i][t];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Empty cluster: move it to the point farthest from where it was.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double dist = squared_distance(points[i], m.centroids[c]);
          if (dist > far_d) {
            far_d = dist;
            far = i;
          }
        }
        m.centroids[c] = points[far];
        continue;
      }
      for (std::size_t t = 0; t < dim; ++t) m.centroids[c][t] = sums[c][t] / static_cast<double>(counts[c]);
    }
    m.inertia_trace.push_back(m.inertia(points));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Recipe
// ---------------------------------------------------------------------------

using WeightVector = std::vector<std::pair<std::string, double>>;

struct FeatureRecipe {
  WeightVector insurance_score_weights{{raw::kIncome, 1.0},
                                       {raw::kChronic, 1.0},
                                       {"TravelFrequency", 1.0},
                                       {"ExperiencedTraveler", 1.0}};
  WeightVector risk_score_weights{{raw::kChronic, 1.0}, {raw::kAge, 1.0}, {"TravelFrequency", 1.0}};
  std::vector<double> age_group_bounds;  // empty: quartiles of the training ages
  std::size_t kmeans_k = 4;
  std::uint64_t kmeans_seed = 20240917;
  double high_income_q = 0.75;
  double high_income90_q = 0.90;
  double large_family_q = 0.75;
  double flyer_points = 1.0;
  double abroad_points = 2.0;
  double graduate_start_age = 22.0;
  double other_start_age = 18.0;
  double low_dependence_max_family = 3.0;

  static const std::vector<std::string>& insurance_constituents() {
    static const std::vector<std::string> v{raw::kIncome, raw::kChronic, "TravelFrequency", "ExperiencedTraveler"};
    return v;
  }
  static const std::vector<std::string>& risk_constituents() {
    static const std::vector<std::string> v{raw::kChronic, raw::kAge, "TravelFrequency"};
    return v;
  }

  void validate() const {
    auto check_weights = [](const WeightVector& w, const std::vector<std::string>& allowed, const char* what) {
      if (w.empty()) throw ConfigError(std::string("recipe: ") + what + " weights are empty");
      double sum = 0.0;
      for (const auto& [name, value] : w) {
        if (!std::isfinite(value)) throw ConfigError(std::string("recipe: non-finite ") + what + " weight");
        if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
          throw ConfigError(std::string("recipe: '") + name + "' is not a " + what + " constituent");
        }
        sum += value;
      }
      if (!(sum > 0.0)) throw ConfigError(std::string("recipe: ") + what + " weights must sum to > 0");
    };
    check_weights(insurance_score_weights, insurance_constituents(), "InsuranceScore");
    check_weights(risk_score_weights, risk_constituents(), "RiskScore");
    for (std::size_t i = 1; i < age_group_bounds.size(); ++i) {
      if (!(age_group_bounds[i] > age_group_bounds[i - 1])) {
        throw ConfigError("recipe: age_group_bounds must be strictly increasing");
      }
    }
    for (double b : age_group_bounds) {
      if (!std::isfinite(b)) throw ConfigError("recipe: non-finite age group bound");
    }
    if (kmeans_k < 1) throw ConfigError("recipe: kmeans_k must be >= 1");
    for (double q : {high_income_q, high_income90_q, large_family_q}) {
      if (!(q > 0.0 && q < 1.0)) throw ConfigError("recipe: percentile thresholds must lie in (0, 1)");
    }
  }
};

inline void to_json(nlohmann::ordered_json& j, const FeatureRecipe& r) {
  auto weights = [](const WeightVector& w) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (const auto& [k, v] : w) o[k] = v;
    return o;
  };
  j = nlohmann::ordered_json{
      {"score_weights", {{"InsuranceScore", weights(r.insurance_score_weights)},
                         {"RiskScore", weights(r.risk_score_weights)}}},
      {"age_group_bounds", r.age_group_bounds},
      {"kmeans_k", r.kmeans_k},
      {"kmeans_seed", r.kmeans_seed},
      {"percentile_thresholds",
       {{"high_income", r.high_income_q}, {"high_income90", r.high_income90_q}, {"large_family", r.large_family_q}}},
      {"travel_score_points", {{"frequent_flyer", r.flyer_points}, {"abroad", r.abroad_points}}},
      {"work_start_age", {{"graduate", r.graduate_start_age}, {"other", r.other_start_age}}},
      {"low_dependence_max_family", r.low_dependence_max_family}};
}

// Missing keys keep their defaults.
inline void from_json(const nlohmann::ordered_json& j, FeatureRecipe& r) {
  auto weights = [](const nlohmann::ordered_json& o) {
    WeightVector w;
    for (auto it = o.begin(); it != o.end(); ++it) w.emplace_back(it.key(), it.value().get<double>());
    return w;
  };
  if (j.contains("score_weights")) {
    const auto& sw = j.at("score_weights");
    if (sw.contains("InsuranceScore")) r.insurance_score_weights = weights(sw.at("InsuranceScore"));
    if (sw.contains("RiskScore")) r.risk_score_weights = weights(sw.at("RiskScore"));
  }
  if (j.contains("age_group_bounds")) r.age_group_bounds = j.at("age_group_bounds").get<std::vector<double>>();
  if (j.contains("kmeans_k")) r.kmeans_k = j.at("kmeans_k").get<std::size_t>();
  if (j.contains("kmeans_seed")) r.kmeans_seed = j.at("kmeans_seed").get<std::uint64_t>();
  if (j.contains("percentile_thresholds")) {
    const auto& p = j.at("percentile_thresholds");
    r.high_income_q = p.value("high_income", r.high_income_q);
    r.high_income90_q = p.value("high_income90", r.high_income90_q);
    r.large_family_q = p.value("large_family", r.large_family_q);
  }
  if (j.contains("travel_score_points")) {
    const auto& p = j.at("travel_score_points");
    r.flyer_points = p.value("frequent_flyer", r.flyer_points);
    r.abroad_points = p.value("abroad", r.abroad_points);
  }
  if (j.contains("work_start_age")) {
    const auto& p = j.at("work_start_age");
    r.graduate_start_age = p.value("graduate", r.graduate_start_age);
    r.other_start_age = p.value("other", r.other_start_age);
  }
  r.low_dependence_max_family = j.value("low_dependence_max_family", r.low_dependence_max_family);
  r.validate();
}

// ---------------------------------------------------------------------------
// Engineering
// ---------------------------------------------------------------------------

// Statistics fitted on a training table and replayed on any table with the
// same raw columns. Holds no reference to the training rows except their ids,
// which the leakage audit compares against the test split.
class FeatureEngineer {
 public:
  static FeatureEngineer fit(const Dataset& train, const FeatureRecipe& recipe) {
    recipe.validate();
    require_raw(train);
    if (!train.has_target()) throw SchemaError("featgen: training table needs the target column");
    if (train.n_rows() == 0) throw DataError("featgen: empty training table");

    FeatureEngineer e;
    e.recipe_ = recipe;
    e.fit_row_ids_.assign(train.row_ids().begin(), train.row_ids().end());
    const auto income = train.column(raw::kIncome);
    const auto age = train.column(raw::kAge);
    const auto family = train.column(raw::kFamily);
    const auto chronic = train.column(raw::kChronic);

    e.high_income_ = quantile(income, recipe.high_income_q);
    e.high_income90_ = quantile(income, recipe.high_income90_q);
    e.large_family_ = quantile(family, recipe.large_family_q);
    e.chronic_median_ = quantile(chronic, 0.5);
    e.age_z_ = ZScore::fit(age);
    e.ipc_z_ = ZScore::fit(income_per_capita(train));

    if (!recipe.age_group_bounds.empty()) {
      e.age_bounds_ = recipe.age_group_bounds;
    } else {
      for (double q : {0.25, 0.5, 0.75}) {
        const double b = quantile(age, q);
        if (e.age_bounds_.empty() || b > e.age_bounds_.back()) e.age_bounds_.push_back(b);
      }
    }

    const auto travel = travel_frequency(train);
    const auto abroad = train.column(raw::kAbroad);
    auto constituent = [&](const std::string& name) -> std::span<const double> {
      if (name == "TravelFrequency") return travel;
      if (name == "ExperiencedTraveler") return abroad;
      return train.column(name);
    };
    for (const auto& [name, w] : recipe.insurance_score_weights) e.insurance_scale_[name] = MinMax::fit(constituent(name));
    for (const auto& [name, w] : recipe.risk_score_weights) e.risk_scale_[name] = MinMax::fit(constituent(name));
    const auto risk = e.risk_composite(train, travel);
    e.risk_z_ = ZScore::fit(risk);

    std::vector<double> adjusted(train.n_rows());
    for (std::size_t i = 0; i < adjusted.size(); ++i) adjusted[i] = income[i] * (1.0 + travel[i]);
    e.adjusted_income_ = MinMax::fit(adjusted);

    const auto employment = train.column(raw::kEmployment);
    e.cluster_z_ = {ZScore::fit(income), ZScore::fit(age), ZScore::fit(employment)};
    e.kmeans_ = kmeans(e.cluster_points(train), recipe.kmeans_k, recipe.kmeans_seed);

    const auto y = train.y();
    std::vector<double> clusters(train.n_rows());
    for (std::size_t i = 0; i < clusters.size(); ++i) clusters[i] = static_cast<double>(e.kmeans_.assignments[i]);
    e.cluster_rate_ = GroupMeans::fit(clusters, y);
    e.age_group_rate_ = GroupMeans::fit(e.age_groups(age), y);
    return e;
  }

  // Engineered table: the 8 raw predictors, then the derived columns in
  // table order. The target and row ids carry over.
  Dataset transform(const Dataset& d) const {
    require_raw(d);
    const std::size_t n = d.n_rows();
    const auto age = d.column(raw::kAge);
    const auto income = d.column(raw::kIncome);
    const auto family = d.column(raw::kFamily);
    const auto graduate = d.column(raw::kGraduate);
    const auto employment = d.column(raw::kEmployment);
    const auto chronic = d.column(raw::kChronic);
    const auto flyer = d.column(raw::kFlyer);
    const auto abroad = d.column(raw::kAbroad);
    const auto travel = travel_frequency(d);
    const auto ipc = income_per_capita(d);
    const auto groups = age_groups(age);
    const auto risk = risk_composite(d, travel);
    const auto points = cluster_points(d);

    std::map<std::string, std::vector<double>> out;
    auto col = [&](const std::string& name) -> std::vector<double>& {
      auto& c = out[name];
      c.resize(n);
      return c;
    };
    auto& ipc_col = col("IncomePerCapita");
    auto& high_income = col("HighIncome");
    auto& age_norm = col("AgeNormalized");
    auto& high_chronic = col("HighChronicDiseases");
    auto& travel_col = col("TravelFrequency");
    auto& private_emp = col("PrivateEmployment");
    auto& low_dep = col("LowDependence");
    auto& income_by_age = col("IncomeByAge");
    auto& age_group = col("AgeGroup");
    auto& hit = col("HighIncomeTraveler");
    auto& high90 = col("HighIncome90");
    auto& ipc_norm = col("IncomePerCapitaNorm");
    auto& experienced = col("ExperiencedTraveler");
    auto& large_family = col("LargeFamily");
    auto& chronic_by_age = col("ChronicByAge");
    auto& insurance = col("InsuranceScore");
    auto& dependence = col("FinancialDependence");
    auto& travel_score = col("TravelScore");
    auto& work = col("WorkExperience");
    auto& stable = col("StableJob");
    auto& adjusted = col("AdjustedTravelIncome");
    auto& risk_score = col("RiskScore");
    auto& risk_norm = col("RiskScoreNorm");
    auto& cluster = col("ClusterScore");
    auto& cluster_rate = col("ClusterInsuranceRate");
    auto& age_rate = col("MovingAvgInsurance");

    for (std::size_t i = 0; i < n; ++i) {
      const double safe_age = std::max(age[i], 1.0);
      const double safe_family = std::max(family[i], 1.0);
      ipc_col[i] = ipc[i];
      high_income[i] = income[i] > high_income_ ? 1.0 : 0.0;
      age_norm[i] = age_z_(age[i]);
      high_chronic[i] = chronic[i] > chronic_median_ ? 1.0 : 0.0;
      travel_col[i] = travel[i];
      private_emp[i] = employment[i];
      low_dep[i] = family[i] <= recipe_.low_dependence_max_family ? 1.0 : 0.0;
      income_by_age[i] = income[i] / safe_age;
      age_group[i] = groups[i];
      hit[i] = high_income[i] * travel[i];
      high90[i] = income[i] > high_income90_ ? 1.0 : 0.0;
      ipc_norm[i] = ipc_z_(ipc[i]);
      experienced[i] = abroad[i];
      large_family[i] = family[i] > large_family_ ? 1.0 : 0.0;
      chronic_by_age[i] = chronic[i] / safe_age;
      double score = 0.0, wsum = 0.0;
      for (const auto& [name, w] : recipe_.insurance_score_weights) {
        const double v = name == "TravelFrequency" ? travel[i]
                         : name == "ExperiencedTraveler" ? abroad[i]
                                                         : d.column(name)[i];
        score += w * insurance_scale_.at(name)(v);
        wsum += w;
      }
      insurance[i] = score / wsum;
      dependence[i] = std::log(safe_family / std::max(income[i], 1.0));
      travel_score[i] = recipe_.flyer_points * flyer[i] + recipe_.abroad_points * abroad[i];
      const double start = graduate[i] != 0.0 ? recipe_.graduate_start_age : recipe_.other_start_age;
      work[i] = std::max(age[i] - start, 0.0);
      stable[i] = 1.0 - employment[i];
      adjusted[i] = adjusted_income_(income[i] * (1.0 + travel[i]));
      risk_score[i] = risk[i];
      risk_norm[i] = risk_z_(risk[i]);
      const auto label = kmeans_.assign(points[i]);
      cluster[i] = static_cast<double>(label);
      cluster_rate[i] = cluster_rate_(cluster[i]);
      age_rate[i] = age_group_rate_(groups[i]);
    }

    std::vector<std::string> names = raw_predictors();
    std::vector<std::vector<double>> columns;
    for (const auto& name : names) {
      const auto c = d.column(name);
      columns.emplace_back(c.begin(), c.end());
    }
    for (const auto& name : derived_names()) {
      names.push_back(name);
      columns.push_back(std::move(out.at(name)));
    }
    std::optional<Target> target;
    if (d.has_target()) target = d.target();
    return Dataset(std::move(names), std::move(columns), std::move(target),
                   std::vector<std::size_t>(d.row_ids().begin(), d.row_ids().end()));
  }

  const std::vector<std::size_t>& fit_row_ids() const { return fit_row_ids_; }
  const KMeansModel& kmeans_model() const { return kmeans_; }
  const std::vector<double>& age_bounds() const { return age_bounds_; }
  std::size_t n_age_groups() const { return age_bounds_.size() + 1; }
  std::size_t n_clusters() const { return kmeans_.centroids.size(); }

  // Fitted statistics, for audit logs.
  nlohmann::ordered_json state_json() const {
    nlohmann::ordered_json j;
    j["recipe"] = recipe_;
    j["n_fit_rows"] = fit_row_ids_.size();
    j["high_income_threshold"] = high_income_;
    j["high_income90_threshold"] = high_income90_;
    j["large_family_threshold"] = large_family_;
    j["chronic_median"] = chronic_median_;
    j["age_group_bounds"] = age_bounds_;
    j["kmeans"] = {{"centroids", kmeans_.centroids}, {"iterations", kmeans_.iterations}};
    j["cluster_insurance_rate"] = group_json(cluster_rate_);
    j["age_group_insurance_rate"] = group_json(age_group_rate_);
    return j;
  }

 private:
  static void require_raw(const Dataset& d) {
    for (const auto& name : raw_predictors()) d.index_of(name);
  }

  static nlohmann::ordered_json group_json(const GroupMeans& g) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (const auto& [label, mean] : g.means) o[std::to_string(static_cast<long long>(label))] = mean;
    o["global"] = g.global_mean;
    return o;
  }

  static std::vector<double> travel_frequency(const Dataset& d) {
    const auto flyer = d.column(raw::kFlyer);
    const auto abroad = d.column(raw::kAbroad);
    std::vector<double> out(d.n_rows());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (flyer[i] != 0.0 || abroad[i] != 0.0) ? 1.0 : 0.0;
    return out;
  }

  static std::vector<double> income_per_capita(const Dataset& d) {
    const auto income = d.column(raw::kIncome);
    const auto family = d.column(raw::kFamily);
    std::vector<double> out(d.n_rows());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = income[i] / std::max(family[i], 1.0);
    return out;
  }

  // Group code = number of bounds strictly below the age.
  std::vector<double> age_groups(std::span<const double> age) const {
    std::vector<double> out(age.size());
    for (std::size_t i = 0; i < age.size(); ++i) {
      out[i] = static_cast<double>(std::lower_bound(age_bounds_.begin(), age_bounds_.end(), age[i]) -
                                   age_bounds_.begin());
    }
    return out;
  }

  std::vector<double> risk_composite(const Dataset& d, std::span<const double> travel) const {
    std::vector<double> out(d.n_rows(), 0.0);
    double wsum = 0.0;
    for (const auto& [name, w] : recipe_.risk_score_weights) {
      const auto scale = risk_scale_.at(name);
      const auto c = name == "TravelFrequency" ? travel : d.column(name);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * scale(c[i]);
      wsum += w;
    }
    for (double& v : out) v /= wsum;
    return out;
  }

  std::vector<Point> cluster_points(const Dataset& d) const {
    const auto income = d.column(raw::kIncome);
    const auto age = d.column(raw::kAge);
    const auto employment = d.column(raw::kEmployment);
    std::vector<Point> points(d.n_rows());
    for (std::size_t i = 0; i < points.size(); ++i) {
      points[i] = {cluster_z_[0](income[i]), cluster_z_[1](age[i]), cluster_z_[2](employment[i])};
    }
    return points;
  }

  FeatureRecipe recipe_;
  std::vector<std::size_t> fit_row_ids_;
  double high_income_ = 0.0, high_income90_ = 0.0, large_family_ = 0.0, chronic_median_ = 0.0;
  ZScore age_z_, ipc_z_, risk_z_;
  MinMax adjusted_income_;
  std::map<std::string, MinMax> insurance_scale_, risk_scale_;
  std::vector<double> age_bounds_;
  std::vector<ZScore> cluster_z_;
  KMeansModel kmeans_;
  GroupMeans cluster_rate_, age_group_rate_;
};

inline Dataset engineer_features(const Dataset& raw_table, const FeatureRecipe& recipe) {
  return FeatureEngineer::fit(raw_table, recipe).transform(raw_table);
}

// One-hot expansion of the integer-coded categorical outputs over a fixed
// level set, so train and test tables share columns.
inline Dataset encode_categoricals(const Dataset& d, std::size_t n_age_groups, std::size_t n_clusters) {
  auto levels = [](std::size_t count) {
    std::vector<double> v(count);
    std::iota(v.begin(), v.end(), 0.0);
    return v;
  };
  Dataset out = d;
  if (out.find("AgeGroup")) out = one_hot(out, "AgeGroup", levels(n_age_groups));
  if (out.find("ClusterScore")) out = one_hot(out, "ClusterScore", levels(n_clusters));
  return out;
}

}  // namespace hybridml::features

#endif  // HYBRIDML_FEATGEN_HPP_
