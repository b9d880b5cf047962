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

#ifndef HYBRIDML_METRICS_HPP_
#define HYBRIDML_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "hybridml/errors.hpp"
#include "json.hpp"

namespace hybridml::metrics {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fn + fp + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Undefined (0/0) metrics are empty optionals, never zeros.
struct MetricBlock {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> specificity;
  std::optional<double> f1;
  std::optional<double> balanced_accuracy;
  std::optional<double> auc;
};

// Predicted positive iff score >= threshold.
inline ConfusionMatrix confusion_at(std::span<const double> labels, std::span<const double> scores,
                                    double threshold = 0.5) {
  if (labels.size() != scores.size()) throw DataError("confusion_at: length mismatch");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool positive = labels[i] == 1.0;
    const bool predicted = scores[i] >= threshold;
    if (positive && predicted) ++cm.tp;
    else if (positive) ++cm.fn;
    else if (predicted) ++cm.fp;
    else ++cm.tn;
  }
  return cm;
}

namespace detail {

inline std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

}  // namespace detail

inline MetricBlock classification_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw DataError("classification_metrics: empty confusion matrix");
  const auto tp = static_cast<double>(cm.tp), fn = static_cast<double>(cm.fn);
  const auto fp = static_cast<double>(cm.fp), tn = static_cast<double>(cm.tn);
  MetricBlock m;
  m.accuracy = detail::ratio(tp + tn, static_cast<double>(cm.total()));
  m.precision = detail::ratio(tp, tp + fp);
  m.recall = detail::ratio(tp, tp + fn);
  m.specificity = detail::ratio(tn, tn + fp);
  if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  if (m.recall && m.specificity) m.balanced_accuracy = 0.5 * (*m.recall + *m.specificity);
  return m;
}

// Area under the ROC curve by the trapezoidal rule over the distinct score
// thresholds. Tied scores move together, which makes the area equal to the
// concordance statistic with ties counted one half.
inline double auc(std::span<const double> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw DataError("auc: length mismatch");
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double positives = 0.0, negatives = 0.0;
  for (double y : labels) (y == 1.0 ? positives : negatives) += 1.0;
  if (positives == 0.0 || negatives == 0.0) {
    throw UndefinedMetricError("auc: labels contain a single class");
  }
  // Integrate in counts (tp, fp), normalize once at the end so that the
  // result is exact for integer-valued areas.
  double area = 0.0, tp = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    double dtp = 0.0, dfp = 0.0;
    std::size_t j = i;
    for (; j < order.size() && scores[order[j]] == scores[order[i]]; ++j) {
      (labels[order[j]] == 1.0 ? dtp : dfp) += 1.0;
    }
    area += dfp * (tp + 0.5 * dtp);
    tp += dtp;
    fp += dfp;
    i = j;
  }
  return area / (positives * negatives);
}

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

// ROC vertices from the highest threshold down, starting at (0, 0).
inline std::vector<RocPoint> roc_curve(std::span<const double> labels,
                                       std::span<const double> scores) {
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double positives = 0.0, negatives = 0.0;
  for (double y : labels) (y == 1.0 ? positives : negatives) += 1.0;
  if (positives == 0.0 || negatives == 0.0) {
    throw UndefinedMetricError("roc_curve: labels contain a single class");
  }
  std::vector<RocPoint> points{{INFINITY, 0.0, 0.0}};
  double tp = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    for (; j < order.size() && scores[order[j]] == scores[order[i]]; ++j) {
      (labels[order[j]] == 1.0 ? tp : fp) += 1.0;
    }
    points.push_back({scores[order[i]], fp / negatives, tp / positives});
    i = j;
  }
  return points;
}

inline double rmse(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size() || y.empty()) throw DataError("rmse: needs equal, non-zero lengths");
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) ss += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return std::sqrt(ss / static_cast<double>(y.size()));
}

inline double mse(std::span<const double> y, std::span<const double> yhat) {
  const double r = rmse(y, yhat);
  return r * r;
}

// Threshold metrics plus AUC; AUC stays empty when the labels have one class.
inline MetricBlock evaluate_scores(std::span<const double> labels, std::span<const double> scores,
                                   double threshold = 0.5) {
  auto block = classification_metrics(confusion_at(labels, scores, threshold));
  try {
    block.auc = auc(labels, scores);
  } catch (const UndefinedMetricError&) {
  }
  return block;
}

inline void to_json(nlohmann::ordered_json& j, const ConfusionMatrix& cm) {
  j = nlohmann::ordered_json{{"tp", cm.tp}, {"fn", cm.fn}, {"fp", cm.fp}, {"tn", cm.tn}};
}

inline void to_json(nlohmann::ordered_json& j, const MetricBlock& m) {
  auto put = [&](const char* key, const std::optional<double>& v) {
    j[key] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  j = nlohmann::ordered_json::object();
  put("auc", m.auc);
  put("accuracy", m.accuracy);
  put("precision", m.precision);
  put("recall", m.recall);
  put("specificity", m.specificity);
  put("f1", m.f1);
  put("balanced_accuracy", m.balanced_accuracy);
}

inline void from_json(const nlohmann::ordered_json& j, MetricBlock& m) {
  auto get = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
  };
  m.auc = get("auc");
  m.accuracy = get("accuracy");
  m.precision = get("precision");
  m.recall = get("recall");
  m.specificity = get("specificity");
  m.f1 = get("f1");
  m.balanced_accuracy = get("balanced_accuracy");
}

}  // namespace hybridml::metrics

#endif  // HYBRIDML_METRICS_HPP_
