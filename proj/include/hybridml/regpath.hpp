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

#ifndef HYBRIDML_REGPATH_HPP_
#define HYBRIDML_REGPATH_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hybridml/dataframe.hpp"
#include "hybridml/errors.hpp"
#include "hybridml/metrics.hpp"
#include "json.hpp"

// Elastic-net penalized gaussian and logistic regression by cyclic
// coordinate descent. Objective (gaussian):
//
//   1/(2n) ||y - b0 - X b||^2 + lambda * (alpha ||b||_1 + (1 - alpha) ||b||^2 / 2)
//
// Features are standardized internally (population sd, as glmnet does) and
// coefficients are reported on the original scale. The binomial family runs
// an IRLS outer loop around the weighted gaussian solver.
namespace hybridml::glm {

enum class Family { kGaussian, kBinomial };

inline const char* family_name(Family f) { return f == Family::kGaussian ? "gaussian" : "binomial"; }

struct PenaltySpec {
  double alpha = 1.0;   // 0 ridge, 1 lasso, in between elastic net
  double lambda = 0.0;

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and >= 0");
  }
};

enum class Method { kRidge, kLasso, kElasticNet };

inline Method method_of(double alpha) {
  if (alpha == 0.0) return Method::kRidge;
  if (alpha == 1.0) return Method::kLasso;
  return Method::kElasticNet;
}

inline const char* method_name(Method m) {
  switch (m) {
    case Method::kRidge: return "ridge";
    case Method::kLasso: return "lasso";
    case Method::kElasticNet: return "elasticnet";
  }
  return "?";
}

struct SolverOptions {
  double tol = 1e-7;              // max coefficient change per sweep
  std::size_t max_iter = 100000;  // coordinate-descent sweeps
  double deviance_tol = 1e-8;     // binomial: relative deviance change
  std::size_t max_outer = 200;    // binomial: IRLS iterations
  double coef_cap = 100.0;        // binomial: separation guard (standardized scale)
  double prob_clip = 1e-5;
};

inline double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

inline double logistic(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

struct RegularizedFit {
  Family family = Family::kGaussian;
  double intercept = 0.0;
  std::vector<std::string> feature_names;
  std::vector<double> beta;  // original feature scale
  PenaltySpec penalty;
  std::size_t n_iterations = 0;
  bool converged = true;
  // Training standardization used by the solver (population sd).
  std::vector<double> x_center;
  std::vector<double> x_scale;

  std::vector<double> standardized_beta() const {
    std::vector<double> out(beta.size());
    for (std::size_t j = 0; j < beta.size(); ++j) {
      out[j] = beta[j] * (j < x_scale.size() ? x_scale[j] : 1.0);
    }
    return out;
  }

  std::size_t nonzero_count() const {
    return static_cast<std::size_t>(std::count_if(beta.begin(), beta.end(), [](double b) { return b != 0.0; }));
  }
};

namespace detail {

struct StandardizedDesign {
  std::size_t n = 0;
  std::vector<std::vector<double>> x;
  std::vector<double> center;
  std::vector<double> scale;
};

inline StandardizedDesign standardize_design(const Dataset& d) {
  StandardizedDesign s;
  s.n = d.n_rows();
  const auto nd = static_cast<double>(s.n);
  for (std::size_t j = 0; j < d.n_cols(); ++j) {
    const auto col = d.column(j);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / nd;
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / nd);
    std::vector<double> z(col.size());
    if (!(sd > 1e-12 * (1.0 + std::abs(mean)))) {
      sd = 1.0;  // constant column: all zeros after centering, never enters
      std::fill(z.begin(), z.end(), 0.0);
    } else {
      for (std::size_t i = 0; i < col.size(); ++i) z[i] = (col[i] - mean) / sd;
    }
    s.x.push_back(std::move(z));
    s.center.push_back(mean);
    s.scale.push_back(sd);
  }
  return s;
}

// Weighted elastic-net coordinate descent on a standardized design.
class CoordinateDescent {
 public:
  explicit CoordinateDescent(const StandardizedDesign& design)
      : beta(design.x.size(), 0.0), x_(design) {}

  std::vector<double> beta;
  double intercept = 0.0;

  struct Result {
    std::size_t sweeps = 0;
    bool converged = false;
  };

  // Minimizes 1/(2n) sum w_i (z_i - b0 - x_i b)^2 + penalty. Empty `w` means
  // unit weights.
  Result solve(std::span<const double> z, std::span<const double> w, double lambda, double alpha,
               double tol, std::size_t max_sweeps) {
    const std::size_t n = x_.n, p = beta.size();
    const double nd = static_cast<double>(n);
    residual_.assign(z.begin(), z.end());
    for (std::size_t i = 0; i < n; ++i) residual_[i] -= intercept;
    for (std::size_t j = 0; j < p; ++j) {
      if (beta[j] == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) residual_[i] -= beta[j] * x_.x[j][i];
    }
    weights_.assign(n, 1.0);
    if (!w.empty()) weights_.assign(w.begin(), w.end());
    weight_sum_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    curvature_.assign(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) v += weights_[i] * x_.x[j][i] * x_.x[j][i];
      curvature_[j] = v / nd;
    }
    l1_ = lambda * alpha;
    l2_ = lambda * (1.0 - alpha);

    Result result;
    std::vector<std::size_t> all(p), active;
    std::iota(all.begin(), all.end(), std::size_t{0});
    while (result.sweeps < max_sweeps) {
      ++result.sweeps;
      if (sweep(all) < tol) {
        result.converged = true;
        break;
      }
      active.clear();
      for (std::size_t j = 0; j < p; ++j) {
        if (beta[j] != 0.0) active.push_back(j);
      }
      while (result.sweeps < max_sweeps) {
        ++result.sweeps;
        if (sweep(active) < tol) break;
      }
    }
    return result;
  }

  // Penalized objective at the current state (for monotonicity checks).
  double objective(std::span<const double> z, std::span<const double> w, double lambda,
                   double alpha) const {
    const std::size_t n = x_.n;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double fit = intercept;
      for (std::size_t j = 0; j < beta.size(); ++j) fit += beta[j] * x_.x[j][i];
      const double wi = w.empty() ? 1.0 : w[i];
      loss += wi * (z[i] - fit) * (z[i] - fit);
    }
    double l1 = 0.0, l2 = 0.0;
    for (double b : beta) {
      l1 += std::abs(b);
      l2 += b * b;
    }
    return loss / (2.0 * static_cast<double>(n)) + lambda * (alpha * l1 + 0.5 * (1.0 - alpha) * l2);
  }

 private:
  double sweep(const std::vector<std::size_t>& coords) {
    const std::size_t n = x_.n;
    const double nd = static_cast<double>(n);
    double max_change = 0.0;
    for (std::size_t j : coords) {
      if (curvature_[j] == 0.0) continue;
      const auto& xj = x_.x[j];
      double grad = 0.0;
      for (std::size_t i = 0; i < n; ++i) grad += weights_[i] * xj[i] * residual_[i];
      grad /= nd;
      const double old = beta[j];
      const double updated =
          soft_threshold(grad + curvature_[j] * old, l1_) / (curvature_[j] + l2_);
      if (updated != old) {
        const double delta = updated - old;
        for (std::size_t i = 0; i < n; ++i) residual_[i] -= delta * xj[i];
        beta[j] = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    double shift = 0.0;
    for (std::size_t i = 0; i < n; ++i) shift += weights_[i] * residual_[i];
    shift /= weight_sum_;
    if (shift != 0.0) {
      intercept += shift;
      for (std::size_t i = 0; i < n; ++i) residual_[i] -= shift;
      max_change = std::max(max_change, std::abs(shift));
    }
    return max_change;
  }

  const StandardizedDesign& x_;
  std::vector<double> residual_;
  std::vector<double> weights_;
  std::vector<double> curvature_;
  double weight_sum_ = 0.0;
  double l1_ = 0.0;
  double l2_ = 0.0;
};

inline RegularizedFit to_original_scale(const StandardizedDesign& s, const std::vector<std::string>& names,
                                        Family family, const CoordinateDescent& cd,
                                        PenaltySpec penalty, std::size_t iterations, bool converged) {
  RegularizedFit fit;
  fit.family = family;
  fit.feature_names = names;
  fit.penalty = penalty;
  fit.n_iterations = iterations;
  fit.converged = converged;
  fit.x_center = s.center;
  fit.x_scale = s.scale;
  fit.beta.resize(cd.beta.size());
  fit.intercept = cd.intercept;
  for (std::size_t j = 0; j < cd.beta.size(); ++j) {
    fit.beta[j] = cd.beta[j] / s.scale[j];
    fit.intercept -= fit.beta[j] * s.center[j];
  }
  return fit;
}

inline double clip(double p, double eps) { return std::clamp(p, eps, 1.0 - eps); }

// Unclipped, so that deviance keeps falling under separation and the
// coefficient cap can trip.
inline double binomial_deviance(std::span<const double> y, std::span<const double> eta) {
  double dev = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    dev += 2.0 * (std::log1p(std::exp(-std::abs(eta[i]))) + std::max(eta[i], 0.0) - y[i] * eta[i]);
  }
  return dev;
}

inline std::vector<double> linear_predictor(const StandardizedDesign& s, const CoordinateDescent& cd) {
  std::vector<double> eta(s.n, cd.intercept);
  for (std::size_t j = 0; j < cd.beta.size(); ++j) {
    if (cd.beta[j] == 0.0) continue;
    for (std::size_t i = 0; i < s.n; ++i) eta[i] += cd.beta[j] * s.x[j][i];
  }
  return eta;
}

struct SolveOutcome {
  std::size_t iterations = 0;
  bool converged = true;
};

inline SolveOutcome solve_gaussian(const StandardizedDesign& /*s*/, std::span<const double> y,
                                   PenaltySpec penalty, const SolverOptions& opts,
                                   CoordinateDescent& cd) {
  auto r = cd.solve(y, {}, penalty.lambda, penalty.alpha, opts.tol, opts.max_iter);
  return {r.sweeps, r.converged};
}

inline SolveOutcome solve_binomial(const StandardizedDesign& s, std::span<const double> y,
                                   PenaltySpec penalty, const SolverOptions& opts,
                                   CoordinateDescent& cd, bool cold_start) {
  const auto n = s.n;
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  if (ybar == 0.0 || ybar == 1.0) {
    std::fill(cd.beta.begin(), cd.beta.end(), 0.0);
    cd.intercept = logit(clip(ybar, opts.prob_clip));
    return {0, true};
  }
  if (cold_start) cd.intercept = logit(ybar);

  SolveOutcome out{0, false};
  std::vector<double> w(n), z(n);
  auto eta = linear_predictor(s, cd);
  double dev_old = binomial_deviance(y, eta);
  for (std::size_t outer = 0; outer < opts.max_outer && out.iterations < opts.max_iter; ++outer) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = clip(logistic(eta[i]), opts.prob_clip);
      w[i] = p * (1.0 - p);
      z[i] = eta[i] + (y[i] - p) / w[i];
    }
    auto r = cd.solve(z, w, penalty.lambda, penalty.alpha, opts.tol, opts.max_iter - out.iterations);
    out.iterations += r.sweeps;
    bool capped = false;
    for (double& b : cd.beta) {
      if (std::abs(b) > opts.coef_cap) {
        b = std::copysign(opts.coef_cap, b);
        capped = true;
      }
    }
    if (capped) {
      out.converged = false;
      break;
    }
    eta = linear_predictor(s, cd);
    const double dev = binomial_deviance(y, eta);
    // Purely relative: under separation the deviance keeps shrinking geometrically.
    if (r.converged && std::abs(dev - dev_old) <= opts.deviance_tol * dev) {
      out.converged = true;
      break;
    }
    dev_old = dev;
  }
  return out;
}

inline double max_abs_correlation(const StandardizedDesign& s, std::span<const double> y) {
  const double nd = static_cast<double>(s.n);
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / nd;
  double best = 0.0;
  for (const auto& xj : s.x) {
    double dot = 0.0;
    for (std::size_t i = 0; i < s.n; ++i) dot += xj[i] * (y[i] - ybar);
    best = std::max(best, std::abs(dot) / nd);
  }
  return best;
}

}  // namespace detail

// Smallest lambda at which every penalized coefficient is zero. For alpha = 0
// the bound is infinite; alpha = 0.001 stands in for the formula only.
// The value is inflated by a relative 1e-10 so the all-zero fit at lambda_max
// survives floating-point rounding in the IRLS working response.
inline double lambda_max(const Dataset& d, double alpha) {
  const auto s = detail::standardize_design(d);
  const double a = std::max(alpha, 1e-3);
  return detail::max_abs_correlation(s, d.y()) / a * (1.0 + 1e-10);
}

// Geometric grid from lambda_max down to lambda_max * ratio. The default
// ratio is 1e-4 when n > p, else 1e-2.
inline std::vector<double> lambda_path(const Dataset& d, double alpha, std::size_t n_lambda = 100,
                                       std::optional<double> ratio = std::nullopt) {
  if (n_lambda == 0) throw ConfigError("n_lambda must be positive");
  const double r = ratio.value_or(d.n_rows() > d.n_cols() ? 1e-4 : 1e-2);
  if (!(r > 0.0 && r < 1.0)) throw ConfigError("lambda ratio must lie in (0, 1)");
  const double top = lambda_max(d, alpha);
  std::vector<double> grid(n_lambda);
  if (n_lambda == 1) return {top};
  const double step = std::log(r) / static_cast<double>(n_lambda - 1);
  for (std::size_t i = 0; i < n_lambda; ++i) grid[i] = top * std::exp(step * static_cast<double>(i));
  grid.front() = top;
  return grid;
}

// Fits along `lambdas` (in the given order) with warm starts.
inline std::vector<RegularizedFit> fit_path(Family family, const Dataset& d, double alpha,
                                            std::span<const double> lambdas,
                                            const SolverOptions& opts = {}) {
  if (family == Family::kBinomial && !d.has_binary_target()) {
    throw DataError("binomial family needs a 0/1 target");
  }
  if (d.n_rows() == 0) throw DataError("cannot fit on an empty dataset");
  const auto s = detail::standardize_design(d);
  const auto y = d.y();
  detail::CoordinateDescent cd(s);
  if (family == Family::kGaussian) {
    cd.intercept = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(s.n);
  }
  std::vector<RegularizedFit> fits;
  fits.reserve(lambdas.size());
  bool cold = true;
  for (double lambda : lambdas) {
    const PenaltySpec penalty{alpha, lambda};
    penalty.validate();
    auto outcome = family == Family::kGaussian
                       ? detail::solve_gaussian(s, y, penalty, opts, cd)
                       : detail::solve_binomial(s, y, penalty, opts, cd, cold);
    cold = false;
    fits.push_back(detail::to_original_scale(s, d.names(), family, cd, penalty,
                                             outcome.iterations, outcome.converged));
  }
  return fits;
}

inline RegularizedFit fit_enet(Family family, const Dataset& d, PenaltySpec penalty,
                               const SolverOptions& opts = {}) {
  const double lambda[] = {penalty.lambda};
  return fit_path(family, d, penalty.alpha, lambda, opts).front();
}

inline RegularizedFit fit_enet_gaussian(const Dataset& d, PenaltySpec penalty,
                                        const SolverOptions& opts = {}) {
  return fit_enet(Family::kGaussian, d, penalty, opts);
}

inline RegularizedFit fit_enet_binomial(const Dataset& d, PenaltySpec penalty,
                                        const SolverOptions& opts = {}) {
  return fit_enet(Family::kBinomial, d, penalty, opts);
}

// Linear predictor on the original scale; columns are matched by name.
inline std::vector<double> linear_predictor(const RegularizedFit& fit, const Dataset& x) {
  std::vector<double> eta(x.n_rows(), fit.intercept);
  for (std::size_t j = 0; j < fit.feature_names.size(); ++j) {
    if (fit.beta[j] == 0.0) {
      x.index_of(fit.feature_names[j]);  // still enforce the schema
      continue;
    }
    const auto col = x.column(fit.feature_names[j]);
    for (std::size_t i = 0; i < eta.size(); ++i) eta[i] += fit.beta[j] * col[i];
  }
  return eta;
}

// Gaussian: b0 + X b. Binomial: logistic(b0 + X b).
inline std::vector<double> predict_glm(const RegularizedFit& fit, const Dataset& x) {
  auto eta = linear_predictor(fit, x);
  if (fit.family == Family::kBinomial) {
    for (double& e : eta) e = logistic(e);
  }
  return eta;
}

// Largest violation of the first-order optimality conditions, measured on
// the standardized scale with the exact loss gradient.
inline double kkt_residual(const RegularizedFit& fit, const Dataset& d) {
  const auto y = d.y();
  const auto mu = predict_glm(fit, d);
  const double nd = static_cast<double>(d.n_rows());
  const double l1 = fit.penalty.lambda * fit.penalty.alpha;
  const double l2 = fit.penalty.lambda * (1.0 - fit.penalty.alpha);
  const auto bstd = fit.standardized_beta();
  double worst = 0.0;
  for (std::size_t j = 0; j < fit.beta.size(); ++j) {
    const auto col = d.column(fit.feature_names[j]);
    if (fit.x_scale[j] == 1.0 &&
        std::all_of(col.begin(), col.end(), [&](double v) { return v == col[0]; })) {
      continue;
    }
    double grad = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i) {
      grad += (col[i] - fit.x_center[j]) / fit.x_scale[j] * (y[i] - mu[i]);
    }
    grad /= nd;
    const double violation =
        bstd[j] == 0.0 ? std::max(0.0, std::abs(grad) - l1)
                       : std::abs(grad - l1 * (bstd[j] > 0 ? 1.0 : -1.0) - l2 * bstd[j]);
    worst = std::max(worst, violation);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

enum class CvMeasure { kAuc, kMse };

struct CvOptions {
  std::size_t n_lambda = 100;
  std::optional<double> ratio;
  SolverOptions solver;
};

struct CvResult {
  CvMeasure measure = CvMeasure::kAuc;
  double alpha = 1.0;
  std::vector<double> lambda_grid;
  std::vector<double> mean_metric;
  std::vector<double> se_metric;
  // per_fold_metrics[fold][lambda]; NaN where undefined.
  std::vector<std::vector<double>> per_fold_metrics;
  std::size_t best_index = 0;
  double best_lambda = 0.0;
  std::vector<std::string> warnings;
};

// For each lambda on the full-data grid, fits on k-1 folds (warm-started
// along the path) and scores the held-out fold. Best lambda: max mean AUC or
// min mean MSE; ties go to the larger lambda.
inline CvResult cv_glmnet(const Dataset& d, Family family, double alpha, const FoldAssignment& folds,
                          CvMeasure measure, const CvOptions& opts = {}) {
  if (folds.fold_of_row.size() != d.n_rows()) throw ConfigError("fold assignment does not match dataset");
  if (measure == CvMeasure::kAuc && family != Family::kBinomial) {
    throw ConfigError("AUC measure requires the binomial family");
  }
  CvResult cv;
  cv.measure = measure;
  cv.alpha = alpha;
  cv.lambda_grid = lambda_path(d, alpha, opts.n_lambda, opts.ratio);
  const std::size_t L = cv.lambda_grid.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  cv.per_fold_metrics.assign(folds.k, std::vector<double>(L, nan));

  for (std::size_t f = 0; f < folds.k; ++f) {
    const auto fit_rows = folds.rows_outside(f);
    const auto held_rows = folds.rows_in(f);
    const auto train = d.rows(fit_rows);
    const auto held = d.rows(held_rows);
    if (measure == CvMeasure::kAuc) {
      const auto y = held.y();
      const bool one_class =
          std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
      if (one_class) {
        cv.warnings.push_back("fold " + std::to_string(f) +
                              " has a single class; AUC undefined, fold excluded");
        continue;
      }
    }
    const auto fits = fit_path(family, train, alpha, cv.lambda_grid, opts.solver);
    for (std::size_t l = 0; l < L; ++l) {
      const auto pred = predict_glm(fits[l], held);
      cv.per_fold_metrics[f][l] = measure == CvMeasure::kAuc ? metrics::auc(held.y(), pred)
                                                             : metrics::mse(held.y(), pred);
    }
  }

  cv.mean_metric.assign(L, nan);
  cv.se_metric.assign(L, nan);
  for (std::size_t l = 0; l < L; ++l) {
    std::vector<double> values;
    for (std::size_t f = 0; f < folds.k; ++f) {
      if (!std::isnan(cv.per_fold_metrics[f][l])) values.push_back(cv.per_fold_metrics[f][l]);
    }
    if (values.empty()) continue;
    cv.mean_metric[l] = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    cv.se_metric[l] = values.size() > 1 ? sample_std(values) / std::sqrt(double(values.size())) : 0.0;
  }
  std::optional<std::size_t> best;
  for (std::size_t l = 0; l < L; ++l) {
    if (std::isnan(cv.mean_metric[l])) continue;
    if (!best) {
      best = l;
      continue;
    }
    const bool better = measure == CvMeasure::kAuc ? cv.mean_metric[l] > cv.mean_metric[*best]
                                                   : cv.mean_metric[l] < cv.mean_metric[*best];
    if (better) best = l;
  }
  if (!best) throw ModelError("cross-validation produced no defined metric");
  cv.best_index = *best;
  cv.best_lambda = cv.lambda_grid[*best];
  return cv;
}

// Refit on all of `d` along the CV grid down to the selected lambda.
inline RegularizedFit refit_at_best(Family family, const Dataset& d, const CvResult& cv,
                                    const SolverOptions& opts = {}) {
  std::span<const double> grid(cv.lambda_grid.data(), cv.best_index + 1);
  return fit_path(family, d, cv.alpha, grid, opts).back();
}

// ---------------------------------------------------------------------------
// Feature selection
// ---------------------------------------------------------------------------

struct SelectedFeature {
  std::string name;
  double magnitude = 0.0;  // |coefficient| on the standardized scale
};

struct FeatureSelection {
  Method method = Method::kLasso;
  std::vector<SelectedFeature> selected;  // descending magnitude

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& s : selected) out.push_back(s.name);
    return out;
  }
};

inline constexpr std::size_t kDefaultRidgeTopM = 10;

// Lasso / elastic net keep every non-zero coefficient. Ridge zeroes nothing,
// so it keeps the top_m largest standardized coefficients.
inline FeatureSelection select_features(const RegularizedFit& fit,
                                        std::optional<std::size_t> top_m = std::nullopt) {
  FeatureSelection sel;
  sel.method = method_of(fit.penalty.alpha);
  const auto bstd = fit.standardized_beta();
  for (std::size_t j = 0; j < bstd.size(); ++j) {
    if (bstd[j] != 0.0) sel.selected.push_back({fit.feature_names[j], std::abs(bstd[j])});
  }
  std::stable_sort(sel.selected.begin(), sel.selected.end(),
                   [](const SelectedFeature& a, const SelectedFeature& b) {
                     return a.magnitude > b.magnitude;
                   });
  if (sel.method == Method::kRidge) {
    const std::size_t m = top_m.value_or(kDefaultRidgeTopM);
    if (sel.selected.size() > m) sel.selected.resize(m);
  }
  if (sel.selected.empty()) {
    throw SelectionError(std::string(method_name(sel.method)) +
                         ": every coefficient is zero at lambda = " +
                         std::to_string(fit.penalty.lambda) + "; use a smaller lambda");
  }
  return sel;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::ordered_json& j, const RegularizedFit& fit) {
  nlohmann::ordered_json coef = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < fit.beta.size(); ++k) coef[fit.feature_names[k]] = fit.beta[k];
  j = nlohmann::ordered_json{{"family", family_name(fit.family)},
                             {"alpha", fit.penalty.alpha},
                             {"lambda", fit.penalty.lambda},
                             {"intercept", fit.intercept},
                             {"coefficients", std::move(coef)},
                             {"n_iterations", fit.n_iterations},
                             {"converged", fit.converged}};
}

inline void to_json(nlohmann::ordered_json& j, const CvResult& cv) {
  auto nullable = [](const std::vector<double>& v) {
    auto arr = nlohmann::ordered_json::array();
    for (double x : v) arr.push_back(std::isnan(x) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(x));
    return arr;
  };
  auto folds = nlohmann::ordered_json::array();
  for (const auto& f : cv.per_fold_metrics) folds.push_back(nullable(f));
  j = nlohmann::ordered_json{{"measure", cv.measure == CvMeasure::kAuc ? "auc" : "mse"},
                             {"alpha", cv.alpha},
                             {"lambda", cv.lambda_grid},
                             {"mean", nullable(cv.mean_metric)},
                             {"se", nullable(cv.se_metric)},
                             {"per_fold", std::move(folds)},
                             {"best_lambda", cv.best_lambda},
                             {"best_index", cv.best_index},
                             {"warnings", cv.warnings}};
}

inline void to_json(nlohmann::ordered_json& j, const FeatureSelection& sel) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : sel.selected) arr.push_back({{"name", s.name}, {"magnitude", s.magnitude}});
  j = nlohmann::ordered_json{{"method", method_name(sel.method)}, {"selected", std::move(arr)}};
}

}  // namespace hybridml::glm

#endif  // HYBRIDML_REGPATH_HPP_
