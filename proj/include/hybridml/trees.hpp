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

#ifndef HYBRIDML_TREES_HPP_
#define HYBRIDML_TREES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hybridml/dataframe.hpp"
#include "hybridml/errors.hpp"
#include "hybridml/metrics.hpp"
#include "hybridml/random.hpp"
#include "hybridml/regpath.hpp"
#include "json.hpp"

namespace hybridml::trees {

struct Node {
  int feature = -1;        // -1 marks a leaf
  double threshold = 0.0;  // rows with x <= threshold go left
  int left = -1;
  int right = -1;
  double value = 0.0;      // leaf weight
  double gain = 0.0;       // split gain (internal nodes)
  std::size_t n_rows = 0;

  bool is_leaf() const { return feature < 0; }
};

using ColumnViews = std::vector<std::span<const double>>;

struct Tree {
  std::vector<Node> nodes;

  const Node& leaf_for(const ColumnViews& cols, std::size_t row) const {
    std::size_t k = 0;
    while (!nodes[k].is_leaf()) {
      const auto& n = nodes[k];
      k = static_cast<std::size_t>(cols[static_cast<std::size_t>(n.feature)][row] <= n.threshold ? n.left : n.right);
    }
    return nodes[k];
  }

  double eval(const ColumnViews& cols, std::size_t row) const { return leaf_for(cols, row).value; }

  std::size_t n_leaves() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.is_leaf(); }));
  }

  std::size_t depth() const {
    if (nodes.empty()) return 0;
    std::vector<std::size_t> d(nodes.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      deepest = std::max(deepest, d[k]);
      if (!nodes[k].is_leaf()) {
        d[static_cast<std::size_t>(nodes[k].left)] = d[k] + 1;
        d[static_cast<std::size_t>(nodes[k].right)] = d[k] + 1;
      }
    }
    return deepest;
  }
};

// Columns of `d` in `names` order; throws SchemaError on a missing name.
inline ColumnViews columns_by_name(const Dataset& d, const std::vector<std::string>& names) {
  ColumnViews cols;
  cols.reserve(names.size());
  for (const auto& name : names) cols.push_back(d.column(name));
  return cols;
}

// Feature columns plus each feature's row order sorted by value (stable in
// row index).
struct TrainingData {
  ColumnViews cols;
  std::size_t n_rows = 0;
  std::vector<std::vector<std::uint32_t>> sorted;

  explicit TrainingData(const Dataset& d) : n_rows(d.n_rows()) {
    for (std::size_t j = 0; j < d.n_cols(); ++j) {
      cols.push_back(d.column(j));
      std::vector<std::uint32_t> order(n_rows);
      std::iota(order.begin(), order.end(), 0u);
      const auto col = cols.back();
      std::stable_sort(order.begin(), order.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
      sorted.push_back(std::move(order));
    }
  }
};

inline double split_threshold(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return (mid > lo && mid < hi) ? mid : lo;
}

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
  std::size_t n_left = 0;
};

inline double structure_score(double g, double h, double l2) { return g * g / (h + l2); }

inline double split_gain(double gl, double hl, double gr, double hr, double l2) {
  return 0.5 * (structure_score(gl, hl, l2) + structure_score(gr, hr, l2) -
                structure_score(gl + gr, hl + hr, l2));
}

// Exact greedy scan of one feature within a node. `sorted_rows` are the
// node's rows ordered by `values`. Candidates sit at midpoints between
// consecutive distinct values; the first (lowest-threshold) maximum wins.
inline std::optional<SplitCandidate> best_split(std::span<const std::uint32_t> sorted_rows,
                                                std::span<const double> values,
                                                std::span<const double> gradients,
                                                std::span<const double> hessians, double l2,
                                                std::size_t min_leaf) {
  const std::size_t n = sorted_rows.size();
  min_leaf = std::max<std::size_t>(min_leaf, 1);
  if (n < 2 * min_leaf) return std::nullopt;
  double g_total = 0.0, h_total = 0.0;
  for (auto r : sorted_rows) {
    g_total += gradients[r];
    h_total += hessians[r];
  }
  std::optional<SplitCandidate> best;
  double gl = 0.0, hl = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto r = sorted_rows[i];
    gl += gradients[r];
    hl += hessians[r];
    const double x = values[r], x_next = values[sorted_rows[i + 1]];
    if (!(x < x_next)) continue;
    const std::size_t n_left = i + 1;
    if (n_left < min_leaf || n - n_left < min_leaf) continue;
    const double gain = split_gain(gl, hl, g_total - gl, h_total - hl, l2);
    if (gain > (best ? best->gain : 0.0)) best = SplitCandidate{0, split_threshold(x, x_next), gain, n_left};
  }
  return best;
}

// ---------------------------------------------------------------------------
// Boosting
// ---------------------------------------------------------------------------

enum class Growth { kDepthWise, kLeafWise, kSymmetric };
enum class Loss { kLogistic, kSquared };

inline const char* growth_name(Growth g) {
  switch (g) {
    case Growth::kDepthWise: return "depth_wise";
    case Growth::kLeafWise: return "leaf_wise";
    case Growth::kSymmetric: return "symmetric";
  }
  return "?";
}

struct GbtConfig {
  std::size_t n_trees = 100;  // 0 and learning_rate 0 both give the base score
  std::size_t max_depth = 6;  // 0 = unlimited (leaf-wise only)
  double learning_rate = 0.1;
  double l2_leaf_reg = 0.0;
  Growth growth = Growth::kDepthWise;
  std::size_t num_leaves = 31;
  std::size_t min_samples_leaf = 1;
  Loss loss = Loss::kSquared;
  // First-order leaf weights: the hessian of every row is taken as 1, so H is
  // the row count.
  bool first_order = false;
  std::uint64_t seed = 0;

  void validate() const {
    if (max_depth < 1 && growth != Growth::kLeafWise) throw ConfigError("gbt: max_depth must be >= 1");
    if (!(learning_rate >= 0.0 && learning_rate <= 1.0)) throw ConfigError("gbt: learning_rate must lie in [0, 1]");
    if (!(l2_leaf_reg >= 0.0)) throw ConfigError("gbt: l2_leaf_reg must be >= 0");
    if (growth == Growth::kLeafWise && num_leaves < 2) throw ConfigError("gbt: num_leaves must be >= 2");
    if (min_samples_leaf < 1) throw ConfigError("gbt: min_samples_leaf must be >= 1");
  }
};

inline constexpr double kHessianFloor = 1e-12;

namespace detail {

struct GrowParams {
  Growth growth = Growth::kDepthWise;
  std::size_t max_depth = 6;
  std::size_t num_leaves = 31;
  std::size_t min_leaf = 1;
  double l2 = 0.0;
};

// Grows second-order regression trees on a fixed training set. Each node
// owns a contiguous segment of every per-feature sorted row list; splitting a
// node stable-partitions those segments, so no re-sorting happens below the
// root.
class TreeGrower {
 public:
  explicit TreeGrower(const TrainingData& data)
      : data_(data), lists_(data.sorted), go_left_(data.n_rows, 0), scratch_(data.n_rows) {}

  Tree grow(std::span<const double> g, std::span<const double> h, const GrowParams& params) {
    g_ = g;
    h_ = h;
    params_ = params;
    for (std::size_t f = 0; f < lists_.size(); ++f) lists_[f] = data_.sorted[f];
    if (params.growth == Growth::kSymmetric) return grow_symmetric();
    return params.growth == Growth::kLeafWise ? grow_leaf_wise() : grow_depth_wise();
  }

 private:
  struct Open {
    int node;
    std::size_t begin, end, depth;
    double g, h;
    std::optional<SplitCandidate> split;
  };

  std::span<const std::uint32_t> segment(std::size_t f, std::size_t begin, std::size_t end) const {
    return std::span<const std::uint32_t>(lists_[f]).subspan(begin, end - begin);
  }

  bool depth_allows(std::size_t depth) const {
    return params_.max_depth == 0 || depth < params_.max_depth;
  }

  std::optional<SplitCandidate> find_split(const Open& o) const {
    if (!depth_allows(o.depth) || lists_.empty()) return std::nullopt;
    std::optional<SplitCandidate> best;
    for (std::size_t f = 0; f < lists_.size(); ++f) {
      auto c = best_split(segment(f, o.begin, o.end), data_.cols[f], g_, h_, params_.l2, params_.min_leaf);
      if (c && (!best || c->gain > best->gain)) {
        c->feature = f;
        best = c;
      }
    }
    return best;
  }

  Open make_open(Tree& tree, std::size_t begin, std::size_t end, std::size_t depth) {
    Open o{static_cast<int>(tree.nodes.size()), begin, end, depth, 0.0, 0.0, std::nullopt};
    for (auto r : segment(0, begin, end)) {
      o.g += g_[r];
      o.h += h_[r];
    }
    Node node;
    node.n_rows = end - begin;
    node.value = -o.g / (o.h + params_.l2);
    tree.nodes.push_back(node);
    return o;
  }

  // Turns `o` into an internal node; returns the two children.
  std::pair<Open, Open> split(Tree& tree, const Open& o) {
    const auto& s = *o.split;
    const auto col = data_.cols[s.feature];
    for (auto r : segment(0, o.begin, o.end)) go_left_[r] = col[r] <= s.threshold;
    for (auto& list : lists_) {
      std::size_t left = o.begin, right = 0;
      for (std::size_t i = o.begin; i < o.end; ++i) {
        const auto r = list[i];
        if (go_left_[r]) list[left++] = r;
        else scratch_[right++] = r;
      }
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(right),
                list.begin() + static_cast<std::ptrdiff_t>(left));
    }
    const std::size_t mid = o.begin + s.n_left;
    auto& node = tree.nodes[static_cast<std::size_t>(o.node)];
    node.feature = static_cast<int>(s.feature);
    node.threshold = s.threshold;
    node.gain = s.gain;
    Open left = make_open(tree, o.begin, mid, o.depth + 1);
    Open right = make_open(tree, mid, o.end, o.depth + 1);
    tree.nodes[static_cast<std::size_t>(o.node)].left = left.node;
    tree.nodes[static_cast<std::size_t>(o.node)].right = right.node;
    return {left, right};
  }

  Tree grow_depth_wise() {
    Tree tree;
    std::vector<Open> level{make_open(tree, 0, data_.n_rows, 0)};
    while (!level.empty()) {
      std::vector<Open> next;
      for (auto& o : level) {
        o.split = find_split(o);
        if (!o.split) continue;
        auto [l, r] = split(tree, o);
        next.push_back(l);
        next.push_back(r);
      }
      level = std::move(next);
    }
    return tree;
  }

  Tree grow_leaf_wise() {
    Tree tree;
    std::vector<Open> open{make_open(tree, 0, data_.n_rows, 0)};
    open.back().split = find_split(open.back());
    std::size_t leaves = 1;
    while (leaves < params_.num_leaves) {
      std::optional<std::size_t> pick;
      for (std::size_t i = 0; i < open.size(); ++i) {
        if (!open[i].split) continue;
        if (!pick || open[i].split->gain > open[*pick].split->gain) pick = i;
      }
      if (!pick) break;
      const Open o = open[*pick];
      open.erase(open.begin() + static_cast<std::ptrdiff_t>(*pick));
      auto [l, r] = split(tree, o);
      l.split = find_split(l);
      r.split = find_split(r);
      open.push_back(l);
      open.push_back(r);
      ++leaves;
    }
    return tree;
  }

  // Every node of a level is tested against one shared (feature, threshold);
  // the level's gain is the sum of the positive per-node gains. Nodes whose
  // own gain is not positive stay leaves.
  Tree grow_symmetric() {
    const std::size_t n = data_.n_rows;
    const double l2 = params_.l2;
    const std::size_t min_leaf = std::max<std::size_t>(params_.min_leaf, 1);
    Tree tree;
    Node root;
    root.n_rows = n;
    tree.nodes.push_back(root);
    std::vector<int> level{0};
    std::vector<int> slot_of_row(n, 0);

    struct Totals {
      double g = 0.0, h = 0.0;
      std::size_t count = 0;
    };
    auto term = [&](const Totals& t, double gl, double hl, std::size_t nl) {
      const std::size_t nr = t.count - nl;
      if (nl < min_leaf || nr < min_leaf) return 0.0;
      return std::max(0.0, split_gain(gl, hl, t.g - gl, t.h - hl, l2));
    };

    for (std::size_t depth = 0; depth_allows(depth) && !level.empty(); ++depth) {
      const std::size_t k = level.size();
      std::vector<Totals> totals(k);
      for (std::size_t r = 0; r < n; ++r) {
        if (slot_of_row[r] < 0) continue;
        auto& t = totals[static_cast<std::size_t>(slot_of_row[r])];
        t.g += g_[r];
        t.h += h_[r];
        ++t.count;
      }
      std::optional<SplitCandidate> best;
      std::vector<double> gl(k), hl(k), terms(k);
      std::vector<std::size_t> nl(k);
      for (std::size_t f = 0; f < data_.cols.size(); ++f) {
        std::fill(gl.begin(), gl.end(), 0.0);
        std::fill(hl.begin(), hl.end(), 0.0);
        std::fill(terms.begin(), terms.end(), 0.0);
        std::fill(nl.begin(), nl.end(), 0);
        double total = 0.0;
        const auto& order = data_.sorted[f];
        const auto col = data_.cols[f];
        for (std::size_t i = 0; i + 1 < n; ++i) {
          const auto r = order[i];
          const int slot = slot_of_row[r];
          if (slot >= 0) {
            const auto s = static_cast<std::size_t>(slot);
            gl[s] += g_[r];
            hl[s] += h_[r];
            ++nl[s];
            total -= terms[s];
            terms[s] = term(totals[s], gl[s], hl[s], nl[s]);
            total += terms[s];
          }
          const double x = col[r], x_next = col[order[i + 1]];
          if (x < x_next && total > (best ? best->gain : 0.0)) {
            best = SplitCandidate{f, split_threshold(x, x_next), total, 0};
          }
        }
      }
      if (!best) break;

      const auto col = data_.cols[best->feature];
      std::fill(gl.begin(), gl.end(), 0.0);
      std::fill(hl.begin(), hl.end(), 0.0);
      std::fill(nl.begin(), nl.end(), 0);
      for (std::size_t r = 0; r < n; ++r) {
        if (slot_of_row[r] < 0 || !(col[r] <= best->threshold)) continue;
        const auto s = static_cast<std::size_t>(slot_of_row[r]);
        gl[s] += g_[r];
        hl[s] += h_[r];
        ++nl[s];
      }
      std::vector<int> next;
      std::vector<int> remap(k, -1);  // slot -> first child slot in `next`
      for (std::size_t s = 0; s < k; ++s) {
        const double gain = term(totals[s], gl[s], hl[s], nl[s]);
        auto& node = tree.nodes[static_cast<std::size_t>(level[s])];
        node.value = -totals[s].g / (totals[s].h + l2);
        if (!(gain > 0.0)) continue;
        node.feature = static_cast<int>(best->feature);
        node.threshold = best->threshold;
        node.gain = gain;
        Node left, right;
        left.n_rows = nl[s];
        left.value = -gl[s] / (hl[s] + l2);
        right.n_rows = totals[s].count - nl[s];
        right.value = -(totals[s].g - gl[s]) / (totals[s].h - hl[s] + l2);
        node.left = static_cast<int>(tree.nodes.size());
        node.right = node.left + 1;
        tree.nodes.push_back(left);
        tree.nodes.push_back(right);
        remap[s] = static_cast<int>(next.size());
        next.push_back(tree.nodes[static_cast<std::size_t>(level[s])].left);
        next.push_back(tree.nodes[static_cast<std::size_t>(level[s])].right);
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (slot_of_row[r] < 0) continue;
        const int base = remap[static_cast<std::size_t>(slot_of_row[r])];
        slot_of_row[r] = base < 0 ? -1 : base + (col[r] <= best->threshold ? 0 : 1);
      }
      level = std::move(next);
    }
    if (tree.nodes.size() == 1) {
      double g = 0.0, h = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        g += g_[r];
        h += h_[r];
      }
      tree.nodes[0].value = -g / (h + l2);
    }
    return tree;
  }

  const TrainingData& data_;
  std::vector<std::vector<std::uint32_t>> lists_;
  std::vector<std::uint8_t> go_left_;
  std::vector<std::uint32_t> scratch_;
  std::span<const double> g_, h_;
  GrowParams params_;
};

}  // namespace detail

struct GbtModel {
  double base_score = 0.0;
  std::vector<Tree> trees;
  GbtConfig config;
  std::vector<std::string> feature_names;
  bool degenerate = false;  // single-class logistic target: base score only

  std::vector<double> raw_scores(const Dataset& x) const {
    const auto cols = columns_by_name(x, feature_names);
    std::vector<double> raw(x.n_rows(), base_score);
    for (const auto& tree : trees) {
      for (std::size_t i = 0; i < raw.size(); ++i) raw[i] += config.learning_rate * tree.eval(cols, i);
    }
    return raw;
  }

  // Probabilities for the logistic loss, values for the squared loss.
  std::vector<double> predict(const Dataset& x) const {
    auto raw = raw_scores(x);
    if (config.loss == Loss::kLogistic) {
      for (double& r : raw) r = glm::logistic(r);
    }
    return raw;
  }
};

inline double training_loss(Loss loss, std::span<const double> y, std::span<const double> raw) {
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (loss == Loss::kSquared) {
      total += (y[i] - raw[i]) * (y[i] - raw[i]);
    } else {
      // log(1 + exp(-m)) with m = (2y - 1) * raw, computed stably.
      const double m = (2.0 * y[i] - 1.0) * raw[i];
      total += m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
    }
  }
  return total;
}

// Newton boosting: per round, gradients and hessians of the loss at the
// current raw scores, one tree, leaf weights -G / (H + l2), raw scores moved
// by learning_rate * tree. `loss_trace`, if given, receives the training loss
// before the first round and after every round.
inline GbtModel fit_gbdt(const Dataset& train, const GbtConfig& config,
                         std::vector<double>* loss_trace = nullptr) {
  config.validate();
  if (train.n_rows() == 0) throw DataError("gbt: empty training set");
  const auto y = train.y();
  const std::size_t n = train.n_rows();
  GbtModel model;
  model.config = config;
  model.feature_names = train.names();
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  if (config.loss == Loss::kLogistic) {
    if (!train.has_binary_target()) throw DataError("gbt: logistic loss needs a 0/1 target");
    if (ybar == 0.0 || ybar == 1.0) {
      model.base_score = glm::logit(std::clamp(ybar, 1e-5, 1.0 - 1e-5));
      model.degenerate = true;
      return model;
    }
    model.base_score = glm::logit(ybar);
  } else {
    model.base_score = ybar;
  }

  const TrainingData data(train);
  detail::TreeGrower grower(data);
  const detail::GrowParams params{config.growth, config.max_depth, config.num_leaves,
                                  config.min_samples_leaf, config.l2_leaf_reg};
  std::vector<double> raw(n, model.base_score), g(n), h(n);
  if (loss_trace) loss_trace->assign(1, training_loss(config.loss, y, raw));
  model.trees.reserve(config.n_trees);
  for (std::size_t t = 0; t < config.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (config.loss == Loss::kSquared) {
        g[i] = raw[i] - y[i];
        h[i] = 1.0;
      } else {
        const double p = glm::logistic(raw[i]);
        g[i] = p - y[i];
        h[i] = config.first_order ? 1.0 : std::max(p * (1.0 - p), kHessianFloor);
      }
    }
    model.trees.push_back(grower.grow(g, h, params));
    const auto& tree = model.trees.back();
    for (std::size_t i = 0; i < n; ++i) raw[i] += config.learning_rate * tree.eval(data.cols, i);
    if (loss_trace) loss_trace->push_back(training_loss(config.loss, y, raw));
  }
  return model;
}

// ---------------------------------------------------------------------------
// Random forest
// ---------------------------------------------------------------------------

struct ForestConfig {
  std::size_t n_trees = 500;
  std::size_t mtry = 0;  // 0: sqrt(p) for classification, p / 3 for regression
  std::size_t min_samples_leaf = 1;
  std::size_t max_depth = 0;  // 0 = unlimited
  bool bootstrap = true;
  std::optional<bool> classification;  // default: inferred from a 0/1 target
  std::uint64_t seed = 0;
};

struct ForestModel {
  std::vector<Tree> trees;
  std::vector<std::vector<std::uint32_t>> bootstrap_rows;  // per tree, sorted
  ForestConfig config;
  std::size_t mtry = 0;
  bool classification = false;
  std::vector<std::string> feature_names;

  // Mean over trees of leaf class-1 frequencies (classification) or leaf means.
  std::vector<double> predict(const Dataset& x) const {
    const auto cols = columns_by_name(x, feature_names);
    std::vector<double> out(x.n_rows(), 0.0);
    if (trees.empty()) return out;
    for (const auto& tree : trees) {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += tree.eval(cols, i);
    }
    for (double& v : out) v /= static_cast<double>(trees.size());
    return out;
  }
};

namespace detail {

// CART on a (possibly bootstrapped) sample. Gini decrease for 0/1 targets is
// exactly twice the squared-error decrease, so one scan serves both.
class CartGrower {
 public:
  CartGrower(const TrainingData& data, std::span<const double> y, bool classification,
             std::size_t mtry, std::size_t min_leaf, std::size_t max_depth)
      : data_(data), y_(y), classification_(classification), mtry_(mtry),
        min_leaf_(std::max<std::size_t>(min_leaf, 1)), max_depth_(max_depth),
        go_left_(data.n_rows, 0) {}

  Tree grow(const std::vector<std::uint32_t>& counts, Rng& rng) {
    const std::size_t p = data_.cols.size();
    std::size_t total = 0;
    for (auto c : counts) total += c;
    lists_.assign(p, {});
    for (std::size_t f = 0; f < p; ++f) {
      lists_[f].reserve(total);
      for (auto r : data_.sorted[f]) lists_[f].insert(lists_[f].end(), counts[r], r);
    }
    scratch_.resize(total);
    features_.resize(p);
    Tree tree;
    struct Open { int node; std::size_t begin, end, depth; };
    std::vector<Open> stack{{make_node(tree, 0, total), 0, total, 0}};
    while (!stack.empty()) {
      const Open o = stack.back();
      stack.pop_back();
      if (max_depth_ != 0 && o.depth >= max_depth_) continue;
      auto s = find_split(o.begin, o.end, rng);
      if (!s) continue;
      const auto col = data_.cols[s->feature];
      for (std::size_t i = o.begin; i < o.end; ++i) {
        const auto r = lists_[0][i];
        go_left_[r] = col[r] <= s->threshold;
      }
      for (auto& list : lists_) {
        std::size_t left = o.begin, right = 0;
        for (std::size_t i = o.begin; i < o.end; ++i) {
          const auto r = list[i];
          if (go_left_[r]) list[left++] = r;
          else scratch_[right++] = r;
        }
        std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(right),
                  list.begin() + static_cast<std::ptrdiff_t>(left));
      }
      const std::size_t mid = o.begin + s->n_left;
      auto& node = tree.nodes[static_cast<std::size_t>(o.node)];
      node.feature = static_cast<int>(s->feature);
      node.threshold = s->threshold;
      node.gain = s->gain;
      const int left = make_node(tree, o.begin, mid);
      const int right = make_node(tree, mid, o.end);
      tree.nodes[static_cast<std::size_t>(o.node)].left = left;
      tree.nodes[static_cast<std::size_t>(o.node)].right = right;
      stack.push_back({right, mid, o.end, o.depth + 1});
      stack.push_back({left, o.begin, mid, o.depth + 1});
    }
    return tree;
  }

 private:
  int make_node(Tree& tree, std::size_t begin, std::size_t end) {
    Node node;
    node.n_rows = end - begin;
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += y_[lists_[0][i]];
    node.value = end > begin ? sum / static_cast<double>(end - begin) : 0.0;
    tree.nodes.push_back(node);
    return static_cast<int>(tree.nodes.size() - 1);
  }

  std::optional<SplitCandidate> find_split(std::size_t begin, std::size_t end, Rng& rng) {
    const std::size_t n = end - begin;
    if (n < 2 * min_leaf_) return std::nullopt;
    double lo = INFINITY, hi = -INFINITY, sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = y_[lists_[0][i]];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    if (lo == hi) return std::nullopt;  // pure node

    // mtry features without replacement, scanned in index order.
    std::iota(features_.begin(), features_.end(), std::size_t{0});
    for (std::size_t i = 0; i < mtry_; ++i) {
      std::swap(features_[i], features_[i + rng.index(features_.size() - i)]);
    }
    std::vector<std::size_t> chosen(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(mtry_));
    std::sort(chosen.begin(), chosen.end());

    const double parent = sum * sum / static_cast<double>(n);
    std::optional<SplitCandidate> best;
    for (std::size_t f : chosen) {
      const auto col = data_.cols[f];
      const auto& list = lists_[f];
      double left_sum = 0.0;
      for (std::size_t i = begin; i + 1 < end; ++i) {
        const auto r = list[i];
        left_sum += y_[r];
        const double x = col[r], x_next = col[list[i + 1]];
        if (!(x < x_next)) continue;
        const std::size_t nl = i + 1 - begin, nr = n - nl;
        if (nl < min_leaf_ || nr < min_leaf_) continue;
        const double right_sum = sum - left_sum;
        double gain = left_sum * left_sum / static_cast<double>(nl) +
                      right_sum * right_sum / static_cast<double>(nr) - parent;
        if (classification_) gain *= 2.0;
        if (gain > (best ? best->gain : 0.0)) best = SplitCandidate{f, split_threshold(x, x_next), gain, nl};
      }
    }
    return best;
  }

  const TrainingData& data_;
  std::span<const double> y_;
  bool classification_;
  std::size_t mtry_, min_leaf_, max_depth_;
  std::vector<std::vector<std::uint32_t>> lists_;
  std::vector<std::uint8_t> go_left_;
  std::vector<std::uint32_t> scratch_;
  std::vector<std::size_t> features_;
};

}  // namespace detail

inline std::size_t default_mtry(std::size_t p, bool classification) {
  if (p == 0) return 0;
  const auto m = classification ? static_cast<std::size_t>(std::floor(std::sqrt(double(p))))
                                : p / 3;
  return std::clamp<std::size_t>(m, 1, p);
}

inline ForestModel fit_random_forest(const Dataset& train, const ForestConfig& config) {
  const std::size_t p = train.n_cols();
  const std::size_t n = train.n_rows();
  if (n == 0 || p == 0) throw DataError("forest: empty training set");
  if (config.n_trees < 1) throw ConfigError("forest: n_trees must be >= 1");
  ForestModel model;
  model.config = config;
  model.feature_names = train.names();
  model.classification = config.classification.value_or(train.has_binary_target());
  if (model.classification && !train.has_binary_target()) {
    throw DataError("forest: classification needs a 0/1 target");
  }
  model.mtry = config.mtry == 0 ? default_mtry(p, model.classification) : config.mtry;
  if (model.mtry > p) {
    throw ConfigError("forest: mtry = " + std::to_string(model.mtry) + " exceeds p = " + std::to_string(p));
  }
  const TrainingData data(train);
  detail::CartGrower grower(data, train.y(), model.classification, model.mtry,
                            config.min_samples_leaf, config.max_depth);
  std::vector<std::uint32_t> counts(n);
  for (std::size_t t = 0; t < config.n_trees; ++t) {
    Rng rng(derive_seed(config.seed, t));
    std::vector<std::uint32_t> rows;
    if (config.bootstrap) {
      std::fill(counts.begin(), counts.end(), 0u);
      for (std::size_t i = 0; i < n; ++i) ++counts[rng.index(n)];
      for (std::uint32_t r = 0; r < n; ++r) rows.insert(rows.end(), counts[r], r);
    } else {
      std::fill(counts.begin(), counts.end(), 1u);
      rows.resize(n);
      std::iota(rows.begin(), rows.end(), 0u);
    }
    model.trees.push_back(grower.grow(counts, rng));
    model.bootstrap_rows.push_back(std::move(rows));
  }
  return model;
}

// ---------------------------------------------------------------------------
// Models, importance, serialization
// ---------------------------------------------------------------------------

using Model = std::variant<GbtModel, ForestModel>;

inline std::vector<double> predict(const Model& model, const Dataset& x) {
  return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

inline const std::vector<std::string>& feature_names(const Model& model) {
  return std::visit([](const auto& m) -> const std::vector<std::string>& { return m.feature_names; }, model);
}

inline const std::vector<Tree>& trees_of(const Model& model) {
  return std::visit([](const auto& m) -> const std::vector<Tree>& { return m.trees; }, model);
}

// Sum of split gains per feature over the whole ensemble. Every feature of
// the model is present (0 when never used).
inline std::map<std::string, double> importance_gain(const Model& model) {
  const auto& names = feature_names(model);
  std::map<std::string, double> out;
  for (const auto& name : names) out[name] = 0.0;
  for (const auto& tree : trees_of(model)) {
    for (const auto& node : tree.nodes) {
      if (!node.is_leaf()) out[names[static_cast<std::size_t>(node.feature)]] += node.gain;
    }
  }
  return out;
}

enum class ImportanceMetric { kAuc, kRmse };

// Mean metric degradation (AUC drop, or RMSE rise) over `n_repeats` seeded
// shuffles of each feature column.
inline std::map<std::string, double> importance_permutation(const Model& model, const Dataset& d,
                                                            ImportanceMetric metric,
                                                            std::uint64_t seed, std::size_t n_repeats) {
  const auto y = d.y();
  auto score = [&](const Dataset& data) {
    const auto pred = predict(model, data);
    return metric == ImportanceMetric::kAuc ? metrics::auc(y, pred) : metrics::rmse(y, pred);
  };
  const double base = score(d);
  std::map<std::string, double> out;
  const auto& names = feature_names(model);
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto original = d.column(names[j]);
    double total = 0.0;
    for (std::size_t rep = 0; rep < n_repeats; ++rep) {
      std::vector<double> shuffled(original.begin(), original.end());
      Rng rng(derive_seed(seed, j, rep));
      rng.shuffle(std::span<double>(shuffled));
      const double s = score(d.with_column(names[j], std::move(shuffled)));
      total += metric == ImportanceMetric::kAuc ? base - s : s - base;
    }
    out[names[j]] = n_repeats ? total / static_cast<double>(n_repeats) : 0.0;
  }
  return out;
}

inline nlohmann::ordered_json tree_to_json(const Tree& tree) {
  nlohmann::ordered_json feature = nlohmann::ordered_json::array(), threshold = feature,
                         left = feature, right = feature, value = feature, gain = feature;
  for (const auto& n : tree.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
    gain.push_back(n.gain);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left},
          {"right", right},     {"value", value},         {"gain", gain}};
}

// Node arrays per tree. A re-scorer walks from node 0: go `left` when
// x[feature] <= threshold, stop at feature == -1 and read `value`.
inline void to_json(nlohmann::ordered_json& j, const GbtModel& m) {
  auto trees = nlohmann::ordered_json::array();
  for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
  j = nlohmann::ordered_json{{"type", "gbdt"},
                             {"loss", m.config.loss == Loss::kLogistic ? "logistic" : "squared"},
                             {"growth", growth_name(m.config.growth)},
                             {"base_score", m.base_score},
                             {"learning_rate", m.config.learning_rate},
                             {"features", m.feature_names},
                             {"trees", std::move(trees)}};
}

// Prediction = mean over trees of the leaf value.
inline void to_json(nlohmann::ordered_json& j, const ForestModel& m) {
  auto trees = nlohmann::ordered_json::array();
  for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
  j = nlohmann::ordered_json{{"type", "forest"},
                             {"classification", m.classification},
                             {"mtry", m.mtry},
                             {"features", m.feature_names},
                             {"trees", std::move(trees)}};
}

}  // namespace hybridml::trees

#endif  // HYBRIDML_TREES_HPP_
