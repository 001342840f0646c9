// Copyright 2026 The qmemlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Weighted least-squares regression trees.
//
// Split search runs over a per-feature binning of the training data. With
// exact binning every distinct value is its own bin, which is plain CART;
// with a bin budget (histogram boosting) neighbouring values share a bin. In
// both cases a split between two non-empty bins puts its threshold halfway
// between the largest value of the lower bin and the smallest value of the
// upper one, so a budget at least as large as the number of distinct values
// reproduces the exact tree.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qmem/ml/core.hpp"
#include "qmem/random.hpp"

namespace qmem::ml {

struct Binning {
  struct Feature {
    std::vector<std::uint32_t> bin;  // per training row
    std::vector<double> lo;          // smallest training value in each bin
    std::vector<double> hi;          // largest training value in each bin
  };
  std::vector<Feature> features;
};

/// max_bins == 0 gives one bin per distinct value.
inline Binning make_binning(const FeatureMatrix& x, std::size_t max_bins = 0) {
  Binning b;
  b.features.resize(x.cols);
  std::vector<std::pair<double, std::size_t>> col(x.rows);
  for (std::size_t j = 0; j < x.cols; ++j) {
    for (std::size_t i = 0; i < x.rows; ++i) col[i] = {x(i, j), i};
    std::sort(col.begin(), col.end());
    std::size_t distinct = 0;
    for (std::size_t k = 0; k < col.size(); ++k)
      if (k == 0 || col[k].first != col[k - 1].first) ++distinct;
    const bool exact = max_bins == 0 || distinct <= max_bins;
    auto& f = b.features[j];
    f.bin.assign(x.rows, 0);
    std::uint32_t current = 0;
    for (std::size_t k = 0; k < col.size(); ++k) {
      const bool new_value = k == 0 || col[k].first != col[k - 1].first;
      if (new_value && k > 0) {
        // Equal-count bins: move on once this bin holds its share of rows.
        if (exact || static_cast<double>(k) >= static_cast<double>(current + 1) * static_cast<double>(x.rows) /
                                                    static_cast<double>(max_bins))
          ++current;
      }
      if (f.lo.size() == current) {
        f.lo.push_back(col[k].first);
        f.hi.push_back(col[k].first);
      }
      f.hi[current] = col[k].first;
      f.bin[col[k].second] = current;
    }
  }
  return b;
}

struct TreeNode {
  std::int32_t feature = -1;  // -1 = leaf
  double threshold = 0.0;     // go left when x <= threshold
  double value = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
};

struct TreeOptions {
  std::size_t max_depth = 12;  // 0 = unlimited
  std::size_t min_leaf = 2;
  bool random_thresholds = false;  // extra-trees style; ignores the binning
};

class Tree {
 public:
  std::vector<TreeNode> nodes;

  [[nodiscard]] double predict(std::span<const double> x) const {
    std::size_t k = 0;
    while (nodes[k].feature >= 0) {
      const TreeNode& n = nodes[k];
      k = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[k].value;
  }

  [[nodiscard]] std::size_t depth() const { return depth_from(0); }

  [[nodiscard]] nlohmann::json to_json() const {
    auto a = nlohmann::json::array();
    for (const auto& n : nodes) a.push_back({n.feature, n.threshold, n.value, n.left, n.right});
    return a;
  }

  static Tree from_json(const nlohmann::json& j) {
    Tree t;
    for (const auto& e : j)
      t.nodes.push_back({e.at(0).get<std::int32_t>(), e.at(1).get<double>(), e.at(2).get<double>(),
                         e.at(3).get<std::uint32_t>(), e.at(4).get<std::uint32_t>()});
    if (t.nodes.empty()) throw ConfigError("tree: no nodes");
    return t;
  }

 private:
  [[nodiscard]] std::size_t depth_from(std::size_t k) const {
    if (nodes[k].feature < 0) return 0;
    return 1 + std::max(depth_from(nodes[k].left), depth_from(nodes[k].right));
  }
};

namespace detail {

struct SplitChoice {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

// Strictly better, with a relative tolerance so that ties in floating point
// keep the earlier (lower feature, lower threshold) candidate.
inline bool improves(double gain, const std::optional<SplitChoice>& best) {
  if (!(gain > 0.0)) return false;
  if (!best) return true;
  return gain > best->gain + 1e-12 * std::abs(best->gain);
}

class TreeGrower {
 public:
  TreeGrower(const FeatureMatrix& x, const Binning* bins, std::span<const double> y, std::span<const double> w,
             const TreeOptions& opts, Rng* rng)
      : x_(x), bins_(bins), y_(y), w_(w), opts_(opts), rng_(rng) {}

  Tree grow(std::vector<std::size_t> idx) {
    tree_.nodes.clear();
    tree_.nodes.emplace_back();
    build(0, std::move(idx), 0);
    return std::move(tree_);
  }

 private:
  double weight(std::size_t i) const { return w_.empty() ? 1.0 : w_[i]; }

  void build(std::size_t node, std::vector<std::size_t> idx, std::size_t depth) {
    double W = 0.0, S = 0.0;
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (std::size_t i : idx) {
      W += weight(i);
      S += weight(i) * y_[i];
      ymin = std::min(ymin, y_[i]);
      ymax = std::max(ymax, y_[i]);
    }
    tree_.nodes[node].value = W > 0.0 ? S / W : 0.0;
    if ((opts_.max_depth != 0 && depth >= opts_.max_depth) || idx.size() < 2 * std::max<std::size_t>(opts_.min_leaf, 1) ||
        !(ymax > ymin) || !(W > 0.0))
      return;

    const std::optional<SplitChoice> best = opts_.random_thresholds ? random_split(idx, W, S) : best_split(idx, W, S);
    if (!best) return;

    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) (x_(i, best->feature) <= best->threshold ? left : right).push_back(i);
    if (left.empty() || right.empty()) return;
    idx.clear();
    idx.shrink_to_fit();

    const auto l = static_cast<std::uint32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const auto r = static_cast<std::uint32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[node].feature = static_cast<std::int32_t>(best->feature);
    tree_.nodes[node].threshold = best->threshold;
    tree_.nodes[node].left = l;
    tree_.nodes[node].right = r;
    build(l, std::move(left), depth + 1);
    build(r, std::move(right), depth + 1);
  }

  std::optional<SplitChoice> best_split(const std::vector<std::size_t>& idx, double W, double S) {
    std::optional<SplitChoice> best;
    const double parent = S * S / W;
    const std::size_t min_leaf = std::max<std::size_t>(opts_.min_leaf, 1);
    for (std::size_t j = 0; j < x_.cols; ++j) {
      const auto& f = bins_->features[j];
      order_.clear();
      for (std::size_t i : idx) order_.emplace_back(f.bin[i], i);
      std::sort(order_.begin(), order_.end());
      double wl = 0.0, sl = 0.0;
      std::size_t nl = 0;
      std::size_t k = 0;
      while (k < order_.size()) {
        const std::uint32_t b = order_[k].first;
        double wb = 0.0, sb = 0.0;
        std::size_t nb = 0;
        for (; k < order_.size() && order_[k].first == b; ++k) {
          const std::size_t i = order_[k].second;
          wb += weight(i);
          sb += weight(i) * y_[i];
          ++nb;
        }
        wl += wb;
        sl += sb;
        nl += nb;
        if (k == order_.size()) break;
        const std::size_t nr = order_.size() - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double wr = W - wl, sr = S - sl;
        if (!(wl > 0.0) || !(wr > 0.0)) continue;
        const double gain = sl * sl / wl + sr * sr / wr - parent;
        if (improves(gain, best)) {
          const double thr = 0.5 * (f.hi[b] + f.lo[order_[k].first]);
          best = SplitChoice{j, thr, gain};
        }
      }
    }
    return best;
  }

  std::optional<SplitChoice> random_split(const std::vector<std::size_t>& idx, double W, double S) {
    std::optional<SplitChoice> best;
    const double parent = S * S / W;
    const std::size_t min_leaf = std::max<std::size_t>(opts_.min_leaf, 1);
    for (std::size_t j = 0; j < x_.cols; ++j) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i : idx) {
        lo = std::min(lo, x_(i, j));
        hi = std::max(hi, x_(i, j));
      }
      if (!(hi > lo)) continue;
      double thr = rng_->uniform(lo, hi);
      if (!(thr < hi)) thr = lo;
      double wl = 0.0, sl = 0.0;
      std::size_t nl = 0;
      for (std::size_t i : idx) {
        if (x_(i, j) <= thr) {
          wl += weight(i);
          sl += weight(i) * y_[i];
          ++nl;
        }
      }
      const std::size_t nr = idx.size() - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double wr = W - wl, sr = S - sl;
      if (!(wl > 0.0) || !(wr > 0.0)) continue;
      const double gain = sl * sl / wl + sr * sr / wr - parent;
      if (improves(gain, best)) best = SplitChoice{j, thr, gain};
    }
    return best;
  }

  const FeatureMatrix& x_;
  const Binning* bins_;
  std::span<const double> y_;
  std::span<const double> w_;
  TreeOptions opts_;
  Rng* rng_;
  Tree tree_;
  std::vector<std::pair<std::uint32_t, std::size_t>> order_;
};

}  // namespace detail

/// Grows one tree on the rows listed in idx (duplicates allowed, e.g. a
/// bootstrap sample). `w` holds optional per-row weights; `bins` is required
/// unless opts.random_thresholds, which needs `rng` instead.
inline Tree grow_tree(const FeatureMatrix& x, const Binning* bins, std::span<const double> y,
                      std::span<const double> w, std::vector<std::size_t> idx, const TreeOptions& opts,
                      Rng* rng = nullptr) {
  if (opts.random_thresholds ? rng == nullptr : bins == nullptr)
    throw ConfigError("grow_tree: missing binning or random source");
  if (idx.empty()) throw ConfigError("grow_tree: no rows");
  std::sort(idx.begin(), idx.end());
  return detail::TreeGrower(x, bins, y, w, opts, rng).grow(std::move(idx));
}

}  // namespace qmem::ml
