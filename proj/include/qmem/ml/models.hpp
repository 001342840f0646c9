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

#include <algorithm>
#include <cmath>
#include <istream>
#include <memory>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qmem/error.hpp"
#include "qmem/ml/core.hpp"
#include "qmem/ml/tree.hpp"
#include "qmem/parallel.hpp"
#include "qmem/random.hpp"

namespace qmem::ml {

namespace detail {

inline nlohmann::json matrix_json(const FeatureMatrix& m) { return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}}; }

inline FeatureMatrix matrix_from_json(const nlohmann::json& j) {
  FeatureMatrix m;
  m.rows = j.at("rows").get<std::size_t>();
  m.cols = j.at("cols").get<std::size_t>();
  m.data = j.at("data").get<std::vector<double>>();
  if (m.data.size() != m.rows * m.cols) throw ConfigError("matrix: size mismatch");
  return m;
}

inline nlohmann::json standardizer_json(const Standardizer& s) { return {{"mean", s.mean}, {"scale", s.scale}}; }

inline Standardizer standardizer_from_json(const nlohmann::json& j) {
  return {j.at("mean").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>()};
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d += (a[j] - b[j]) * (a[j] - b[j]);
  return d;
}

inline nlohmann::json trees_json(const std::vector<Tree>& trees) {
  auto a = nlohmann::json::array();
  for (const auto& t : trees) a.push_back(t.to_json());
  return a;
}

inline std::vector<Tree> trees_from_json(const nlohmann::json& j) {
  std::vector<Tree> out;
  for (const auto& t : j) out.push_back(Tree::from_json(t));
  return out;
}

}  // namespace detail

/// Mean target of the k nearest standardized training rows (ties by row order).
class KnnRegressor final : public Regressor {
 public:
  using Regressor::Regressor;
  [[nodiscard]] std::string kind() const override { return "knn"; }

 protected:
  void do_fit(const FeatureMatrix& x, std::span<const double> y) override {
    if (hyper_.knn_k == 0) throw ConfigError("knn: k must be >= 1");
    scaler_.fit(x);
    x_ = scaler_.apply(x);
    y_.assign(y.begin(), y.end());
  }

  [[nodiscard]] double do_predict(std::span<const double> q) const override {
    const std::vector<double> z = scaler_.apply(q);
    std::vector<std::pair<double, std::size_t>> d(x_.rows);
    for (std::size_t i = 0; i < x_.rows; ++i) d[i] = {detail::squared_distance(z, x_.row(i)), i};
    const std::size_t k = std::min(hyper_.knn_k, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += y_[d[i].second];
    return s / static_cast<double>(k);
  }

  [[nodiscard]] nlohmann::json state_to_json() const override {
    return {{"scaler", detail::standardizer_json(scaler_)}, {"x", detail::matrix_json(x_)}, {"y", y_}};
  }
  void state_from_json(const nlohmann::json& j) override {
    scaler_ = detail::standardizer_from_json(j.at("scaler"));
    x_ = detail::matrix_from_json(j.at("x"));
    y_ = j.at("y").get<std::vector<double>>();
  }

 private:
  Standardizer scaler_;
  FeatureMatrix x_;
  std::vector<double> y_;
};

/// Lower Cholesky factor of a symmetric matrix (row-major n x n); false if not positive definite.
inline bool cholesky(std::vector<double>& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) return false;
    const double l = std::sqrt(d);
    a[j * n + j] = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / l;
    }
  }
  return true;
}

/// Zero-mean Gaussian process with an RBF kernel exp(-d^2 / 2 l^2) on standardized features.
class GaussianProcessRegressor final : public Regressor {
 public:
  using Regressor::Regressor;
  [[nodiscard]] std::string kind() const override { return "gaussian-process"; }
  [[nodiscard]] double length_scale() const { return length_; }
  [[nodiscard]] double effective_noise() const { return noise_; }

 protected:
  void do_fit(const FeatureMatrix& x, std::span<const double> y) override {
    scaler_.fit(x);
    x_ = scaler_.apply(x);
    const std::size_t n = x_.rows;
    length_ = hyper_.gp_length_scale > 0.0 ? hyper_.gp_length_scale : median_distance();
    if (!(hyper_.gp_noise >= 0.0)) throw ConfigError("gaussian-process: noise must be >= 0");

    std::vector<double> k(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) k[i * n + j] = k[j * n + i] = kernel(x_.row(i), x_.row(j));

    // Escalate the diagonal jitter until the factorization succeeds.
    std::vector<double> l;
    bool ok = false;
    for (double jitter : {0.0, 1e-10, 1e-8, 1e-6, 1e-4}) {
      l = k;
      noise_ = hyper_.gp_noise + jitter;
      for (std::size_t i = 0; i < n; ++i) l[i * n + i] += noise_;
      if ((ok = cholesky(l, n))) break;
    }
    if (!ok) throw NotPsdError("gaussian-process: kernel matrix is not positive definite");

    alpha_.assign(y.begin(), y.end());
    for (std::size_t i = 0; i < n; ++i) {
      double s = alpha_[i];
      for (std::size_t k2 = 0; k2 < i; ++k2) s -= l[i * n + k2] * alpha_[k2];
      alpha_[i] = s / l[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = alpha_[i];
      for (std::size_t k2 = i + 1; k2 < n; ++k2) s -= l[k2 * n + i] * alpha_[k2];
      alpha_[i] = s / l[i * n + i];
    }
  }

  [[nodiscard]] double do_predict(std::span<const double> q) const override {
    const std::vector<double> z = scaler_.apply(q);
    double s = 0.0;
    for (std::size_t i = 0; i < x_.rows; ++i) s += kernel(z, x_.row(i)) * alpha_[i];
    return s;
  }

  [[nodiscard]] nlohmann::json state_to_json() const override {
    return {{"scaler", detail::standardizer_json(scaler_)},
            {"x", detail::matrix_json(x_)},
            {"alpha", alpha_},
            {"length_scale", length_},
            {"noise", noise_}};
  }
  void state_from_json(const nlohmann::json& j) override {
    scaler_ = detail::standardizer_from_json(j.at("scaler"));
    x_ = detail::matrix_from_json(j.at("x"));
    alpha_ = j.at("alpha").get<std::vector<double>>();
    length_ = j.at("length_scale").get<double>();
    noise_ = j.at("noise").get<double>();
  }

 private:
  [[nodiscard]] double kernel(std::span<const double> a, std::span<const double> b) const {
    return std::exp(-detail::squared_distance(a, b) / (2.0 * length_ * length_));
  }

  [[nodiscard]] double median_distance() const {
    std::vector<double> d;
    d.reserve(x_.rows * (x_.rows - 1) / 2);
    for (std::size_t i = 0; i < x_.rows; ++i)
      for (std::size_t j = i + 1; j < x_.rows; ++j) d.push_back(std::sqrt(detail::squared_distance(x_.row(i), x_.row(j))));
    if (d.empty()) return 1.0;
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    double m = *mid;
    if (d.size() % 2 == 0) m = 0.5 * (m + *std::max_element(d.begin(), mid));
    return m > 0.0 ? m : 1.0;
  }

  Standardizer scaler_;
  FeatureMatrix x_;
  std::vector<double> alpha_;
  double length_ = 1.0;
  double noise_ = 0.0;
};

class DecisionTreeRegressor final : public Regressor {
 public:
  using Regressor::Regressor;
  [[nodiscard]] std::string kind() const override { return "decision-tree"; }
  [[nodiscard]] const Tree& tree() const { return tree_; }

 protected:
  void do_fit(const FeatureMatrix& x, std::span<const double> y) override {
    const Binning bins = make_binning(x);
    std::vector<std::size_t> idx(x.rows);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    tree_ = grow_tree(x, &bins, y, {}, std::move(idx), {hyper_.max_depth, hyper_.min_leaf, false});
  }
  [[nodiscard]] double do_predict(std::span<const double> q) const override { return tree_.predict(q); }
  [[nodiscard]] nlohmann::json state_to_json() const override { return {{"tree", tree_.to_json()}}; }
  void state_from_json(const nlohmann::json& j) override { tree_ = Tree::from_json(j.at("tree")); }

 private:
  Tree tree_;
};

/// Averages of independently grown trees. Random forests grow each tree on a
/// bootstrap sample with exact splits; extra-trees use every row and draw one
/// random threshold per feature at each node.
class TreeEnsembleRegressor : public Regressor {
 public:
  TreeEnsembleRegressor(Hyperparams h, bool extra) : Regressor(h), extra_(extra) {}
  [[nodiscard]] std::string kind() const override { return extra_ ? "extra-trees" : "random-forest"; }
  [[nodiscard]] const std::vector<Tree>& trees() const { return trees_; }

 protected:
  void do_fit(const FeatureMatrix& x, std::span<const double> y) override {
    if (hyper_.n_trees == 0) throw ConfigError(kind() + ": need at least one tree");
    const std::optional<Binning> bins = extra_ ? std::nullopt : std::optional<Binning>(make_binning(x));
    trees_.assign(hyper_.n_trees, Tree{});
    const TreeOptions opts{hyper_.max_depth, hyper_.min_leaf, extra_};
    parallel_for(hyper_.n_trees, hyper_.workers, [&](std::size_t b) {
      Rng rng(derive_seed(hyper_.seed, b));
      std::vector<std::size_t> idx(x.rows);
      if (extra_) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
      } else {
        for (auto& i : idx) i = static_cast<std::size_t>(rng.below(x.rows));
      }
      trees_[b] = grow_tree(x, bins ? &*bins : nullptr, y, {}, std::move(idx), opts, &rng);
    });
  }

  [[nodiscard]] double do_predict(std::span<const double> q) const override {
    double s = 0.0;
    for (const auto& t : trees_) s += t.predict(q);
    return s / static_cast<double>(trees_.size());
  }

  [[nodiscard]] nlohmann::json state_to_json() const override { return {{"trees", detail::trees_json(trees_)}}; }
  void state_from_json(const nlohmann::json& j) override { trees_ = detail::trees_from_json(j.at("trees")); }

 private:
  bool extra_;
  std::vector<Tree> trees_;
};

/// Least-squares gradient boosting: start from mean(y), then each round fits a
/// shallow tree to the residuals and adds learning_rate times its output.
/// The histogram variant bins features into at most `bins` bins and can use
/// one-sided sampling: keep the goss_top fraction of rows with the largest
/// residuals, draw goss_other of the rows from the rest and up-weight those by
/// (1 - goss_top) / goss_other.
class BoostingRegressor : public Regressor {
 public:
  BoostingRegressor(Hyperparams h, bool histogram) : Regressor(h), histogram_(histogram) {}
  [[nodiscard]] std::string kind() const override { return histogram_ ? "hist-gbdt" : "gbdt"; }
  [[nodiscard]] double base() const { return base_; }
  [[nodiscard]] std::size_t rounds_fitted() const { return trees_.size(); }

  /// Prediction using only the first `rounds` trees.
  [[nodiscard]] double predict_staged(std::span<const double> q, std::size_t rounds) const {
    double f = base_;
    for (std::size_t r = 0; r < std::min(rounds, trees_.size()); ++r) f += hyper_.learning_rate * trees_[r].predict(q);
    return f;
  }

 protected:
  void do_fit(const FeatureMatrix& x, std::span<const double> y) override {
    if (!(hyper_.learning_rate > 0.0)) throw ConfigError(kind() + ": learning rate must be > 0");
    const bool goss = histogram_ && hyper_.goss;
    if (goss && !(hyper_.goss_top > 0.0 && hyper_.goss_other > 0.0 && hyper_.goss_top + hyper_.goss_other <= 1.0))
      throw ConfigError(kind() + ": one-sided sampling fractions must be > 0 with sum <= 1");
    if (histogram_ && hyper_.bins < 2) throw ConfigError(kind() + ": need at least 2 bins");
    const Binning bins = make_binning(x, histogram_ ? hyper_.bins : 0);
    const std::size_t n = x.rows;
    base_ = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    std::vector<double> f(n, base_), r(n), w;
    trees_.clear();
    const TreeOptions opts{hyper_.boost_depth, hyper_.boost_min_leaf, false};
    for (std::size_t round = 0; round < hyper_.rounds; ++round) {
      for (std::size_t i = 0; i < n; ++i) r[i] = y[i] - f[i];
      std::vector<std::size_t> idx;
      if (goss) {
        idx = one_sided_sample(r, round, w);
      } else {
        idx.resize(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
      }
      trees_.push_back(grow_tree(x, &bins, r, w, std::move(idx), opts));
      for (std::size_t i = 0; i < n; ++i) f[i] += hyper_.learning_rate * trees_.back().predict(x.row(i));
    }
  }

  [[nodiscard]] double do_predict(std::span<const double> q) const override {
    return predict_staged(q, trees_.size());
  }

  [[nodiscard]] nlohmann::json state_to_json() const override {
    return {{"base", base_}, {"trees", detail::trees_json(trees_)}};
  }
  void state_from_json(const nlohmann::json& j) override {
    base_ = j.at("base").get<double>();
    trees_ = detail::trees_from_json(j.at("trees"));
  }

 private:
  std::vector<std::size_t> one_sided_sample(const std::vector<double>& r, std::size_t round, std::vector<double>& w) const {
    const std::size_t n = r.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::abs(r[a]) > std::abs(r[b]); });
    const auto top = std::max<std::size_t>(1, static_cast<std::size_t>(hyper_.goss_top * static_cast<double>(n)));
    const auto other = std::min(n - std::min(top, n), static_cast<std::size_t>(hyper_.goss_other * static_cast<double>(n)));
    w.assign(n, 0.0);
    std::vector<std::size_t> idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(top, n)));
    for (std::size_t i : idx) w[i] = 1.0;
    // Partial Fisher-Yates over the remaining rows.
    Rng rng(derive_seed(hyper_.seed, round));
    std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(idx.size()), order.end());
    const double up = (1.0 - hyper_.goss_top) / hyper_.goss_other;
    for (std::size_t k = 0; k < other; ++k) {
      const std::size_t pick = k + static_cast<std::size_t>(rng.below(rest.size() - k));
      std::swap(rest[k], rest[pick]);
      w[rest[k]] = up;
      idx.push_back(rest[k]);
    }
    return idx;
  }

  bool histogram_;
  double base_ = 0.0;
  std::vector<Tree> trees_;
};

inline const std::vector<std::string>& regressor_kinds() {
  static const std::vector<std::string> kinds{"knn",         "gaussian-process", "decision-tree", "random-forest",
                                              "extra-trees", "gbdt",             "hist-gbdt"};
  return kinds;
}

inline std::unique_ptr<Regressor> make_regressor(const std::string& kind, const Hyperparams& h = {}) {
  if (kind == "knn") return std::make_unique<KnnRegressor>(h);
  if (kind == "gaussian-process") return std::make_unique<GaussianProcessRegressor>(h);
  if (kind == "decision-tree") return std::make_unique<DecisionTreeRegressor>(h);
  if (kind == "random-forest") return std::make_unique<TreeEnsembleRegressor>(h, false);
  if (kind == "extra-trees") return std::make_unique<TreeEnsembleRegressor>(h, true);
  if (kind == "gbdt") return std::make_unique<BoostingRegressor>(h, false);
  if (kind == "hist-gbdt") return std::make_unique<BoostingRegressor>(h, true);
  throw ConfigError("unknown model kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Persistence: a "QMLMODEL1" line followed by one JSON document holding the
// kind, hyperparameters, feature names and fitted state.

inline constexpr const char* kModelMagic = "QMLMODEL1";

struct SavedModel {
  std::unique_ptr<Regressor> model;
  std::vector<std::string> feature_names;
};

inline void save_model(std::ostream& os, const Regressor& m, const std::vector<std::string>& feature_names = {}) {
  if (!m.fitted()) throw ConfigError("save_model: model is not fitted");
  nlohmann::json j = m.to_json();
  j["feature_names"] = feature_names;
  os << kModelMagic << '\n' << j.dump() << '\n';
}

inline SavedModel load_model(std::istream& is) {
  std::string magic;
  if (!std::getline(is, magic) || magic != kModelMagic) throw ParseError("not a QMLMODEL1 file", 1);
  nlohmann::json j;
  try {
    is >> j;
    SavedModel out;
    out.model = make_regressor(j.at("kind").get<std::string>(), j.at("hyper").get<Hyperparams>());
    out.model->load_state(j);
    out.feature_names = j.value("feature_names", std::vector<std::string>{});
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model: ") + e.what(), 2);
  }
}

}  // namespace qmem::ml
