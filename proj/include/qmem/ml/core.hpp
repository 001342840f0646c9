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
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmem/data.hpp"
#include "qmem/error.hpp"
#include "qmem/random.hpp"

namespace qmem::ml {

/// Dense row-major feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  static FeatureMatrix from_rows(const std::vector<std::vector<double>>& r) {
    FeatureMatrix m(r.size(), r.empty() ? 0 : r.front().size());
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (r[i].size() != m.cols) throw DimensionError("FeatureMatrix: ragged rows");
      std::copy(r[i].begin(), r[i].end(), m.data.begin() + static_cast<std::ptrdiff_t>(i * m.cols));
    }
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

  [[nodiscard]] FeatureMatrix select(std::span<const std::size_t> idx) const {
    FeatureMatrix m(idx.size(), cols);
    for (std::size_t k = 0; k < idx.size(); ++k)
      std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(idx[k] * cols), cols,
                  m.data.begin() + static_cast<std::ptrdiff_t>(k * cols));
    return m;
  }
};

struct Problem {
  std::vector<std::string> feature_names;
  FeatureMatrix x;
  std::vector<double> y;
};

/// Features and the form_factor target of a dataset.
inline Problem to_problem(const Dataset& ds) {
  Problem p;
  p.feature_names = ds.feature_names();
  std::vector<std::size_t> cols;
  for (const auto& n : p.feature_names) cols.push_back(ds.column_index(n));
  const std::size_t t = ds.column_index("form_factor");
  p.x = FeatureMatrix(ds.size(), cols.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) p.x(i, j) = ds.rows[i].at(cols[j]);
    p.y.push_back(ds.rows[i].at(t));
  }
  return p;
}

struct SplitSpec {
  double train_fraction = 2.0 / 3.0;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle, then the first floor(n * fraction) rows train.
inline SplitIndices split(std::size_t n, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw ConfigError("split: train fraction must be in (0, 1)");
  if (n < 3) throw ConfigError("split: at least 3 rows required");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(spec.seed);
  rng.shuffle(idx);
  auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.train_fraction + 1e-9));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  return {{idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train)},
          {idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end()}};
}

/// Per-feature zero mean, unit variance from the training data (unit scale for constant features).
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  void fit(const FeatureMatrix& x) {
    mean.assign(x.cols, 0.0);
    scale.assign(x.cols, 1.0);
    if (x.rows == 0) return;
    for (std::size_t j = 0; j < x.cols; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.rows; ++i) s += x(i, j);
      mean[j] = s / static_cast<double>(x.rows);
      double ss = 0.0;
      for (std::size_t i = 0; i < x.rows; ++i) ss += (x(i, j) - mean[j]) * (x(i, j) - mean[j]);
      const double sd = std::sqrt(ss / static_cast<double>(x.rows));
      scale[j] = sd > 0.0 ? sd : 1.0;
    }
  }

  [[nodiscard]] std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
    return out;
  }

  [[nodiscard]] FeatureMatrix apply(const FeatureMatrix& x) const {
    FeatureMatrix out(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
      for (std::size_t j = 0; j < x.cols; ++j) out(i, j) = (x(i, j) - mean[j]) / scale[j];
    return out;
  }
};

// ---------------------------------------------------------------------------
// Metrics

struct EvalMetrics {
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
  double rmse = 0.0;
  double fit_seconds = 0.0;
};

inline void check_same_length(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size() || y.empty()) throw DimensionError("metrics: y and prediction lengths differ or are empty");
}

inline double r2_score(std::span<const double> y, std::span<const double> yhat) {
  check_same_length(y, yhat);
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_tot += (y[i] - mean) * (y[i] - mean);
    ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  }
  if (!(ss_tot > 0.0)) throw ZeroVarianceError("R^2 undefined: target has zero variance");
  return 1.0 - ss_res / ss_tot;
}

/// 1 - (1 - R^2)(n - 1)/(n - p - 1); requires n > p + 1.
inline double adjusted_r2(double r2, std::size_t n, std::size_t p) {
  if (n <= p + 1) throw ConfigError("adjusted R^2 needs n > p + 1");
  return 1.0 - (1.0 - r2) * static_cast<double>(n - 1) / static_cast<double>(n - p - 1);
}

inline double rmse(std::span<const double> y, std::span<const double> yhat) {
  check_same_length(y, yhat);
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) ss += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return std::sqrt(ss / static_cast<double>(y.size()));
}

inline EvalMetrics evaluate(std::span<const double> y, std::span<const double> yhat, std::size_t p) {
  EvalMetrics m;
  m.r2 = r2_score(y, yhat);
  m.adjusted_r2 = adjusted_r2(m.r2, y.size(), p);
  m.rmse = rmse(y, yhat);
  return m;
}

// ---------------------------------------------------------------------------
// Regressor interface

struct Hyperparams {
  std::size_t knn_k = 5;
  double gp_length_scale = 0.0;  // 0 = median pairwise distance
  double gp_noise = 1e-6;
  std::size_t max_depth = 12;    // single trees and forests; 0 = unlimited
  std::size_t min_leaf = 2;
  std::size_t n_trees = 200;
  std::size_t rounds = 300;
  double learning_rate = 0.1;
  std::size_t boost_depth = 4;
  std::size_t boost_min_leaf = 2;
  std::size_t bins = 64;
  bool goss = false;
  double goss_top = 0.2;
  double goss_other = 0.1;
  std::uint64_t seed = 0;
  std::size_t workers = 1;  // tree-level parallelism; results do not depend on it
};

inline void to_json(nlohmann::json& j, const Hyperparams& h) {
  j = {{"knn_k", h.knn_k},         {"gp_length_scale", h.gp_length_scale},
       {"gp_noise", h.gp_noise},   {"max_depth", h.max_depth},
       {"min_leaf", h.min_leaf},   {"n_trees", h.n_trees},
       {"rounds", h.rounds},       {"learning_rate", h.learning_rate},
       {"boost_depth", h.boost_depth}, {"boost_min_leaf", h.boost_min_leaf},
       {"bins", h.bins},
       {"goss", h.goss},           {"goss_top", h.goss_top},
       {"goss_other", h.goss_other}, {"seed", h.seed}};
}

inline void from_json(const nlohmann::json& j, Hyperparams& h) {
  h.knn_k = j.at("knn_k").get<std::size_t>();
  h.gp_length_scale = j.at("gp_length_scale").get<double>();
  h.gp_noise = j.at("gp_noise").get<double>();
  h.max_depth = j.at("max_depth").get<std::size_t>();
  h.min_leaf = j.at("min_leaf").get<std::size_t>();
  h.n_trees = j.at("n_trees").get<std::size_t>();
  h.rounds = j.at("rounds").get<std::size_t>();
  h.learning_rate = j.at("learning_rate").get<double>();
  h.boost_depth = j.at("boost_depth").get<std::size_t>();
  h.boost_min_leaf = j.at("boost_min_leaf").get<std::size_t>();
  h.bins = j.at("bins").get<std::size_t>();
  h.goss = j.at("goss").get<bool>();
  h.goss_top = j.at("goss_top").get<double>();
  h.goss_other = j.at("goss_other").get<double>();
  h.seed = j.at("seed").get<std::uint64_t>();
}

class Regressor {
 public:
  explicit Regressor(Hyperparams h) : hyper_(h) {}
  virtual ~Regressor() = default;

  [[nodiscard]] virtual std::string kind() const = 0;

  void fit(const FeatureMatrix& x, std::span<const double> y) {
    if (x.rows != y.size()) throw DimensionError(kind() + ": feature and target row counts differ");
    if (x.rows == 0 || x.cols == 0) throw DimensionError(kind() + ": empty training data");
    for (double v : x.data)
      if (!std::isfinite(v)) throw ConfigError(kind() + ": non-finite feature value");
    for (double v : y)
      if (!std::isfinite(v)) throw ConfigError(kind() + ": non-finite target value");
    n_features_ = x.cols;
    do_fit(x, y);
    fitted_ = true;
  }

  [[nodiscard]] double predict_one(std::span<const double> x) const {
    if (!fitted_) throw ConfigError(kind() + ": predict before fit");
    if (x.size() != n_features_)
      throw DimensionError(kind() + ": expected " + std::to_string(n_features_) + " features, got " +
                           std::to_string(x.size()));
    return do_predict(x);
  }

  [[nodiscard]] std::vector<double> predict(const FeatureMatrix& x) const {
    std::vector<double> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) out[i] = predict_one(x.row(i));
    return out;
  }

  [[nodiscard]] bool fitted() const { return fitted_; }
  [[nodiscard]] std::size_t n_features() const { return n_features_; }
  [[nodiscard]] const Hyperparams& hyper() const { return hyper_; }
  void set_workers(std::size_t w) { hyper_.workers = w; }

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json j;
    j["kind"] = kind();
    j["hyper"] = hyper_;
    j["n_features"] = n_features_;
    j["state"] = state_to_json();
    return j;
  }

  void load_state(const nlohmann::json& j) {
    n_features_ = j.at("n_features").get<std::size_t>();
    state_from_json(j.at("state"));
    fitted_ = true;
  }

 protected:
  virtual void do_fit(const FeatureMatrix& x, std::span<const double> y) = 0;
  [[nodiscard]] virtual double do_predict(std::span<const double> x) const = 0;
  [[nodiscard]] virtual nlohmann::json state_to_json() const = 0;
  virtual void state_from_json(const nlohmann::json& j) = 0;

  Hyperparams hyper_;

 private:
  bool fitted_ = false;
  std::size_t n_features_ = 0;
};

}  // namespace qmem::ml
