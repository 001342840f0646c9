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
#include <chrono>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "qmem/data.hpp"
#include "qmem/ml/core.hpp"
#include "qmem/ml/models.hpp"

namespace qmem::ml {

struct LeaderboardRow {
  std::string kind;
  EvalMetrics metrics;
  std::string error;  // empty on success
};

struct TrainTest {
  Problem train;
  Problem test;
};

inline TrainTest split_problem(const Problem& p, const SplitSpec& spec) {
  const SplitIndices s = split(p.y.size(), spec);
  TrainTest out;
  out.train.feature_names = out.test.feature_names = p.feature_names;
  out.train.x = p.x.select(s.train);
  out.test.x = p.x.select(s.test);
  for (std::size_t i : s.train) out.train.y.push_back(p.y[i]);
  for (std::size_t i : s.test) out.test.y.push_back(p.y[i]);
  return out;
}

/// Fits `m` on the training part and scores it on the test part. Adjusted R^2
/// uses the test row count and the raw feature count.
inline EvalMetrics fit_and_score(Regressor& m, const TrainTest& tt) {
  const auto t0 = std::chrono::steady_clock::now();
  m.fit(tt.train.x, tt.train.y);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EvalMetrics e = evaluate(tt.test.y, m.predict(tt.test.x), tt.test.x.cols);
  e.fit_seconds = secs;
  return e;
}

/// One row per kind on a shared split, sorted by adjusted R^2 (descending);
/// failed kinds are kept at the bottom with their error message.
inline std::vector<LeaderboardRow> benchmark(const Dataset& ds, const SplitSpec& spec,
                                             const std::vector<std::string>& kinds, const Hyperparams& h = {}) {
  const TrainTest tt = split_problem(to_problem(ds), spec);
  std::vector<LeaderboardRow> rows;
  for (const auto& k : kinds) {
    LeaderboardRow r;
    r.kind = k;
    try {
      auto m = make_regressor(k, h);
      r.metrics = fit_and_score(*m, tt);
    } catch (const Error& e) {
      r.error = e.what();
    }
    rows.push_back(std::move(r));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
    if (a.error.empty() != b.error.empty()) return a.error.empty();
    return a.error.empty() && a.metrics.adjusted_r2 > b.metrics.adjusted_r2;
  });
  return rows;
}

/// CSV with header model,adjusted_r2,r2,rmse,fit_seconds,error.
inline void write_leaderboard_csv(std::ostream& os, const std::vector<LeaderboardRow>& rows) {
  os << "model,adjusted_r2,r2,rmse,fit_seconds,error\n";
  char buf[160];
  for (const auto& r : rows) {
    if (r.error.empty()) {
      std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.6f,", r.kind.c_str(), r.metrics.adjusted_r2,
                    r.metrics.r2, r.metrics.rmse, r.metrics.fit_seconds);
      os << buf << '\n';
    } else {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      os << r.kind << ",,,,," << msg << '\n';
    }
  }
}

inline void write_leaderboard_table(std::ostream& os, const std::vector<LeaderboardRow>& rows) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-18s %12s %10s %12s %10s\n", "Model", "Adjusted R2", "R2", "RMSE", "Time (s)");
  os << buf;
  for (const auto& r : rows) {
    if (r.error.empty())
      std::snprintf(buf, sizeof buf, "%-18s %12.4f %10.4f %12.6f %10.3f\n", r.kind.c_str(), r.metrics.adjusted_r2,
                    r.metrics.r2, r.metrics.rmse, r.metrics.fit_seconds);
    else
      std::snprintf(buf, sizeof buf, "%-18s  failed: %.150s\n", r.kind.c_str(), r.error.c_str());
    os << buf;
  }
}

}  // namespace qmem::ml
