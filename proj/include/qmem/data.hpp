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

// Parameter sweeps: seeded sampling, parallel dataset generation, CSV I/O
// and quartile summaries.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qmem/error.hpp"
#include "qmem/parallel.hpp"
#include "qmem/random.hpp"
#include "qmem/simulation.hpp"

namespace qmem {

enum class SampleMode { uniform, grid };

struct FeatureRange {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  SampleMode mode = SampleMode::uniform;
  std::size_t levels = 0;  // grid only
  bool open_low = false;   // uniform draws in (min, max] instead of [min, max)

  void validate() const {
    if (!(min <= max)) throw ConfigError("feature '" + name + "': min must be <= max");
    if (mode == SampleMode::grid && levels < 2) throw ConfigError("feature '" + name + "': grid needs >= 2 levels");
  }

  /// Grid value k of levels, both endpoints included.
  [[nodiscard]] double level(std::size_t k) const {
    if (k + 1 == levels) return max;
    return min + (max - min) * static_cast<double>(k) / static_cast<double>(levels - 1);
  }
};

struct ParamSpace {
  std::size_t n_memristors = 1;
  std::vector<FeatureRange> features;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_memristors != 1 && n_memristors != 2) throw ConfigError("ParamSpace: 1 or 2 memristors");
    if (features.empty()) throw ConfigError("ParamSpace: no features");
    for (const auto& f : features) {
      f.validate();
      const bool known = f.name == "phi" || f.name == "lambda" || (n_memristors == 2 && (f.name == "c12" || f.name == "l12"));
      if (!known) throw ConfigError("ParamSpace: unknown feature '" + f.name + "'");
    }
  }

  [[nodiscard]] std::size_t grid_size() const {
    std::size_t n = 1;
    for (const auto& f : features)
      if (f.mode == SampleMode::grid) n *= f.levels;
    return n;
  }

  [[nodiscard]] bool all_grid() const {
    return std::all_of(features.begin(), features.end(), [](const auto& f) { return f.mode == SampleMode::grid; });
  }
};

/// phi in [0, 2 pi), lambda in (0, 100].
inline ParamSpace single_space(std::uint64_t seed = 0) {
  return {1,
          {{"phi", 0.0, 2.0 * std::numbers::pi, SampleMode::uniform, 0, false},
           {"lambda", 0.0, 100.0, SampleMode::uniform, 0, true}},
          seed};
}

/// c12 and l12 on a 10-level grid including 0, phi and lambda drawn as for one memristor.
inline ParamSpace coupled_space(std::uint64_t seed = 0) {
  ParamSpace s = single_space(seed);
  s.n_memristors = 2;
  s.features.insert(s.features.begin(), {{"c12", 0.0, 2e-12, SampleMode::grid, 10, false},
                                         {"l12", 0.0, 2e-8, SampleMode::grid, 10, false}});
  return s;
}

/// Feature rows in the order of space.features.
///
/// All-grid spaces give the full Cartesian product (n ignored, first feature
/// varies slowest). Otherwise row i takes grid combination i mod (product of
/// levels) and draws its uniform features from its own stream, so a row does
/// not depend on n.
inline std::vector<std::vector<double>> sample(const ParamSpace& space, std::size_t n) {
  space.validate();
  const std::size_t combos = space.grid_size();
  if (space.all_grid()) n = combos;
  if (n == 0) throw ConfigError("sample: n must be >= 1");
  std::vector<std::vector<double>> rows(n, std::vector<double>(space.features.size()));
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(space.seed, i));
    std::size_t combo = i % combos;
    std::size_t stride = combos;
    for (std::size_t j = 0; j < space.features.size(); ++j) {
      const FeatureRange& f = space.features[j];
      if (f.mode == SampleMode::grid) {
        stride /= f.levels;
        rows[i][j] = f.level(combo / stride);
        combo %= stride;
      } else if (f.open_low) {
        rows[i][j] = f.max - (f.max - f.min) * rng.uniform01();
      } else {
        rows[i][j] = rng.uniform(f.min, f.max);
      }
    }
  }
  return rows;
}

/// Maps named feature values onto a sweep configuration.
inline Configuration configuration_from(const std::vector<std::string>& names, const std::vector<double>& values,
                                        std::size_t n_memristors) {
  if (names.size() != values.size()) throw DimensionError("configuration_from: names/values size mismatch");
  Configuration c;
  c.n_memristors = n_memristors;
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == "phi") c.phi = values[j];
    else if (names[j] == "lambda") c.lambda = values[j];
    else if (names[j] == "c12") c.c12 = values[j];
    else if (names[j] == "l12") c.l12 = values[j];
    else throw ConfigError("unknown feature '" + names[j] + "'");
  }
  return c;
}

/// Column-named table of doubles. Datasets use the feature columns followed by
/// form_factor (and form_factor_2 for two memristors).
struct Dataset {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  [[nodiscard]] std::size_t size() const { return rows.size(); }
  [[nodiscard]] bool empty() const { return rows.empty(); }

  [[nodiscard]] std::size_t column_index(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ConfigError("dataset has no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
  }

  [[nodiscard]] std::vector<double> column(std::size_t j) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(j));
    return out;
  }

  /// Feature column names: everything that is not a form-factor target.
  [[nodiscard]] std::vector<std::string> feature_names() const {
    std::vector<std::string> out;
    for (const auto& c : columns)
      if (c != "form_factor" && c != "form_factor_2") out.push_back(c);
    return out;
  }

  [[nodiscard]] std::size_t n_memristors() const {
    return std::find(columns.begin(), columns.end(), "form_factor_2") != columns.end() ? 2 : 1;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

inline std::vector<std::string> dataset_columns(std::size_t n_memristors) {
  if (n_memristors == 2) return {"c12", "l12", "phi", "lambda", "form_factor", "form_factor_2"};
  return {"phi", "lambda", "form_factor"};
}

struct GenerateOptions {
  std::size_t workers = 0;  // 0 = hardware concurrency
  std::ostream* progress = nullptr;
  /// Largest accepted |F1 - F2| for two memristors before the row is rejected.
  double symmetry_tol = 1e-9;
};

struct RowFailure {
  std::size_t row = 0;
  std::string message;
};

struct GenerateResult {
  Dataset data;
  std::vector<RowFailure> failures;
};

/// Simulates every sampled row (in parallel) and returns the successful rows
/// in input order. The initial polar angle is the one in cfg (pi/2 by default).
inline GenerateResult generate(const ParamSpace& space, std::size_t n, const SimulationConfig& cfg,
                               const GenerateOptions& opts = {}) {
  validate(cfg);
  const auto inputs = sample(space, n);
  std::vector<std::string> names;
  for (const auto& f : space.features) names.push_back(f.name);

  // Column order of the written dataset, independent of the feature order in space.
  GenerateResult out;
  out.data.columns = dataset_columns(space.n_memristors);
  std::vector<std::size_t> source;
  for (std::size_t j = 0; j + space.n_memristors < out.data.columns.size(); ++j) {
    const auto it = std::find(names.begin(), names.end(), out.data.columns[j]);
    if (it == names.end()) throw ConfigError("generate: space lacks feature '" + out.data.columns[j] + "'");
    source.push_back(static_cast<std::size_t>(it - names.begin()));
  }

  std::vector<std::optional<std::vector<double>>> rows(inputs.size());
  std::vector<std::string> errors(inputs.size());
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  const std::size_t report_every = std::max<std::size_t>(1, inputs.size() / 20);

  parallel_for(inputs.size(), opts.workers, [&](std::size_t i) {
    try {
      const Configuration c = configuration_from(names, inputs[i], space.n_memristors);
      const SimulationResult r = simulate(cfg, c);
      std::vector<double> row;
      for (std::size_t s : source) row.push_back(inputs[i][s]);
      if (space.n_memristors == 2) {
        const double f1 = r.loops[0].mean_form_factor, f2 = r.loops[1].mean_form_factor;
        if (!(std::abs(f1 - f2) <= opts.symmetry_tol))
          throw DivergedError("memristor form factors differ by " + std::to_string(std::abs(f1 - f2)));
        const double f = 0.5 * (f1 + f2);
        row.push_back(f);
        row.push_back(f);
      } else {
        row.push_back(r.loops[0].mean_form_factor);
      }
      rows[i] = std::move(row);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
    const std::size_t k = ++done;
    if (opts.progress && (k % report_every == 0 || k == inputs.size())) {
      std::lock_guard lock(progress_mutex);
      *opts.progress << "generate: " << k << "/" << inputs.size() << " rows\n";
    }
  });

  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i]) out.data.rows.push_back(std::move(*rows[i]));
    else out.failures.push_back({i, errors[i]});
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const Dataset& ds) {
  for (std::size_t j = 0; j < ds.columns.size(); ++j) os << (j ? "," : "") << ds.columns[j];
  os << '\n';
  for (const auto& r : ds.rows) {
    for (std::size_t j = 0; j < r.size(); ++j) os << (j ? "," : "") << format_double(r[j]);
    os << '\n';
  }
}

inline void write_csv(const std::string& path, const Dataset& ds) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  write_csv(os, ds);
  if (!os) throw ConfigError("write failed for '" + path + "'");
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

/// Reads any numeric CSV with a header row. Blank lines are skipped.
inline Dataset read_csv(std::istream& in) {
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (ds.columns.empty()) {
      for (const auto& c : cells)
        if (c.empty()) throw ParseError("empty column name in header", line_no);
      ds.columns = std::move(cells);
      continue;
    }
    if (cells.size() != ds.columns.size())
      throw ParseError("expected " + std::to_string(ds.columns.size()) + " columns, found " +
                           std::to_string(cells.size()),
                       line_no);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || end != c.c_str() + c.size()) throw ParseError("not a number: '" + c + "'", line_no);
      row.push_back(v);
    }
    ds.rows.push_back(std::move(row));
  }
  if (ds.columns.empty()) throw ParseError("missing header row", std::max<std::size_t>(line_no, 1));
  return ds;
}

inline Dataset read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_csv(in);
}

// ---------------------------------------------------------------------------
// Summary statistics

struct ColumnSummary {
  std::string name;
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // n - 1 denominator; 0 for a single value
  double min = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double max = 0.0;
};

/// Quantile q of sorted data with linear interpolation between order statistics.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw ConfigError("quantile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline ColumnSummary summarize(const std::string& name, std::vector<double> v) {
  if (v.empty()) throw ConfigError("stats: empty column '" + name + "'");
  std::sort(v.begin(), v.end());
  ColumnSummary s;
  s.name = name;
  s.count = v.size();
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  s.min = v.front();
  s.max = v.back();
  s.q25 = quantile_sorted(v, 0.25);
  s.q50 = quantile_sorted(v, 0.50);
  s.q75 = quantile_sorted(v, 0.75);
  return s;
}

inline std::vector<ColumnSummary> stats(const Dataset& ds) {
  if (ds.empty()) throw ConfigError("stats: dataset is empty");
  std::vector<ColumnSummary> out;
  for (std::size_t j = 0; j < ds.columns.size(); ++j) out.push_back(summarize(ds.columns[j], ds.column(j)));
  return out;
}

/// Rows count, mean, std, min, 25%, 50%, 75%, max; one column per dataset column.
inline void write_stats_table(std::ostream& os, const std::vector<ColumnSummary>& s) {
  auto cell = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  const char* labels[] = {"count", "mean", "std", "min", "25%", "50%", "75%", "max"};
  std::vector<std::vector<std::string>> cols;
  std::vector<std::size_t> width;
  for (const auto& c : s) {
    cols.push_back({std::to_string(c.count), cell(c.mean), cell(c.std), cell(c.min), cell(c.q25), cell(c.q50),
                    cell(c.q75), cell(c.max)});
    std::size_t w = c.name.size();
    for (const auto& x : cols.back()) w = std::max(w, x.size());
    width.push_back(w);
  }
  auto pad = [](const std::string& x, std::size_t w) { return std::string(w - std::min(w, x.size()), ' ') + x; };
  os << pad("", 5);
  for (std::size_t j = 0; j < s.size(); ++j) os << "  " << pad(s[j].name, width[j]);
  os << '\n';
  for (std::size_t r = 0; r < 8; ++r) {
    os << pad(labels[r], 5);
    for (std::size_t j = 0; j < s.size(); ++j) os << "  " << pad(cols[j][r], width[j]);
    os << '\n';
  }
}

}  // namespace qmem
