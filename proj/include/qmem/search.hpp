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

// Surrogate-driven search for extreme form factors and the comparison of an
// optimal and a sub-optimal coupled configuration.
//
// Tree surrogates are piecewise constant, so the search is derivative free:
// random multistart, then coordinate-wise golden-section refinement of the
// best starts. Coordinates restricted to a set of levels (the grid features
// of a dataset) are refined by trying every level instead.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "qmem/data.hpp"
#include "qmem/entanglement.hpp"
#include "qmem/error.hpp"
#include "qmem/ml/models.hpp"
#include "qmem/parallel.hpp"
#include "qmem/random.hpp"
#include "qmem/simulation.hpp"

namespace qmem {

struct SearchDim {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> levels;  // non-empty: coordinate restricted to these values
};

enum class Objective { maximize, minimize };

struct SearchSpec {
  std::vector<SearchDim> dims;
  std::size_t random_starts = 512;
  std::size_t iterations = 100;  // golden-section steps per coordinate
  std::size_t scan_points = 64;  // even grid per coordinate before golden-section; < 2 = none
  std::size_t refine_top = 64;   // best starts that get refined
  std::size_t sweeps = 2;        // coordinate passes per refined start
  Objective objective = Objective::maximize;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  /// Optional restriction of the feasible set; rejected points are neither
  /// evaluated nor recorded.
  std::function<bool(const std::vector<double>&)> admissible;

  void validate() const {
    if (dims.empty()) throw ConfigError("search: no dimensions");
    if (random_starts == 0) throw ConfigError("search: need at least one start");
    for (const auto& d : dims) {
      if (d.levels.empty() && !(d.lo <= d.hi)) throw ConfigError("search: bad bounds for '" + d.name + "'");
    }
  }
};

struct Candidate {
  std::vector<double> x;
  double value = 0.0;  // surrogate value
};

struct SearchResult {
  std::vector<std::string> names;
  std::vector<double> best;
  double surrogate_value = 0.0;
  std::optional<double> simulated_value;
  std::vector<Candidate> trace;
};

/// Bounds from the data: a feature with at most `max_levels` distinct values
/// becomes a level set, anything else a continuous range [min, max].
inline std::vector<SearchDim> search_dims_from(const Dataset& ds, std::size_t max_levels = 16) {
  std::vector<SearchDim> dims;
  for (const auto& name : ds.feature_names()) {
    const std::vector<double> col = ds.column(ds.column_index(name));
    if (col.empty()) throw ConfigError("search: empty dataset");
    const std::set<double> distinct(col.begin(), col.end());
    SearchDim d{name, *distinct.begin(), *distinct.rbegin(), {}};
    if (distinct.size() <= max_levels) d.levels.assign(distinct.begin(), distinct.end());
    dims.push_back(std::move(d));
  }
  return dims;
}

namespace detail {

class Searcher {
 public:
  Searcher(std::function<double(const std::vector<double>&)> f, const SearchSpec& spec)
      : f_(std::move(f)), spec_(spec), sign_(spec.objective == Objective::maximize ? 1.0 : -1.0) {}

  SearchResult run() {
    spec_.validate();
    const std::size_t d = spec_.dims.size();

    // Random starts, evaluated in parallel; each start has its own stream.
    std::vector<Candidate> starts(spec_.random_starts);
    parallel_for(starts.size(), spec_.workers, [&](std::size_t s) {
      Rng rng(derive_seed(spec_.seed, s));
      std::vector<double> x(d);
      for (std::size_t j = 0; j < d; ++j) {
        const SearchDim& dim = spec_.dims[j];
        x[j] = dim.levels.empty() ? rng.uniform(dim.lo, dim.hi) : dim.levels[rng.below(dim.levels.size())];
      }
      starts[s] = {x, admissible(x) ? f_(x) : worst()};
    });
    for (const auto& c : starts)
      if (admissible(c.x)) record(c);
    if (trace_.empty()) throw ConfigError("search: no admissible random start");

    std::vector<std::size_t> order(starts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sign_ * starts[a].value > sign_ * starts[b].value; });
    const std::size_t top = std::min(spec_.refine_top, order.size());
    std::vector<std::vector<Candidate>> traces(top);
    parallel_for(top, spec_.workers, [&](std::size_t k) { traces[k] = refine(starts[order[k]]); });
    for (const auto& t : traces)
      for (const auto& c : t) record(c);

    SearchResult r;
    for (const auto& dim : spec_.dims) r.names.push_back(dim.name);
    r.best = trace_[best_].x;
    r.surrogate_value = trace_[best_].value;
    r.trace = std::move(trace_);
    return r;
  }

 private:
  bool admissible(const std::vector<double>& x) const { return !spec_.admissible || spec_.admissible(x); }
  double worst() const { return -sign_ * std::numeric_limits<double>::infinity(); }

  void record(const Candidate& c) {
    trace_.push_back(c);
    if (trace_.size() == 1 || sign_ * c.value > sign_ * trace_[best_].value) best_ = trace_.size() - 1;
  }

  std::vector<Candidate> refine(Candidate cur) const {
    std::vector<Candidate> log;
    auto eval = [&](const std::vector<double>& x) {
      if (!admissible(x)) return Candidate{x, worst()};
      Candidate c{x, f_(x)};
      log.push_back(c);
      return c;
    };
    for (std::size_t sweep = 0; sweep < spec_.sweeps; ++sweep) {
      for (std::size_t j = 0; j < spec_.dims.size(); ++j) {
        const SearchDim& dim = spec_.dims[j];
        if (!dim.levels.empty()) {
          for (double level : dim.levels) {
            if (level == cur.x[j]) continue;
            auto x = cur.x;
            x[j] = level;
            const Candidate c = eval(x);
            if (sign_ * c.value > sign_ * cur.value) cur = c;
          }
          continue;
        }
        if (!(dim.hi > dim.lo)) continue;
        auto at = [&](double v) {
          auto x = cur.x;
          x[j] = v;
          return eval(x);
        };
        // A coarse scan picks the bracket; tree surrogates are piecewise
        // constant and multimodal along a coordinate.
        double a = dim.lo, b = dim.hi;
        if (spec_.scan_points >= 2) {
          const double h = (dim.hi - dim.lo) / static_cast<double>(spec_.scan_points - 1);
          std::size_t k_best = 0;
          double v_best = -std::numeric_limits<double>::infinity();
          for (std::size_t k = 0; k < spec_.scan_points; ++k) {
            const Candidate c = at(k + 1 == spec_.scan_points ? dim.hi : dim.lo + h * static_cast<double>(k));
            if (sign_ * c.value > v_best) {
              v_best = sign_ * c.value;
              k_best = k;
              if (sign_ * c.value > sign_ * cur.value) cur = c;
            }
          }
          a = std::max(dim.lo, dim.lo + h * (static_cast<double>(k_best) - 1.0));
          b = std::min(dim.hi, dim.lo + h * (static_cast<double>(k_best) + 1.0));
        }
        constexpr double inv_phi = 0.6180339887498949;
        double c1 = b - inv_phi * (b - a), c2 = a + inv_phi * (b - a);
        Candidate f1 = at(c1), f2 = at(c2);
        for (std::size_t it = 0; it < spec_.iterations && b - a > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
          if (sign_ * f1.value >= sign_ * f2.value) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - inv_phi * (b - a);
            f1 = at(c1);
          } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + inv_phi * (b - a);
            f2 = at(c2);
          }
        }
        const Candidate& best = sign_ * f1.value >= sign_ * f2.value ? f1 : f2;
        if (sign_ * best.value > sign_ * cur.value) cur = best;
      }
    }
    return log;
  }

  std::function<double(const std::vector<double>&)> f_;
  SearchSpec spec_;
  double sign_;
  std::vector<Candidate> trace_;
  std::size_t best_ = 0;
};

}  // namespace detail

/// Searches the objective `f` over spec.dims. The result is the best point of
/// the whole trace (every evaluated candidate is recorded).
inline SearchResult optimize(std::function<double(const std::vector<double>&)> f, const SearchSpec& spec) {
  return detail::Searcher(std::move(f), spec).run();
}

inline SearchResult optimize(const ml::Regressor& model, const SearchSpec& spec) {
  if (model.n_features() != spec.dims.size()) throw DimensionError("search: model and search dimensions differ");
  return optimize([&model](const std::vector<double>& x) { return model.predict_one(x); }, spec);
}

/// Admits only points where at least one of c12, l12 is non-zero, i.e. the
/// two memristors are actually coupled. Dimensions without these names are
/// unconstrained.
inline std::function<bool(const std::vector<double>&)> coupled_only(const std::vector<SearchDim>& dims) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < dims.size(); ++j)
    if (dims[j].name == "c12" || dims[j].name == "l12") idx.push_back(j);
  if (idx.empty()) return {};
  return [idx](const std::vector<double>& x) {
    return std::any_of(idx.begin(), idx.end(), [&](std::size_t j) { return x[j] != 0.0; });
  };
}

/// Mean per-period form factor of the simulated configuration (memristor 1).
inline double simulated_form_factor(const SimulationConfig& cfg, const Configuration& c) {
  return simulate(cfg, c).loops.front().mean_form_factor;
}

inline Configuration configuration_of(const SearchResult& r, std::size_t n_memristors) {
  return configuration_from(r.names, r.best, n_memristors);
}

inline void verify(SearchResult& r, const SimulationConfig& cfg, std::size_t n_memristors) {
  r.simulated_value = simulated_form_factor(cfg, configuration_of(r, n_memristors));
}

/// CSV with the feature columns, then value.
inline void write_trace_csv(std::ostream& os, const SearchResult& r) {
  for (const auto& n : r.names) os << n << ',';
  os << "value\n";
  for (const auto& c : r.trace) {
    for (double v : c.x) os << format_double(v) << ',';
    os << format_double(c.value) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Optimal versus sub-optimal comparison

struct ComparisonRun {
  Configuration config;
  SimulationResult result;
  std::vector<ConcurrencePoint> concurrence;
};

struct ComparisonReport {
  ComparisonRun optimal;
  ComparisonRun suboptimal;
};

inline ComparisonRun run_for_comparison(const SimulationConfig& cfg, const Configuration& c) {
  if (c.n_memristors != 2) throw ConfigError("compare: two memristors required");
  ComparisonRun run;
  run.config = c;
  run.result = simulate(cfg, c, /*record_rho=*/true);
  run.concurrence = concurrence_series(run.result.trajectory, nullptr);
  return run;
}

/// Simulates both coupled configurations for `periods` drive periods with the
/// density matrix recorded.
inline ComparisonReport compare(SimulationConfig cfg, const Configuration& optimal, const Configuration& suboptimal,
                                std::size_t periods = 20) {
  if (cfg.trunc != 2) throw ConfigError("compare: concurrence needs trunc = 2");
  cfg.integrator.periods = periods;
  return {run_for_comparison(cfg, optimal), run_for_comparison(cfg, suboptimal)};
}

struct ComparisonSummary {
  std::size_t periods = 0;
  std::size_t periods_opt_above = 0;  // periods with F(opt) > F(sub)
  double mean_f_opt = 0.0;
  double mean_f_sub = 0.0;
  double peak_c_opt = 0.0;
  double peak_c_sub = 0.0;
  double late_c_opt = 0.0;  // mean concurrence over the last `late_periods` periods
  double late_c_sub = 0.0;
  std::size_t late_periods = 5;

  [[nodiscard]] bool opt_above_every_period() const { return periods > 0 && periods_opt_above == periods; }
  /// late mean / peak; a smaller value means the concurrence decays faster.
  [[nodiscard]] double retention_opt() const { return peak_c_opt > 0.0 ? late_c_opt / peak_c_opt : 0.0; }
  [[nodiscard]] double retention_sub() const { return peak_c_sub > 0.0 ? late_c_sub / peak_c_sub : 0.0; }
};

inline ComparisonSummary summarize(const ComparisonReport& rep, std::size_t late_periods = 5) {
  ComparisonSummary s;
  s.late_periods = late_periods;
  const auto& po = rep.optimal.result.loops.front().periods;
  const auto& ps = rep.suboptimal.result.loops.front().periods;
  s.periods = std::min(po.size(), ps.size());
  for (std::size_t k = 0; k < s.periods; ++k)
    if (po[k].form_factor > ps[k].form_factor) ++s.periods_opt_above;
  s.mean_f_opt = rep.optimal.result.loops.front().mean_form_factor;
  s.mean_f_sub = rep.suboptimal.result.loops.front().mean_form_factor;

  auto conc = [&](const ComparisonRun& run, double& peak, double& late) {
    const Trajectory& tr = run.result.trajectory;
    const double t_late = tr.times.back() - static_cast<double>(late_periods) * tr.period;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& p : run.concurrence) {
      peak = std::max(peak, p.concurrence);
      if (p.t >= t_late - 1e-9 * tr.period) {
        sum += p.concurrence;
        ++n;
      }
    }
    late = n ? sum / static_cast<double>(n) : 0.0;
  };
  conc(rep.optimal, s.peak_c_opt, s.late_c_opt);
  conc(rep.suboptimal, s.peak_c_sub, s.late_c_sub);
  return s;
}

inline void write_summary(std::ostream& os, const ComparisonReport& rep, const ComparisonSummary& s) {
  auto cfg_line = [&](const char* label, const Configuration& c) {
    os << label << ": c12=" << format_double(c.c12) << " l12=" << format_double(c.l12)
       << " phi=" << format_double(c.phi) << " lambda=" << format_double(c.lambda) << '\n';
  };
  cfg_line("optimal", rep.optimal.config);
  cfg_line("suboptimal", rep.suboptimal.config);
  os << "periods=" << s.periods << '\n'
     << "periods_optimal_above=" << s.periods_opt_above << '\n'
     << "mean_form_factor_optimal=" << format_double(s.mean_f_opt) << '\n'
     << "mean_form_factor_suboptimal=" << format_double(s.mean_f_sub) << '\n'
     << "peak_concurrence_optimal=" << format_double(s.peak_c_opt) << '\n'
     << "peak_concurrence_suboptimal=" << format_double(s.peak_c_sub) << '\n'
     << "late_mean_concurrence_optimal=" << format_double(s.late_c_opt) << '\n'
     << "late_mean_concurrence_suboptimal=" << format_double(s.late_c_sub) << '\n';
}

/// Writes optimal.csv, suboptimal.csv (trajectories), formfactor_compare.csv,
/// concurrence_compare.csv and summary.txt into `dir`.
inline ComparisonSummary write_report(const std::filesystem::path& dir, const ComparisonReport& rep) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + (dir / name).string() + "'");
    return os;
  };
  {
    auto os = open("optimal.csv");
    write_trajectory_csv(os, rep.optimal.result.trajectory);
  }
  {
    auto os = open("suboptimal.csv");
    write_trajectory_csv(os, rep.suboptimal.result.trajectory);
  }
  {
    auto os = open("formfactor_compare.csv");
    os << "period,form_factor_optimal,form_factor_suboptimal\n";
    const auto& po = rep.optimal.result.loops.front().periods;
    const auto& ps = rep.suboptimal.result.loops.front().periods;
    for (std::size_t k = 0; k < std::min(po.size(), ps.size()); ++k)
      os << k << ',' << format_double(po[k].form_factor) << ',' << format_double(ps[k].form_factor) << '\n';
  }
  {
    auto os = open("concurrence_compare.csv");
    os << "t,concurrence_optimal,concurrence_suboptimal\n";
    const auto& co = rep.optimal.concurrence;
    const auto& cs = rep.suboptimal.concurrence;
    for (std::size_t k = 0; k < std::min(co.size(), cs.size()); ++k)
      os << format_double(co[k].t) << ',' << format_double(co[k].concurrence) << ','
         << format_double(cs[k].concurrence) << '\n';
  }
  const ComparisonSummary s = summarize(rep);
  auto os = open("summary.txt");
  write_summary(os, rep, s);
  return s;
}

}  // namespace qmem
