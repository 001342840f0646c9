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

// Command-line front end. dispatch() parses argv, runs one subcommand and
// returns the process exit code: 0 on success, 2 for bad usage, 1 for
// runtime failures.
//
// Every run writes a manifest next to its output: the command line as a
// comment followed by the resolved configuration in config-file format, so
// `qmemlab --config <manifest> <same command>` reproduces the run.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qmem/data.hpp"
#include "qmem/entanglement.hpp"
#include "qmem/error.hpp"
#include "qmem/loops.hpp"
#include "qmem/ml/benchmark.hpp"
#include "qmem/ml/models.hpp"
#include "qmem/search.hpp"
#include "qmem/simulation.hpp"
#include "qmem/svg.hpp"

namespace qmem::cli {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t workers = 0;
  std::optional<std::size_t> trunc;
  std::optional<std::size_t> periods;
  std::optional<std::size_t> steps_per_period;
};

namespace detail {

inline std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + p.string() + "'");
  return os;
}

inline std::string quote(const std::string& s) {
  if (!s.empty() && s.find_first_of(" \t\"'\\$") == std::string::npos) return s;
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

inline void write_manifest(const fs::path& path, const std::vector<std::string>& argv, const SimulationConfig& cfg,
                           const std::map<std::string, std::string>& extra) {
  auto os = open_out(path);
  os << "# command:";
  for (const auto& a : argv) os << ' ' << quote(a);
  os << '\n';
  for (const auto& [k, v] : extra) os << "# " << k << ": " << v << '\n';
  for (const auto& [k, v] : to_settings(cfg)) os << k << " = " << v << '\n';
}

inline ml::Problem problem_of(const Dataset& ds) { return ml::to_problem(ds); }

inline std::unique_ptr<ml::Regressor> fit_surrogate(const Dataset& ds, const std::string& kind, ml::Hyperparams h) {
  auto m = ml::make_regressor(kind, h);
  const ml::Problem p = problem_of(ds);
  m->fit(p.x, p.y);
  return m;
}

inline std::vector<double> parse_point(const std::string& text, std::size_t n, const char* what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(qmem::detail::parse_double(qmem::detail::trim(item), what));
  if (v.size() != n) throw ConfigError(std::string(what) + ": expected " + std::to_string(n) + " comma-separated values");
  return v;
}

}  // namespace detail

/// Runs the command line; argv[0] is the program name.
inline int dispatch(const std::vector<std::string>& argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"qmemlab: quantum memristor simulation, datasets, surrogate models and search"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--out", g.out, "output file or directory");
  app.add_option("--workers", g.workers, "worker threads (0 = all cores)");
  app.add_option("--trunc", g.trunc, "levels per mode (2..4)");
  app.add_option("--periods", g.periods, "drive periods to integrate");
  app.add_option("--steps-per-period", g.steps_per_period, "RK4 steps per drive period");

  ml::Hyperparams h;
  auto add_model_flags = [&h](CLI::App* sub) {
    sub->add_option("--trees", h.n_trees, "trees per forest");
    sub->add_option("--rounds", h.rounds, "boosting rounds");
    sub->add_option("--learning-rate", h.learning_rate, "boosting shrinkage");
    sub->add_option("--max-depth", h.max_depth, "tree depth for trees and forests (0 = unlimited)");
    sub->add_option("--min-leaf", h.min_leaf, "minimum rows per leaf for trees and forests");
    sub->add_option("--boost-depth", h.boost_depth, "tree depth for boosting");
    sub->add_option("--bins", h.bins, "histogram bins for hist-gbdt");
    sub->add_flag("--goss", h.goss, "gradient-based one-side sampling for boosting");
    sub->add_option("--knn-k", h.knn_k, "neighbours for knn");
  };

  // simulate
  double lambda = 1.0, phi = 0.0, c12 = 0.0, l12 = 0.0;
  bool coupled = false;
  auto* sim = app.add_subcommand("simulate", "integrate one configuration; writes trajectory and loop CSVs");
  sim->add_option("--lambda", lambda, "spectral-density amplitude")->check(CLI::NonNegativeNumber);
  sim->add_option("--phi", phi, "initial relative phase (rad)");
  sim->add_flag("--coupled", coupled, "two coupled memristors");
  sim->add_option("--c12", c12, "coupling capacitance (F)");
  sim->add_option("--l12", l12, "coupling inductance (H), 0 = none");

  // dataset
  std::size_t n_rows = 2000;
  std::size_t grid_levels = 0;
  bool single = false;
  auto* dset = app.add_subcommand("dataset", "generate a seeded dataset CSV");
  auto* single_flag = dset->add_flag("--single", single, "one memristor (default)");
  dset->add_flag("--coupled", coupled, "two coupled memristors")->excludes(single_flag);
  dset->add_option("--n", n_rows, "rows (ignored with --grid)")->check(CLI::PositiveNumber);
  dset->add_option("--grid", grid_levels, "full Cartesian grid with this many levels per feature")
      ->check(CLI::Range(2, 1000));

  // stats
  std::string data_path;
  auto* st = app.add_subcommand("stats", "quartile table of a dataset");
  st->add_option("--data", data_path, "dataset CSV")->required()->check(CLI::ExistingFile);

  // train
  std::string model_kind = "hist-gbdt";
  auto* tr = app.add_subcommand("train", "fit one model on the training split and save it");
  tr->add_option("--data", data_path, "dataset CSV")->required()->check(CLI::ExistingFile);
  tr->add_option("--model", model_kind, "model kind")->check(CLI::IsMember(ml::regressor_kinds()));
  add_model_flags(tr);

  // benchmark
  std::vector<std::string> kinds;
  auto* bm = app.add_subcommand("benchmark", "leaderboard of all models on a 2/3-1/3 split");
  bm->add_option("--data", data_path, "dataset CSV")->required()->check(CLI::ExistingFile);
  bm->add_option("--models", kinds, "subset of model kinds")->check(CLI::IsMember(ml::regressor_kinds()));
  add_model_flags(bm);

  // optimize
  std::string model_file;
  bool minimize = false, allow_uncoupled = false, no_verify = false;
  SearchSpec search_defaults;
  std::size_t starts = search_defaults.random_starts, iterations = search_defaults.iterations;
  auto* opt = app.add_subcommand("optimize", "surrogate search for the extreme form factor, then re-simulate");
  opt->add_option("--data", data_path, "dataset CSV (bounds, and training data without --model-file)")
      ->required()
      ->check(CLI::ExistingFile);
  opt->add_option("--model", model_kind, "surrogate kind")->check(CLI::IsMember(ml::regressor_kinds()));
  opt->add_option("--model-file", model_file, "previously saved model")->check(CLI::ExistingFile);
  opt->add_flag("--minimize", minimize, "search the lowest form factor");
  opt->add_flag("--allow-uncoupled", allow_uncoupled, "also admit c12 = l12 = 0 for two memristors");
  opt->add_flag("--no-verify", no_verify, "skip the re-simulation of the optimum");
  opt->add_option("--starts", starts, "random starts")->check(CLI::PositiveNumber);
  opt->add_option("--iterations", iterations, "golden-section steps per coordinate");
  add_model_flags(opt);

  // compare
  std::string opt_point, sub_point;
  std::size_t compare_periods = 20;
  auto* cmp = app.add_subcommand("compare", "optimal versus sub-optimal coupled configuration over many periods");
  cmp->add_option("--data", data_path, "coupled dataset CSV for the surrogate")->check(CLI::ExistingFile);
  cmp->add_option("--model", model_kind, "surrogate kind")->check(CLI::IsMember(ml::regressor_kinds()));
  cmp->add_option("--optimal", opt_point, "explicit c12,l12,phi,lambda instead of a search");
  cmp->add_option("--suboptimal", sub_point, "explicit c12,l12,phi,lambda instead of a search");
  cmp->add_option("--compare-periods", compare_periods, "periods to simulate")->check(CLI::PositiveNumber);
  cmp->add_flag("--allow-uncoupled", allow_uncoupled, "also admit c12 = l12 = 0 in the search");
  cmp->add_option("--starts", starts, "random starts")->check(CLI::PositiveNumber);
  add_model_flags(cmp);

  // plot-data
  std::string csv_path, x_col, title;
  std::vector<std::string> y_cols;
  auto* plot = app.add_subcommand("plot-data", "SVG line plot of CSV columns");
  plot->add_option("--csv", csv_path, "input CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--x", x_col, "x column (default: first column)");
  plot->add_option("--y", y_cols, "y columns (default: all others)");
  plot->add_option("--title", title, "plot title");

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    SimulationConfig cfg;
    if (!g.config_path.empty()) cfg = load_config(g.config_path);
    if (g.trunc) cfg.trunc = *g.trunc;
    if (g.periods) cfg.integrator.periods = *g.periods;
    if (g.steps_per_period) cfg.integrator.steps_per_period = *g.steps_per_period;
    validate(cfg);
    h.seed = g.seed;
    h.workers = g.workers;

    std::map<std::string, std::string> extra{{"seed", std::to_string(g.seed)}};

    if (*sim) {
      const fs::path dir = g.out.empty() ? "simulate_out" : g.out;
      fs::create_directories(dir);
      Configuration c{phi, lambda, coupled ? 2u : 1u, c12, l12};
      const SimulationResult r = simulate(cfg, c, coupled && cfg.trunc >= 2);
      {
        auto os = detail::open_out(dir / "trajectory.csv");
        write_trajectory_csv(os, r.trajectory);
      }
      for (std::size_t l = 0; l < r.loops.size(); ++l) {
        auto os = detail::open_out(dir / ("formfactor_" + std::to_string(l + 1) + ".csv"));
        write_loops_csv(os, r.loops[l]);
      }
      if (coupled) {
        auto os = detail::open_out(dir / "concurrence.csv");
        write_concurrence_csv(os, concurrence_series(r.trajectory, &err));
      }
      for (std::size_t l = 0; l < r.loops.size(); ++l)
        out << "memristor " << l + 1 << ": mean form factor " << format_double(r.loops[l].mean_form_factor) << '\n';
      detail::write_manifest(dir / "manifest.txt", argv, cfg, extra);
      return 0;
    }

    if (*dset) {
      const fs::path path = g.out.empty() ? "dataset.csv" : g.out;
      ParamSpace space = coupled ? coupled_space(g.seed) : single_space(g.seed);
      if (grid_levels) {
        for (auto& f : space.features) {
          f.mode = SampleMode::grid;
          f.levels = grid_levels;
        }
      }
      GenerateOptions go;
      go.workers = g.workers;
      go.progress = &err;
      const GenerateResult r = generate(space, n_rows, cfg, go);
      for (const auto& f : r.failures) err << "row " << f.row << " failed: " << f.message << '\n';
      write_csv(path.string(), r.data);
      out << "wrote " << r.data.size() << " rows to " << path.string() << '\n';
      extra["n"] = std::to_string(n_rows);
      extra["failed_rows"] = std::to_string(r.failures.size());
      detail::write_manifest(fs::path(path.string() + ".manifest"), argv, cfg, extra);
      return r.data.empty() ? 1 : 0;
    }

    if (*st) {
      const auto s = stats(read_csv(data_path));
      write_stats_table(out, s);
      if (!g.out.empty()) {
        auto os = detail::open_out(g.out);
        write_stats_table(os, s);
        detail::write_manifest(fs::path(g.out + ".manifest"), argv, cfg, extra);
      }
      return 0;
    }

    if (*tr) {
      const fs::path path = g.out.empty() ? "model.qml" : g.out;
      const Dataset ds = read_csv(data_path);
      const ml::TrainTest tt = ml::split_problem(ml::to_problem(ds), {2.0 / 3.0, g.seed});
      auto m = ml::make_regressor(model_kind, h);
      const ml::EvalMetrics e = ml::fit_and_score(*m, tt);
      {
        auto os = detail::open_out(path);
        ml::save_model(os, *m, tt.train.feature_names);
      }
      out << model_kind << ": test R2 " << format_double(e.r2) << ", adjusted R2 " << format_double(e.adjusted_r2)
          << ", RMSE " << format_double(e.rmse) << '\n';
      detail::write_manifest(fs::path(path.string() + ".manifest"), argv, cfg, extra);
      return 0;
    }

    if (*bm) {
      const fs::path path = g.out.empty() ? "leaderboard.csv" : g.out;
      if (kinds.empty()) kinds = ml::regressor_kinds();
      const auto rows = ml::benchmark(read_csv(data_path), {2.0 / 3.0, g.seed}, kinds, h);
      ml::write_leaderboard_table(out, rows);
      {
        auto os = detail::open_out(path);
        ml::write_leaderboard_csv(os, rows);
      }
      detail::write_manifest(fs::path(path.string() + ".manifest"), argv, cfg, extra);
      return 0;
    }

    if (*opt) {
      const fs::path dir = g.out.empty() ? "optimize_out" : g.out;
      const Dataset ds = read_csv(data_path);
      std::unique_ptr<ml::Regressor> model;
      if (!model_file.empty()) {
        std::ifstream is(model_file);
        ml::SavedModel saved = ml::load_model(is);
        if (!saved.feature_names.empty() && saved.feature_names != ds.feature_names())
          throw ConfigError("optimize: model features do not match the dataset");
        model = std::move(saved.model);
      } else {
        model = detail::fit_surrogate(ds, model_kind, h);
      }
      SearchSpec spec;
      spec.dims = search_dims_from(ds);
      spec.random_starts = starts;
      spec.iterations = iterations;
      spec.objective = minimize ? Objective::minimize : Objective::maximize;
      spec.seed = g.seed;
      spec.workers = g.workers;
      if (ds.n_memristors() == 2 && !allow_uncoupled) spec.admissible = coupled_only(spec.dims);
      SearchResult r = optimize(*model, spec);
      if (!no_verify) verify(r, cfg, ds.n_memristors());
      fs::create_directories(dir);
      {
        auto os = detail::open_out(dir / "trace.csv");
        write_trace_csv(os, r);
      }
      {
        std::ostringstream res;
        for (std::size_t j = 0; j < r.names.size(); ++j) res << r.names[j] << " = " << format_double(r.best[j]) << '\n';
        res << "surrogate_form_factor = " << format_double(r.surrogate_value) << '\n';
        if (r.simulated_value) res << "simulated_form_factor = " << format_double(*r.simulated_value) << '\n';
        auto os = detail::open_out(dir / "result.txt");
        os << res.str();
        out << res.str();
      }
      detail::write_manifest(dir / "manifest.txt", argv, cfg, extra);
      return 0;
    }

    if (*cmp) {
      const fs::path dir = g.out.empty() ? "compare_out" : g.out;
      Configuration c_opt, c_sub;
      const std::vector<std::string> names{"c12", "l12", "phi", "lambda"};
      if (!opt_point.empty() && !sub_point.empty()) {
        c_opt = configuration_from(names, detail::parse_point(opt_point, 4, "--optimal"), 2);
        c_sub = configuration_from(names, detail::parse_point(sub_point, 4, "--suboptimal"), 2);
      } else {
        if (data_path.empty()) throw ConfigError("compare: --data or both --optimal and --suboptimal required");
        const Dataset ds = read_csv(data_path);
        if (ds.n_memristors() != 2) throw ConfigError("compare: a coupled dataset is required");
        auto model = detail::fit_surrogate(ds, model_kind, h);
        SearchSpec spec;
        spec.dims = search_dims_from(ds);
        spec.random_starts = starts;
        spec.seed = g.seed;
        spec.workers = g.workers;
        if (!allow_uncoupled) spec.admissible = coupled_only(spec.dims);
        const SearchResult best = optimize(*model, spec);
        spec.objective = Objective::minimize;
        const SearchResult worst = optimize(*model, spec);
        c_opt = configuration_of(best, 2);
        c_sub = configuration_of(worst, 2);
      }
      const ComparisonReport rep = compare(cfg, c_opt, c_sub, compare_periods);
      const ComparisonSummary s = write_report(dir, rep);
      write_summary(out, rep, s);
      detail::write_manifest(dir / "manifest.txt", argv, cfg, extra);
      return 0;
    }

    if (*plot) {
      const Dataset table = read_csv(csv_path);
      if (table.columns.empty()) throw ConfigError("plot-data: empty CSV");
      const std::string x = x_col.empty() ? table.columns.front() : x_col;
      const fs::path path = g.out.empty() ? fs::path(csv_path).replace_extension(".svg") : fs::path(g.out);
      PlotOptions po;
      po.title = title.empty() ? fs::path(csv_path).filename().string() : title;
      po.x_label = x;
      auto os = detail::open_out(path);
      write_svg_plot(os, series_from(table, x, y_cols), po);
      out << "wrote " << path.string() << '\n';
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

inline int dispatch(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return dispatch(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace qmem::cli
