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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qmem/cli.hpp"
#include "qmem/dynamics.hpp"
#include "qmem/entanglement.hpp"
#include "qmem/loops.hpp"
#include "qmem/ml/benchmark.hpp"
#include "qmem/search.hpp"

namespace {

using namespace qmem;
constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void criterion(int id, double budget_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && secs > budget_s) {
    v.pass = false;
    v.detail += "; over the time budget";
  }
  if (!v.pass) ++g_failures;
  std::printf("Criterion %d: %s  %s  [%.1f s]\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Shared data for the surrogate criteria.
Dataset g_single, g_coupled;

Verdict physics_invariants() {
  Rng rng(101);
  SimulationConfig cfg;
  cfg.integrator.positivity_stride = 10;
  double trace = 0, herm = 0, min_eig = 0, purity = 0;
  for (int k = 0; k < 20; ++k) {
    Configuration c;
    c.n_memristors = k % 2 == 0 ? 2 : 1;
    c.phi = rng.uniform(0.0, 2.0 * kPi);
    c.lambda = k % 5 == 0 ? 0.0 : 100.0 - rng.uniform(0.0, 100.0);
    if (c.n_memristors == 2) {
      c.c12 = rng.uniform(0.0, 2e-12);
      c.l12 = rng.uniform(0.0, 2e-8);
    }
    const Trajectory tr = evolve(initial_density(cfg, c), system_for(cfg, c), cfg.integrator);
    trace = std::max(trace, tr.defects.max_trace_drift);
    herm = std::max(herm, tr.defects.max_hermiticity);
    min_eig = std::min(min_eig, tr.defects.min_eigenvalue);
    if (c.lambda == 0.0)
      for (double p : tr.purity) purity = std::max(purity, std::abs(p - tr.purity.front()));
  }
  return {trace <= 1e-8 && herm <= 1e-8 && min_eig >= -1e-8 && purity <= 1e-8,
          fmt("20 draws: max|tr-1|=%.2e herm=%.2e min_eig=%.2e purity_drift(lambda=0)=%.2e", trace, herm, min_eig,
              purity)};
}

Verdict mean_field_oracle() {
  Rng rng(202);
  SimulationConfig cfg;
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    Configuration c;
    c.n_memristors = k % 2 == 0 ? 2 : 1;
    c.lambda = rng.uniform(0.0, 100.0);
    if (c.n_memristors == 2) {
      c.c12 = rng.uniform(0.0, 2e-12);
      c.l12 = rng.uniform(0.0, 2e-8);
    }
    std::vector<InitialStateParams> init;
    for (std::size_t l = 0; l < c.n_memristors; ++l) init.push_back({rng.uniform(0.0, kPi), rng.uniform(0.0, 2 * kPi)});
    const MemristorSystem sys = system_for(cfg, c);
    const Trajectory a = evolve(DensityMatrix{initial_state(init, 2)}, sys, cfg.integrator);
    const Trajectory b = evolve_mean(init, sys, cfg.integrator);
    for (std::size_t l = 0; l < c.n_memristors; ++l)
      for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a.modes[l].n_exp[i] - b.modes[l].n_exp[i]));
  }
  return {worst <= 1e-6, fmt("10 configs: max |<n>_rho - <n>_mean| = %.2e", worst)};
}

Verdict analytic_decay() {
  MasterEquation eq;
  eq.hamiltonian = ComplexMatrix(2, 2);
  eq.channels.push_back(DissipationChannel::from(local_annihilation(2), [](double) { return 0.5 * 0.2; }));
  const std::size_t steps = 10000;
  double n10 = -1.0;
  propagate(eq, ComplexMatrix{{0, 0}, {0, 1}}, 0.0, 10.0 / steps, steps,
            [&](std::size_t s, double, const ComplexMatrix& rho) {
              if (s == steps) n10 = rho(1, 1).real();
            });
  const double err = std::abs(n10 - std::exp(-1.0));
  return {err <= 1e-6, fmt("<n>(10) = %.12f, |err| = %.2e", n10, err)};
}

PlaneCurve circle(std::size_t n) {
  PlaneCurve c;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    c.push_back({std::cos(a), std::sin(a)});
  }
  return c;
}

PlaneCurve figure_eight(std::size_t n) {
  PlaneCurve c;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    c.push_back({1.0 - std::cos(a), std::sin(a)});
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    c.push_back({-1.0 + std::cos(a), std::sin(a)});
  }
  return c;
}

Verdict geometry_oracle() {
  const double fc = form_factor(circle(1000)).form_factor;
  const double fs = form_factor(PlaneCurve{{0, 0}, {1, 0}, {1, 1}, {0, 1}}).form_factor;
  const double f8 = form_factor(figure_eight(500)).form_factor;
  double scale = 0.0;
  Rng rng(404);
  for (const PlaneCurve& base : {circle(1000), figure_eight(500)}) {
    const double f = form_factor(base).form_factor;
    for (int k = 0; k < 10; ++k) {
      PlaneCurve s = base;
      const double a = std::exp(rng.uniform(-10.0, 10.0));
      for (auto& p : s) p = {p.x * a, p.y * a};
      scale = std::max(scale, std::abs(form_factor(s).form_factor - f));
    }
  }
  const bool ok =
      std::abs(fc - 1.0) <= 1e-3 && std::abs(fs - kPi / 4) <= 1e-6 && std::abs(f8 - 0.5) <= 1e-3 && scale <= 1e-12;
  return {ok, fmt("circle %.6f, square %.9f, figure-eight %.6f, scale drift %.1e", fc, fs, f8, scale)};
}

ComplexMatrix pure(const std::vector<cplx>& psi) {
  ComplexMatrix m(psi.size(), psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    for (std::size_t j = 0; j < psi.size(); ++j) m(i, j) = psi[i] * std::conj(psi[j]);
  return m;
}

Verdict concurrence_oracle() {
  const double r = 1.0 / std::sqrt(2.0);
  const ComplexMatrix bell = pure({r, 0, 0, r});
  const double cb = concurrence(bell);
  const double cp = concurrence(pure({1, 0, 0, 0}));
  const double cw = concurrence(bell * cplx(0.5) + ComplexMatrix::identity(4) * cplx(0.125));
  Rng rng(505);
  double pure_err = 0.0;
  for (int k = 0; k < 100; ++k) {
    std::vector<cplx> v(4);
    double norm = 0.0;
    for (auto& z : v) {
      z = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
      norm += std::norm(z);
    }
    for (auto& z : v) z /= std::sqrt(norm);
    pure_err = std::max(pure_err, std::abs(concurrence(pure(v)) - 2.0 * std::abs(v[0] * v[3] - v[1] * v[2])));
  }
  const bool ok = std::abs(cb - 1) <= 1e-10 && std::abs(cp) <= 1e-10 && std::abs(cw - 0.25) <= 1e-10 && pure_err <= 1e-8;
  return {ok, fmt("Bell %.12f, product %.1e, Werner(0.5) %.12f, pure-state max err %.1e", cb, cp, cw, pure_err)};
}

std::string leaderboard_detail(const std::vector<ml::LeaderboardRow>& rows, double floor, bool& ok) {
  std::string d;
  ok = true;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      ok = false;
      d += r.kind + " error(" + r.error + ") ";
      continue;
    }
    ok = ok && r.metrics.r2 >= floor;
    d += fmt("%s R2=%.4f ", r.kind.c_str(), r.metrics.r2);
  }
  return d;
}

const std::vector<std::string> kEnsembles{"random-forest", "extra-trees", "hist-gbdt"};

Verdict single_leaderboard() {
  g_single = generate(single_space(1), 400, SimulationConfig{}).data;
  if (g_single.size() != 400) return {false, "dataset generation lost rows"};
  bool ok = false;
  const std::string d = leaderboard_detail(ml::benchmark(g_single, {2.0 / 3.0, 1}, kEnsembles), 0.95, ok);
  return {ok, "400 single rows: " + d + "(floor 0.95)"};
}

Verdict coupled_leaderboard() {
  g_coupled = generate(coupled_space(7), 1500, SimulationConfig{}).data;
  if (g_coupled.size() != 1500) return {false, "dataset generation lost rows"};
  bool ok = false;
  const std::string d = leaderboard_detail(ml::benchmark(g_coupled, {2.0 / 3.0, 7}, kEnsembles), 0.90, ok);
  return {ok, "1500 coupled rows: " + d + "(floor 0.90)"};
}

std::unique_ptr<ml::Regressor> fit_all(const Dataset& ds) {
  const ml::Problem p = ml::to_problem(ds);
  auto m = ml::make_regressor("hist-gbdt");
  m->fit(p.x, p.y);
  return m;
}

double column_max(const Dataset& ds, const std::string& name) {
  const auto col = ds.column(ds.column_index(name));
  return *std::max_element(col.begin(), col.end());
}

Verdict optimum_structure() {
  if (g_single.empty()) return {false, "no single dataset"};
  const auto model = fit_all(g_single);
  SearchSpec spec;
  spec.dims = search_dims_from(g_single);
  spec.seed = 8;
  SearchResult best = optimize(*model, spec);
  verify(best, SimulationConfig{}, 1);
  spec.objective = Objective::minimize;
  SearchResult low = optimize(*model, spec);
  verify(low, SimulationConfig{}, 1);
  const Configuration c = configuration_of(best, 1);
  const double fmax = column_max(g_single, "form_factor");
  const bool ok = c.lambda <= 10.0 && *best.simulated_value >= fmax - 0.02;
  return {ok, fmt("phi*=%.4f lambda*=%.4f surrogate F=%.4f simulated F=%.4f dataset max %.4f; minimize gives %.4f "
                  "(reference optimum phi=1.5309 lambda=2.1387)",
                  c.phi, c.lambda, best.surrogate_value, *best.simulated_value, fmax, *low.simulated_value)};
}

Verdict coupled_comparison() {
  if (g_coupled.empty()) return {false, "no coupled dataset"};
  const auto model = fit_all(g_coupled);
  SearchSpec spec;
  spec.dims = search_dims_from(g_coupled);
  spec.seed = 9;
  spec.admissible = coupled_only(spec.dims);
  const SearchResult best = optimize(*model, spec);
  spec.objective = Objective::minimize;
  const SearchResult worst = optimize(*model, spec);
  const Configuration co = configuration_of(best, 2), cs = configuration_of(worst, 2);
  const ComparisonSummary s = summarize(compare(SimulationConfig{}, co, cs, 20), 5);
  const bool ok = s.opt_above_every_period() && s.peak_c_opt > s.peak_c_sub && s.retention_sub() < s.retention_opt();
  return {ok, fmt("opt (c12=%.3g l12=%.3g phi=%.3f lambda=%.3f) vs sub (c12=%.3g l12=%.3g phi=%.3f lambda=%.3f): "
                  "F above in %zu/%zu periods, mean F %.4f vs %.4f, peak C %.4f vs %.4f, late/peak %.4f vs %.4f",
                  co.c12, co.l12, co.phi, co.lambda, cs.c12, cs.l12, cs.phi, cs.lambda, s.periods_opt_above, s.periods,
                  s.mean_f_opt, s.mean_f_sub, s.peak_c_opt, s.peak_c_sub, s.retention_opt(), s.retention_sub())};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict reproducibility() {
  const auto dir = std::filesystem::temp_directory_path() / "qmem_acceptance_repro";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::ostringstream sink;
  auto run = [&](const char* kind, const char* workers, const std::string& name) {
    return cli::dispatch({"qmemlab", "dataset", kind, "--n", "16", "--seed", "10", "--workers", workers, "--out",
                          (dir / name).string()},
                         sink, sink);
  };
  bool ok = true;
  std::string d;
  for (const char* kind : {"--single", "--coupled"}) {
    ok = ok && run(kind, "1", "a.csv") == 0 && run(kind, "2", "b.csv") == 0 && run(kind, "1", "c.csv") == 0;
    const std::string a = slurp(dir / "a.csv");
    const bool same = !a.empty() && a == slurp(dir / "b.csv") && a == slurp(dir / "c.csv");
    ok = ok && same;
    d += fmt("%s: %s ", kind + 2, same ? "identical" : "DIFFERENT");
  }
  std::filesystem::remove_all(dir);
  return {ok, d + "(workers 1, 2 and a repeat)"};
}

}  // namespace

int main() {
  criterion(1, 120, physics_invariants);
  criterion(2, 0, mean_field_oracle);
  criterion(3, 0, analytic_decay);
  criterion(4, 0, geometry_oracle);
  criterion(5, 0, concurrence_oracle);
  criterion(6, 600, single_leaderboard);
  criterion(7, 1800, coupled_leaderboard);
  criterion(8, 0, optimum_structure);
  criterion(9, 0, coupled_comparison);
  criterion(10, 0, reproducibility);
  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
