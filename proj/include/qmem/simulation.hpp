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

// Shared simulation settings and the per-configuration pipeline
// (circuit -> master equation -> trajectory -> form factor) used by the
// dataset generator, the search and the CLI.
//
// Settings can be read from a key/value text file:
//
//   # comment
//   c_sigma = 1e-12          # F, both memristors
//   l_self = 10e-9           # H, both memristors
//   phi_offset = 1.5707963   # rad
//   amp = 1.5707963          # rad
//   theta = 1.5707963        # initial polar angle
//   trunc = 2
//   periods = 10
//   steps_per_period = 2000

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qmem/dynamics.hpp"
#include "qmem/error.hpp"
#include "qmem/loops.hpp"
#include "qmem/model.hpp"

namespace qmem {

struct SimulationConfig {
  double c_sigma = 1e-12;
  double l_self = 10e-9;
  DriveParams drive{std::numbers::pi / 2.0, std::numbers::pi / 2.0};
  double theta = std::numbers::pi / 2.0;
  std::size_t trunc = 2;
  IntegratorConfig integrator{};
  PhysicalConstants constants{};
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) throw ConfigError(what + ": not a number: '" + text + "'");
  return v;
}

inline std::size_t parse_count(const std::string& text, const std::string& what) {
  std::size_t v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw ConfigError(what + ": not a non-negative integer: '" + text + "'");
  return v;
}

}  // namespace detail

/// Applies one key/value setting; throws ConfigError on unknown keys or bad values.
inline void apply_setting(SimulationConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_count;
  using detail::parse_double;
  if (key == "c_sigma") cfg.c_sigma = parse_double(value, key);
  else if (key == "l_self") cfg.l_self = parse_double(value, key);
  else if (key == "phi_offset") cfg.drive.phi_offset = parse_double(value, key);
  else if (key == "amp") cfg.drive.amp = parse_double(value, key);
  else if (key == "theta") cfg.theta = parse_double(value, key);
  else if (key == "trunc") cfg.trunc = parse_count(value, key);
  else if (key == "periods") cfg.integrator.periods = parse_count(value, key);
  else if (key == "steps_per_period") cfg.integrator.steps_per_period = parse_count(value, key);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

inline void validate(const SimulationConfig& cfg) {
  if (!(cfg.c_sigma > 0.0) || !(cfg.l_self > 0.0)) throw ConfigError("config: c_sigma and l_self must be > 0");
  if (!(cfg.drive.amp >= 0.0)) throw ConfigError("config: amp must be >= 0");
  if (cfg.trunc < 2 || cfg.trunc > 4) throw ConfigError("config: trunc must be in [2, 4]");
  if (!(cfg.theta >= 0.0 && cfg.theta <= std::numbers::pi)) throw ConfigError("config: theta must be in [0, pi]");
  cfg.integrator.validate();
}

inline SimulationConfig parse_config(std::istream& in, SimulationConfig cfg = {}) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    try {
      apply_setting(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  validate(cfg);
  return cfg;
}

inline SimulationConfig load_config(const std::string& path, SimulationConfig cfg = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, cfg);
}

/// Resolved settings in the same key/value format parse_config reads.
inline std::map<std::string, std::string> to_settings(const SimulationConfig& cfg) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  return {{"c_sigma", num(cfg.c_sigma)},
          {"l_self", num(cfg.l_self)},
          {"phi_offset", num(cfg.drive.phi_offset)},
          {"amp", num(cfg.drive.amp)},
          {"theta", num(cfg.theta)},
          {"trunc", std::to_string(cfg.trunc)},
          {"periods", std::to_string(cfg.integrator.periods)},
          {"steps_per_period", std::to_string(cfg.integrator.steps_per_period)}};
}

/// A point of the sweep: lambda and phase always, couplings for two memristors.
struct Configuration {
  double phi = 0.0;
  double lambda = 0.0;
  std::size_t n_memristors = 1;
  double c12 = 0.0;  // F
  double l12 = 0.0;  // H; 0 = no inductive coupling
};

inline CircuitParams circuit_for(const SimulationConfig& cfg, const Configuration& c) {
  CircuitParams p;
  p.memristors.assign(c.n_memristors, MemristorCircuit{cfg.c_sigma, cfg.l_self, c.lambda});
  if (c.n_memristors == 2) {
    p.c_c = c.c12;
    if (c.l12 > 0.0) p.l_c = c.l12;
  }
  return p;
}

inline MemristorSystem system_for(const SimulationConfig& cfg, const Configuration& c) {
  return MemristorSystem::build(circuit_for(cfg, c), std::vector<DriveParams>(c.n_memristors, cfg.drive), cfg.trunc,
                                cfg.constants);
}

inline DensityMatrix initial_density(const SimulationConfig& cfg, const Configuration& c) {
  return DensityMatrix{
      initial_state(std::vector<InitialStateParams>(c.n_memristors, InitialStateParams{cfg.theta, c.phi}), cfg.trunc)};
}

struct SimulationResult {
  Trajectory trajectory;
  std::vector<PeriodSeries> loops;  // one per memristor
};

inline SimulationResult simulate(const SimulationConfig& cfg, const Configuration& c, bool record_rho = false) {
  validate(cfg);
  IntegratorConfig icfg = cfg.integrator;
  icfg.record_rho = record_rho;
  SimulationResult r;
  r.trajectory = evolve(initial_density(cfg, c), system_for(cfg, c), icfg);
  for (std::size_t l = 0; l < c.n_memristors; ++l) r.loops.push_back(per_period_series(r.trajectory, l));
  return r;
}

}  // namespace qmem
