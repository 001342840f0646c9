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

// Circuit model of one or two superconducting quantum memristors: circuit
// energies, Hamiltonian, flux-driven quasiparticle decay rate and initial
// product states.
//
// Units: energies in joules, frequencies in rad/s, time in seconds. The
// Hamiltonian matrix is returned divided by hbar (rad/s), which is also what
// the master equation consumes.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qmem/error.hpp"
#include "qmem/numerics.hpp"

namespace qmem {

struct PhysicalConstants {
  double e = 1.602176634e-19;     // C
  double hbar = 1.054571817e-34;  // J s

  /// Reduced flux quantum hbar / 2e (Wb).
  [[nodiscard]] double phi_rq() const { return hbar / (2.0 * e); }

  static PhysicalConstants si() { return {}; }
};

struct MemristorCircuit {
  double c_sigma = 1e-12;  // F
  double l_self = 10e-9;   // H
  double lambda = 1.0;     // spectral-density amplitude, S_QP(w) = lambda * w
};

struct CircuitParams {
  std::vector<MemristorCircuit> memristors{MemristorCircuit{}};
  double c_c = 0.0;               // coupling capacitance (F)
  std::optional<double> l_c;      // coupling inductance (H); empty = no inductive coupling

  [[nodiscard]] std::size_t count() const { return memristors.size(); }

  void validate() const {
    if (memristors.empty() || memristors.size() > 2) throw ConfigError("CircuitParams: 1 or 2 memristors supported");
    for (const auto& m : memristors) {
      if (!(m.c_sigma > 0.0)) throw ConfigError("CircuitParams: c_sigma must be > 0");
      if (!(m.l_self > 0.0)) throw ConfigError("CircuitParams: l_self must be > 0");
      if (!(m.lambda >= 0.0)) throw ConfigError("CircuitParams: lambda must be >= 0");
    }
    if (!(c_c >= 0.0)) throw ConfigError("CircuitParams: c_c must be >= 0");
    if (l_c && !(*l_c > 0.0)) throw ConfigError("CircuitParams: l_c must be > 0 when present");
  }
};

/// Charging and inductive energies (J) that fully determine the quadratic circuit.
struct CircuitEnergies {
  std::vector<double> e_c;
  std::vector<double> e_l;
  double e_c12 = 0.0;
  double e_l12 = 0.0;
};

struct MemristorDerived {
  double e_c = 0.0;    // J
  double e_l = 0.0;    // J
  double omega = 0.0;  // rad/s
  double g = 0.0;      // zero-point width of the phase, dimensionless
};

struct DerivedParams {
  std::vector<MemristorDerived> modes;
  double e_c12 = 0.0;
  double e_l12 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double coupling = 0.0;  // sqrt(w1 w2) (alpha - beta), rad/s
  double hbar = PhysicalConstants{}.hbar;

  [[nodiscard]] std::size_t count() const { return modes.size(); }
};

struct DriveParams {
  double phi_offset = std::numbers::pi / 2.0;  // rad
  double amp = std::numbers::pi / 2.0;         // rad
};

struct InitialStateParams {
  double theta = std::numbers::pi / 2.0;  // polar angle in [0, pi]
  double eta = 0.0;                       // relative phase in [0, 2 pi)
};

/// omega = sqrt(2 E_C E_L) / hbar and g = (E_C / 32 E_L)^(1/4).
inline DerivedParams derive_from_energies(const CircuitEnergies& en, double hbar) {
  if (en.e_c.size() != en.e_l.size() || en.e_c.empty() || en.e_c.size() > 2)
    throw ConfigError("derive_from_energies: need 1 or 2 matching energy pairs");
  DerivedParams d;
  d.hbar = hbar;
  for (std::size_t l = 0; l < en.e_c.size(); ++l) {
    const double ec = en.e_c[l];
    const double el = en.e_l[l];
    if (!(ec > 0.0) || !(el > 0.0)) throw ConfigError("derive_from_energies: energies must be positive");
    d.modes.push_back({ec, el, std::sqrt(2.0 * ec * el) / hbar, std::pow(ec / (32.0 * el), 0.25)});
  }
  if (d.modes.size() == 2) {
    d.e_c12 = en.e_c12;
    d.e_l12 = en.e_l12;
    d.alpha = en.e_l12 / std::sqrt(en.e_l[0] * en.e_l[1]);
    d.beta = en.e_c12 / std::sqrt(en.e_c[0] * en.e_c[1]);
    d.coupling = std::sqrt(d.modes[0].omega * d.modes[1].omega) * (d.alpha - d.beta);
  }
  return d;
}

/// Builds the capacitance and inverse-inductance matrices, inverts the former
/// and converts both to energies: E_C,jk = 2 e^2 (C^-1)_jk, E_L,jk = phi_rq^2 (L^-1)_jk.
inline CircuitEnergies circuit_energies(const CircuitParams& p, const PhysicalConstants& k = {}) {
  p.validate();
  const double e2 = k.e * k.e;
  const double f2 = k.phi_rq() * k.phi_rq();
  CircuitEnergies en;
  if (p.count() == 1) {
    en.e_c = {2.0 * e2 / p.memristors[0].c_sigma};
    en.e_l = {f2 / p.memristors[0].l_self};
    return en;
  }
  const double c11 = p.memristors[0].c_sigma + p.c_c;
  const double c22 = p.memristors[1].c_sigma + p.c_c;
  const double c12 = -p.c_c;
  const double det = c11 * c22 - c12 * c12;
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) throw ConfigError("circuit_energies: singular capacitance matrix");
  const double ci11 = c22 / det;
  const double ci22 = c11 / det;
  const double ci12 = -c12 / det;

  const double inv_lc = p.l_c ? 1.0 / *p.l_c : 0.0;
  const double li11 = 1.0 / p.memristors[0].l_self + inv_lc;
  const double li22 = 1.0 / p.memristors[1].l_self + inv_lc;
  const double li12 = -inv_lc;

  en.e_c = {2.0 * e2 * ci11, 2.0 * e2 * ci22};
  en.e_l = {f2 * li11, f2 * li22};
  en.e_c12 = 2.0 * e2 * ci12;
  en.e_l12 = f2 * li12;
  return en;
}

inline DerivedParams derive(const CircuitParams& p, const PhysicalConstants& k = {}) {
  return derive_from_energies(circuit_energies(p, k), k.hbar);
}

/// Ladder operators for a single truncated mode: a|k> = sqrt(k)|k-1>.
inline ComplexMatrix local_annihilation(std::size_t trunc) {
  ComplexMatrix a(trunc, trunc);
  for (std::size_t k = 1; k < trunc; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

/// Embeds a single-mode operator at position `site` of an n-mode product space
/// (site 0 is the most significant tensor factor).
inline ComplexMatrix embed(const ComplexMatrix& op, std::size_t site, std::size_t n_modes) {
  ComplexMatrix out = ComplexMatrix::identity(1);
  for (std::size_t s = 0; s < n_modes; ++s) out = kron(out, s == site ? op : ComplexMatrix::identity(op.rows()));
  return out;
}

struct ModeOperators {
  ComplexMatrix a;
  ComplexMatrix adag;
  ComplexMatrix number;  // a^dagger a
  ComplexMatrix charge;  // (i / 4g)(a^dagger - a)
  ComplexMatrix phase;   // 2g (a^dagger + a)
};

struct OperatorSet {
  std::size_t trunc = 2;
  std::size_t dim = 2;
  std::vector<ModeOperators> modes;
};

inline OperatorSet build_operators(const DerivedParams& d, std::size_t trunc) {
  if (trunc < 2) throw ConfigError("build_operators: truncation must be >= 2");
  OperatorSet ops;
  ops.trunc = trunc;
  ops.dim = static_cast<std::size_t>(std::pow(trunc, d.count()));
  const ComplexMatrix a_local = local_annihilation(trunc);
  for (std::size_t l = 0; l < d.count(); ++l) {
    ModeOperators m;
    m.a = embed(a_local, l, d.count());
    m.adag = m.a.adjoint();
    m.number = m.adag * m.a;
    const double g = d.modes[l].g;
    m.charge = (m.adag - m.a) * cplx(0.0, 1.0 / (4.0 * g));
    m.phase = (m.adag + m.a) * cplx(2.0 * g, 0.0);
    ops.modes.push_back(std::move(m));
  }
  return ops;
}

/// H / hbar = sum_l w_l a_l^dag a_l - coupling (a_1^dag a_2 + a_2^dag a_1), in rad/s.
inline ComplexMatrix hamiltonian(const DerivedParams& d, std::size_t trunc) {
  const OperatorSet ops = build_operators(d, trunc);
  ComplexMatrix h(ops.dim, ops.dim);
  for (std::size_t l = 0; l < d.count(); ++l) h += ops.modes[l].number * cplx(d.modes[l].omega, 0.0);
  if (d.count() == 2 && d.coupling != 0.0) {
    const ComplexMatrix hop = ops.modes[0].adag * ops.modes[1].a + ops.modes[1].adag * ops.modes[0].a;
    h -= hop * cplx(d.coupling, 0.0);
  }
  return h;
}

/// Drive flux phi_d(t) = phi_offset + amp sin(w t).
inline double drive_flux(double t, double omega, const DriveParams& drive) {
  return drive.phi_offset + drive.amp * std::sin(omega * t);
}

/// Gamma(t) = lambda g^2 w exp(-g^2) (1 + cos phi_d(t)) / 2, in 1/s.
inline double decay_rate(double t, const MemristorDerived& mode, const DriveParams& drive, double lambda) {
  const double g2 = mode.g * mode.g;
  return lambda * g2 * mode.omega * std::exp(-g2) * 0.5 * (1.0 + std::cos(drive_flux(t, mode.omega, drive)));
}

/// Upper bound of decay_rate over time.
inline double decay_rate_bound(const MemristorDerived& mode, double lambda) {
  const double g2 = mode.g * mode.g;
  return lambda * g2 * mode.omega * std::exp(-g2);
}

/// |psi> = cos(theta/2)|0> + e^{i eta} sin(theta/2)|1> in a trunc-level mode.
inline std::vector<cplx> local_state(const InitialStateParams& p, std::size_t trunc) {
  if (trunc < 2) throw ConfigError("local_state: truncation must be >= 2");
  if (!(p.theta >= 0.0 && p.theta <= std::numbers::pi)) throw ConfigError("initial state: theta outside [0, pi]");
  std::vector<cplx> psi(trunc);
  psi[0] = std::cos(p.theta / 2.0);
  psi[1] = std::polar(std::sin(p.theta / 2.0), p.eta);
  return psi;
}

/// Product state rho(0) = (x)_l |psi_l><psi_l| on the trunc^n space.
inline ComplexMatrix initial_state(const std::vector<InitialStateParams>& params, std::size_t trunc) {
  if (params.empty()) throw ConfigError("initial_state: no modes");
  std::vector<cplx> psi{1.0};
  for (const auto& p : params) {
    const auto local = local_state(p, trunc);
    std::vector<cplx> next(psi.size() * trunc);
    for (std::size_t i = 0; i < psi.size(); ++i)
      for (std::size_t j = 0; j < trunc; ++j) next[i * trunc + j] = psi[i] * local[j];
    psi = std::move(next);
  }
  ComplexMatrix rho(psi.size(), psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    for (std::size_t j = 0; j < psi.size(); ++j) rho(i, j) = psi[i] * std::conj(psi[j]);
  return rho;
}

}  // namespace qmem
