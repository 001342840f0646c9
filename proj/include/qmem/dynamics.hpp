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

// Time-dependent Lindblad integration for driven quantum memristors.
//
//   drho/dt = -i [H, rho] + sum_l (Gamma_l(t)/2) (a_l rho a_l^dag - 1/2 {a_l^dag a_l, rho})
//
// integrated with fixed-step classical RK4. A second, independent integrator
// (evolve_mean) advances expectation values in the Heisenberg picture and is
// used as an oracle for the density-matrix path.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "qmem/error.hpp"
#include "qmem/model.hpp"
#include "qmem/numerics.hpp"

namespace qmem {

/// Hermitian, unit-trace, positive semidefinite matrix.
struct DensityMatrix {
  ComplexMatrix matrix;

  struct Defects {
    double hermiticity = 0.0;   // max |rho - rho^dag|
    double trace_error = 0.0;   // |tr rho - 1|
    double min_eigenvalue = 0.0;
  };

  [[nodiscard]] std::size_t dim() const { return matrix.rows(); }

  [[nodiscard]] Defects defects() const {
    Defects d;
    d.hermiticity = matrix.hermiticity_error();
    d.trace_error = std::abs(matrix.trace() - 1.0);
    d.min_eigenvalue = eigh(matrix).values.back();
    return d;
  }

  [[nodiscard]] double purity() const {
    double p = 0.0;
    for (const auto& z : matrix.data()) p += std::norm(z);
    return p;
  }

  /// Throws ConfigError when the matrix is not a valid state within tol.
  static DensityMatrix checked(ComplexMatrix m, double tol = 1e-8) {
    if (!m.is_square()) throw DimensionError("DensityMatrix: matrix is not square");
    if (!m.all_finite()) throw ConfigError("DensityMatrix: non-finite entries");
    DensityMatrix rho{std::move(m)};
    const Defects d = rho.defects();
    if (d.hermiticity > tol || d.trace_error > tol || d.min_eigenvalue < -tol)
      throw ConfigError("DensityMatrix: not a valid density matrix");
    return rho;
  }
};

/// One dissipation channel: jump operator and its time-dependent prefactor
/// (the full coefficient in front of the dissipator, i.e. Gamma(t)/2 here).
struct DissipationChannel {
  struct Entry {
    std::size_t row, col;
    cplx value;
  };
  std::vector<Entry> jump;    // sparse a
  ComplexMatrix jump_number;  // a^dag a
  std::function<double(double)> coefficient;

  static DissipationChannel from(const ComplexMatrix& a, std::function<double(double)> coefficient) {
    DissipationChannel ch;
    for (std::size_t r = 0; r < a.rows(); ++r)
      for (std::size_t c = 0; c < a.cols(); ++c)
        if (a(r, c) != cplx{}) ch.jump.push_back({r, c, a(r, c)});
    ch.jump_number = a.adjoint() * a;
    ch.coefficient = std::move(coefficient);
    return ch;
  }
};

struct MasterEquation {
  ComplexMatrix hamiltonian;  // H / hbar, rad/s
  std::vector<DissipationChannel> channels;

  [[nodiscard]] std::size_t dim() const { return hamiltonian.rows(); }
};

namespace detail {

/// Scratch buffers so the RK4 inner loop never allocates.
struct LindbladWorkspace {
  std::vector<cplx> k_eff, x;
  std::vector<double> coeffs;
  explicit LindbladWorkspace(std::size_t n, std::size_t channels) : k_eff(n * n), x(n * n), coeffs(channels) {}
};

// out = L_t(rho). Uses K = H - (i/2) sum c N, so that -i[H,rho] - 1/2 sum c {N,rho}
// = -i (K rho - (K rho)^dag) for Hermitian rho.
inline void lindblad_rhs(const MasterEquation& eq, double t, const cplx* rho, cplx* out, LindbladWorkspace& ws) {
  const std::size_t n = eq.dim();
  const auto h = eq.hamiltonian.data();
  for (std::size_t i = 0; i < n * n; ++i) ws.k_eff[i] = h[i];
  for (std::size_t c = 0; c < eq.channels.size(); ++c) {
    const double coeff = eq.channels[c].coefficient(t);
    ws.coeffs[c] = coeff;
    if (coeff == 0.0) continue;
    const auto num = eq.channels[c].jump_number.data();
    for (std::size_t i = 0; i < n * n; ++i) ws.k_eff[i] += cplx(num[i].imag() * 0.5 * coeff, -num[i].real() * 0.5 * coeff);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double re = 0.0, im = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const cplx a = ws.k_eff[i * n + k];
        const cplx b = rho[k * n + j];
        re += a.real() * b.real() - a.imag() * b.imag();
        im += a.real() * b.imag() + a.imag() * b.real();
      }
      ws.x[i * n + j] = cplx(re, im);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const cplx d = ws.x[i * n + j] - std::conj(ws.x[j * n + i]);
      out[i * n + j] = cplx(d.imag(), -d.real());  // -i d
    }
  }
  for (std::size_t c = 0; c < eq.channels.size(); ++c) {
    const double coeff = ws.coeffs[c];
    if (coeff == 0.0) continue;
    const auto& jump = eq.channels[c].jump;
    for (const auto& p : jump)
      for (const auto& q : jump) out[p.row * n + q.row] += coeff * p.value * rho[p.col * n + q.col] * std::conj(q.value);
  }
}

}  // namespace detail

struct StepDefects {
  double max_trace_drift = 0.0;     // before renormalization, per step
  double max_hermiticity = 0.0;     // before re-Hermitization, per step
  double min_eigenvalue = 1.0;      // over positivity checkpoints
};

struct PropagateOptions {
  double divergence_tol = 1e-6;
  /// Eigenvalue check every this many steps (0 disables; the final state is always checked).
  std::size_t positivity_stride = 0;
};

/// Fixed-step RK4 with per-step Hermitization and trace renormalization.
/// observer(step, t, rho) is called for step = 0..steps.
template <class Observer>
StepDefects propagate(const MasterEquation& eq, ComplexMatrix rho, double t0, double dt, std::size_t steps,
                      Observer&& observer, PropagateOptions opts = {}) {
  const std::size_t n = eq.dim();
  if (rho.rows() != n || rho.cols() != n) throw DimensionError("propagate: state and generator dimensions differ");
  detail::LindbladWorkspace ws(n, eq.channels.size());
  std::vector<cplx> k1(n * n), k2(n * n), k3(n * n), k4(n * n), tmp(n * n);
  StepDefects defects;
  auto r = rho.data();

  auto check_positive = [&] {
    const double mn = eigh(rho).values.back();
    defects.min_eigenvalue = std::min(defects.min_eigenvalue, mn);
    if (mn < -opts.divergence_tol) throw DivergedError("propagate: density matrix lost positivity");
  };

  observer(std::size_t{0}, t0, static_cast<const ComplexMatrix&>(rho));
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t = t0 + static_cast<double>(s - 1) * dt;
    detail::lindblad_rhs(eq, t, r.data(), k1.data(), ws);
    for (std::size_t i = 0; i < n * n; ++i) tmp[i] = r[i] + 0.5 * dt * k1[i];
    detail::lindblad_rhs(eq, t + 0.5 * dt, tmp.data(), k2.data(), ws);
    for (std::size_t i = 0; i < n * n; ++i) tmp[i] = r[i] + 0.5 * dt * k2[i];
    detail::lindblad_rhs(eq, t + 0.5 * dt, tmp.data(), k3.data(), ws);
    for (std::size_t i = 0; i < n * n; ++i) tmp[i] = r[i] + dt * k3[i];
    detail::lindblad_rhs(eq, t + dt, tmp.data(), k4.data(), ws);
    for (std::size_t i = 0; i < n * n; ++i) r[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    const double herm = rho.hermiticity_error();
    const cplx tr = rho.trace();
    const double drift = std::abs(tr - 1.0);
    defects.max_hermiticity = std::max(defects.max_hermiticity, herm);
    defects.max_trace_drift = std::max(defects.max_trace_drift, drift);
    if (!rho.all_finite() || herm > opts.divergence_tol || drift > opts.divergence_tol)
      throw DivergedError("propagate: density matrix drifted beyond tolerance at step " + std::to_string(s));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const cplx avg = 0.5 * (rho(i, j) + std::conj(rho(j, i)));
        rho(i, j) = avg;
        rho(j, i) = std::conj(avg);
      }
    }
    const double inv = 1.0 / tr.real();
    for (auto& z : r) z *= inv;

    if ((opts.positivity_stride != 0 && s % opts.positivity_stride == 0) || s == steps) check_positive();
    observer(s, t0 + static_cast<double>(s) * dt, static_cast<const ComplexMatrix&>(rho));
  }
  return defects;
}

/// Physical description of a driven one- or two-memristor circuit.
struct MemristorSystem {
  DerivedParams derived;
  std::vector<DriveParams> drives;    // one per memristor
  std::vector<double> lambdas;        // one per memristor
  std::vector<double> c_sigmas;       // F, for the memristive variables
  std::size_t trunc = 2;
  double charge_e = PhysicalConstants{}.e;

  static MemristorSystem build(const CircuitParams& circuit, const std::vector<DriveParams>& drives,
                               std::size_t trunc, const PhysicalConstants& k = {}) {
    if (drives.size() != circuit.count()) throw ConfigError("MemristorSystem: one drive per memristor required");
    MemristorSystem s;
    s.derived = derive(circuit, k);
    s.drives = drives;
    for (const auto& m : circuit.memristors) {
      s.lambdas.push_back(m.lambda);
      s.c_sigmas.push_back(m.c_sigma);
    }
    s.trunc = trunc;
    s.charge_e = k.e;
    return s;
  }

  [[nodiscard]] std::size_t count() const { return derived.count(); }

  /// Sampling period: one drive period of memristor 1, 2 pi / w_1.
  [[nodiscard]] double period() const { return 2.0 * std::numbers::pi / derived.modes.at(0).omega; }

  [[nodiscard]] double gamma(std::size_t l, double t) const {
    return decay_rate(t, derived.modes[l], drives[l], lambdas[l]);
  }

  [[nodiscard]] MasterEquation master_equation() const {
    const OperatorSet ops = build_operators(derived, trunc);
    MasterEquation eq;
    eq.hamiltonian = hamiltonian(derived, trunc);
    for (std::size_t l = 0; l < count(); ++l) {
      eq.channels.push_back(DissipationChannel::from(
          ops.modes[l].a, [mode = derived.modes[l], drive = drives[l], lambda = lambdas[l]](double t) {
            return 0.5 * decay_rate(t, mode, drive, lambda);
          }));
    }
    return eq;
  }
};

struct IntegratorConfig {
  std::size_t steps_per_period = 2000;
  std::size_t periods = 10;
  bool record_rho = false;
  /// Positivity checkpoint stride in steps (0 = once per period).
  std::size_t positivity_stride = 0;
  double divergence_tol = 1e-6;

  void validate() const {
    if (steps_per_period < 100) throw ConfigError("IntegratorConfig: steps_per_period must be >= 100");
    if (periods < 1) throw ConfigError("IntegratorConfig: periods must be >= 1");
  }
  [[nodiscard]] std::size_t total_steps() const { return steps_per_period * periods; }
};

/// Memristive observables of one memristor, sampled on the trajectory time grid.
struct ModeSeries {
  std::vector<double> n_exp;        // <n_l>, dimensionless charge
  std::vector<double> v_cap;        // V
  std::vector<double> i_qp;         // A
  std::vector<double> gamma;        // 1/s
  std::vector<double> memductance;  // S
};

struct Trajectory {
  std::vector<double> times;  // s
  std::vector<ModeSeries> modes;
  std::vector<double> purity;
  std::vector<ComplexMatrix> rho_samples;  // only when recorded
  double period = 0.0;
  std::size_t steps_per_period = 0;
  StepDefects defects;

  [[nodiscard]] std::size_t size() const { return times.size(); }
};

namespace detail {
inline void push_memristive(ModeSeries& m, const MemristorSystem& sys, std::size_t l, double t, double n_exp) {
  const double gamma = sys.gamma(l, t);
  const double v = -2.0 * sys.charge_e * n_exp / sys.c_sigmas[l];
  const double g = sys.c_sigmas[l] * gamma / 2.0;
  m.n_exp.push_back(n_exp);
  m.v_cap.push_back(v);
  m.gamma.push_back(gamma);
  m.memductance.push_back(g);
  m.i_qp.push_back(g * v);
}

inline void reserve(Trajectory& tr, std::size_t samples, std::size_t modes) {
  tr.times.reserve(samples);
  tr.modes.resize(modes);
  for (auto& m : tr.modes) {
    m.n_exp.reserve(samples);
    m.v_cap.reserve(samples);
    m.i_qp.reserve(samples);
    m.gamma.reserve(samples);
    m.memductance.reserve(samples);
  }
}

inline double expect_real(const ComplexMatrix& rho, const ComplexMatrix& op) {
  const std::size_t n = rho.rows();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s += (rho(i, j) * op(j, i)).real();
  return s;
}
}  // namespace detail

/// Integrates the master equation for cfg.periods drive periods of
/// cfg.steps_per_period steps and records the memristive variables at every step.
inline Trajectory evolve(const DensityMatrix& rho0, const MemristorSystem& sys, const IntegratorConfig& cfg) {
  cfg.validate();
  const MasterEquation eq = sys.master_equation();
  if (rho0.dim() != eq.dim()) throw DimensionError("evolve: initial state dimension does not match the model");
  const OperatorSet ops = build_operators(sys.derived, sys.trunc);

  Trajectory tr;
  tr.period = sys.period();
  tr.steps_per_period = cfg.steps_per_period;
  const std::size_t steps = cfg.total_steps();
  detail::reserve(tr, steps + 1, sys.count());
  tr.purity.reserve(steps + 1);
  if (cfg.record_rho) tr.rho_samples.reserve(steps + 1);

  const double dt = tr.period / static_cast<double>(cfg.steps_per_period);
  PropagateOptions opts;
  opts.divergence_tol = cfg.divergence_tol;
  opts.positivity_stride = cfg.positivity_stride == 0 ? cfg.steps_per_period : cfg.positivity_stride;
  tr.defects = propagate(
      eq, rho0.matrix, 0.0, dt, steps,
      [&](std::size_t step, double, const ComplexMatrix& rho) {
        // Exact grid times keep period boundaries aligned for loop extraction.
        const double t = static_cast<double>(step) * dt;
        tr.times.push_back(t);
        for (std::size_t l = 0; l < sys.count(); ++l)
          detail::push_memristive(tr.modes[l], sys, l, t, detail::expect_real(rho, ops.modes[l].charge));
        double p = 0.0;
        for (const auto& z : rho.data()) p += std::norm(z);
        tr.purity.push_back(p);
        if (cfg.record_rho) tr.rho_samples.push_back(rho);
      },
      opts);
  return tr;
}

namespace detail {

// Real linear ODE dx/dt = M(t) x integrated with the same RK4 grid as evolve.
template <class Generator, class Observer>
void rk4_linear(std::vector<double> x, double dt, std::size_t steps, Generator&& apply, Observer&& observe) {
  const std::size_t n = x.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  observe(std::size_t{0}, x);
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t = static_cast<double>(s - 1) * dt;
    apply(t, x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    apply(t + 0.5 * dt, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    apply(t + 0.5 * dt, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
    apply(t + dt, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    for (double v : x)
      if (!std::isfinite(v)) throw DivergedError("evolve_mean: non-finite expectation values");
    observe(s, x);
  }
}

inline std::vector<ComplexMatrix> pauli_strings(std::size_t n_qubits) {
  const std::array<ComplexMatrix, 4> single{pauli::i2(), pauli::x(), pauli::y(), pauli::z()};
  std::vector<ComplexMatrix> out{ComplexMatrix::identity(1)};
  for (std::size_t q = 0; q < n_qubits; ++q) {
    std::vector<ComplexMatrix> next;
    for (const auto& p : out)
      for (const auto& s : single) next.push_back(kron(p, s));
    out = std::move(next);
  }
  return out;
}

}  // namespace detail

/// Mean-value oracle for evolve (trunc = 2 only).
///
/// One memristor: the closed pair
///   d<n>/dt   = -(E_L/hbar) <phi> - (Gamma/4) <n>
///   d<phi>/dt = (2 E_C/hbar) <n>  - (Gamma/4) <phi>
/// Two memristors: the two-qubit charge means do not close on their own, so the
/// full Pauli-string expectation vector x_k = <P_k> is advanced with the
/// Heisenberg-picture generator dx_k/dt = sum_j tr(P_j L^dag(P_k))/4 x_j.
inline Trajectory evolve_mean(const std::vector<InitialStateParams>& init, const MemristorSystem& sys,
                              const IntegratorConfig& cfg) {
  cfg.validate();
  if (sys.trunc != 2) throw ConfigError("evolve_mean: the mean-value oracle requires trunc = 2");
  if (init.size() != sys.count()) throw ConfigError("evolve_mean: one initial state per memristor required");

  Trajectory tr;
  tr.period = sys.period();
  tr.steps_per_period = cfg.steps_per_period;
  const std::size_t steps = cfg.total_steps();
  const double dt = tr.period / static_cast<double>(cfg.steps_per_period);
  detail::reserve(tr, steps + 1, sys.count());
  const double hbar = sys.derived.hbar;

  if (sys.count() == 1) {
    const auto& mode = sys.derived.modes[0];
    const double s = std::sin(init[0].theta);
    std::vector<double> x{s * std::sin(init[0].eta) / (4.0 * mode.g), 2.0 * mode.g * s * std::cos(init[0].eta)};
    const double wn = mode.e_l / hbar;
    const double wp = 2.0 * mode.e_c / hbar;
    detail::rk4_linear(
        std::move(x), dt, steps,
        [&](double t, const std::vector<double>& v, std::vector<double>& out) {
          const double damp = sys.gamma(0, t) / 4.0;
          out[0] = -wn * v[1] - damp * v[0];
          out[1] = wp * v[0] - damp * v[1];
        },
        [&](std::size_t step, const std::vector<double>& v) {
          const double t = static_cast<double>(step) * dt;
          tr.times.push_back(t);
          detail::push_memristive(tr.modes[0], sys, 0, t, v[0]);
        });
    return tr;
  }

  const auto basis = detail::pauli_strings(2);
  const std::size_t nb = basis.size();
  const OperatorSet ops = build_operators(sys.derived, 2);
  const ComplexMatrix h = hamiltonian(sys.derived, 2);

  auto project = [&](const ComplexMatrix& op) {
    std::vector<double> c(nb);
    for (std::size_t j = 0; j < nb; ++j) c[j] = (basis[j] * op).trace().real() / 4.0;
    return c;
  };
  auto generator = [&](auto&& adjoint_map) {
    std::vector<double> m(nb * nb);
    for (std::size_t k = 0; k < nb; ++k) {
      const auto row = project(adjoint_map(basis[k]));
      std::copy(row.begin(), row.end(), m.begin() + static_cast<std::ptrdiff_t>(k * nb));
    }
    return m;
  };
  const auto m_h = generator([&](const ComplexMatrix& a) { return commutator(h, a) * cplx(0.0, 1.0); });
  std::vector<std::vector<double>> m_d;
  for (const auto& mo : ops.modes) {
    m_d.push_back(generator([&](const ComplexMatrix& a) {
      return mo.adag * a * mo.a - anticommutator(mo.number, a) * cplx(0.5, 0.0);
    }));
  }
  std::vector<std::vector<double>> readout;
  for (const auto& mo : ops.modes) readout.push_back(project(mo.charge));

  const ComplexMatrix rho0 = initial_state(init, 2);
  std::vector<double> x(nb);
  for (std::size_t j = 0; j < nb; ++j) x[j] = (rho0 * basis[j]).trace().real();

  std::vector<double> m(nb * nb);
  detail::rk4_linear(
      std::move(x), dt, steps,
      [&](double t, const std::vector<double>& v, std::vector<double>& out) {
        m = m_h;
        for (std::size_t l = 0; l < m_d.size(); ++l) {
          const double c = 0.5 * sys.gamma(l, t);
          for (std::size_t i = 0; i < m.size(); ++i) m[i] += c * m_d[l][i];
        }
        for (std::size_t k = 0; k < nb; ++k) {
          double acc = 0.0;
          for (std::size_t j = 0; j < nb; ++j) acc += m[k * nb + j] * v[j];
          out[k] = acc;
        }
      },
      [&](std::size_t step, const std::vector<double>& v) {
        const double t = static_cast<double>(step) * dt;
        tr.times.push_back(t);
        for (std::size_t l = 0; l < sys.count(); ++l) {
          double n_exp = 0.0;
          for (std::size_t j = 0; j < nb; ++j) n_exp += readout[l][j] * v[j];
          detail::push_memristive(tr.modes[l], sys, l, t, n_exp);
        }
      });
  return tr;
}

struct ConvergenceReport {
  double max_deviation = 0.0;  // max |<n>_coarse - <n>_fine| on the shared grid
  double relative = 0.0;       // max_deviation / max |<n>|
  bool pass = false;
  std::string message;
};

/// Runs evolve at steps_per_period and twice that; passes when the relative
/// deviation of <n_l> on the shared grid is below 1e-5.
inline ConvergenceReport convergence_check(const DensityMatrix& rho0, const MemristorSystem& sys,
                                           IntegratorConfig cfg, double threshold = 1e-5) {
  cfg.record_rho = false;
  const Trajectory coarse = evolve(rho0, sys, cfg);
  IntegratorConfig fine_cfg = cfg;
  fine_cfg.steps_per_period *= 2;
  const Trajectory fine = evolve(rho0, sys, fine_cfg);
  ConvergenceReport rep;
  double scale = 0.0;
  for (std::size_t l = 0; l < coarse.modes.size(); ++l) {
    for (std::size_t k = 0; k < coarse.size(); ++k) {
      rep.max_deviation = std::max(rep.max_deviation, std::abs(coarse.modes[l].n_exp[k] - fine.modes[l].n_exp[2 * k]));
      scale = std::max(scale, std::abs(coarse.modes[l].n_exp[k]));
    }
  }
  rep.relative = scale > 0.0 ? rep.max_deviation / scale : rep.max_deviation;
  rep.pass = rep.relative < threshold;
  char buf[160];
  std::snprintf(buf, sizeof buf, "steps_per_period %zu vs %zu: relative deviation %.3e (%s)", cfg.steps_per_period,
                fine_cfg.steps_per_period, rep.relative, rep.pass ? "converged" : "NOT converged");
  rep.message = buf;
  return rep;
}

/// CSV with header t,n1,v1,i1,gamma1[,n2,v2,i2,gamma2]; 17 significant digits.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t";
  for (std::size_t l = 0; l < tr.modes.size(); ++l) {
    const auto s = std::to_string(l + 1);
    os << ",n" << s << ",v" << s << ",i" << s << ",gamma" << s;
  }
  os << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (std::size_t k = 0; k < tr.size(); ++k) {
    put(tr.times[k]);
    for (const auto& m : tr.modes) {
      for (double v : {m.n_exp[k], m.v_cap[k], m.i_qp[k], m.gamma[k]}) {
        os << ',';
        put(v);
      }
    }
    os << '\n';
  }
}

}  // namespace qmem
