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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qmem/model.hpp"
#include "qmem/random.hpp"

namespace qmem {
namespace {

constexpr double kPi = std::numbers::pi;

DerivedParams reduced(std::vector<double> omegas, double coupling = 0.0, double g = 0.1) {
  DerivedParams d;
  d.hbar = 1.0;
  for (double w : omegas) d.modes.push_back({0.0, 0.0, w, g});
  d.coupling = coupling;
  return d;
}

TEST(Constants, ReducedFluxQuantum) {
  const PhysicalConstants k;
  EXPECT_EQ(k.phi_rq(), k.hbar / (2.0 * k.e));
}

TEST(Derive, ReducedUnitsExample) {
  CircuitEnergies en;
  en.e_c = {0.02};
  en.e_l = {25.0};
  const DerivedParams d = derive_from_energies(en, 1.0);
  EXPECT_NEAR(d.modes[0].omega, 1.0, 1e-14);
  EXPECT_NEAR(d.modes[0].g, std::pow(0.02 / 800.0, 0.25), 1e-15);
  EXPECT_NEAR(d.modes[0].g, 0.0707, 1e-4);
}

TEST(Derive, UncoupledPairHasNoCoupling) {
  CircuitParams p;
  p.memristors = {MemristorCircuit{}, MemristorCircuit{}};
  const DerivedParams d = derive(p);
  EXPECT_EQ(d.e_c12, 0.0);
  EXPECT_EQ(d.e_l12, 0.0);
  EXPECT_EQ(d.coupling, 0.0);
}

TEST(Derive, UncoupledPairEqualsTwoSingles) {
  CircuitParams pair;
  pair.memristors = {MemristorCircuit{1e-12, 10e-9, 1.0}, MemristorCircuit{2e-12, 5e-9, 1.0}};
  const DerivedParams d = derive(pair);
  for (std::size_t l = 0; l < 2; ++l) {
    CircuitParams one;
    one.memristors = {pair.memristors[l]};
    const DerivedParams s = derive(one);
    EXPECT_DOUBLE_EQ(d.modes[l].e_c, s.modes[0].e_c);
    EXPECT_DOUBLE_EQ(d.modes[l].e_l, s.modes[0].e_l);
    EXPECT_DOUBLE_EQ(d.modes[l].omega, s.modes[0].omega);
    EXPECT_DOUBLE_EQ(d.modes[l].g, s.modes[0].g);
  }
}

TEST(Derive, CapacitiveCouplingByHand) {
  // C = [[2, -1], [-1, 2]] pF, so C^-1 = [[2, 1], [1, 2]] / 3 pF^-1.
  CircuitParams p;
  p.memristors = {MemristorCircuit{}, MemristorCircuit{}};
  p.c_c = 1e-12;
  const PhysicalConstants k;
  const DerivedParams d = derive(p, k);
  const double ec = 2.0 * k.e * k.e * (2.0 / 3.0) / 1e-12;
  const double ec12 = 2.0 * k.e * k.e * (1.0 / 3.0) / 1e-12;
  const double el = k.phi_rq() * k.phi_rq() / 10e-9;
  const double w = std::sqrt(2.0 * ec * el) / k.hbar;
  for (const auto& m : d.modes) {
    EXPECT_NEAR(m.e_c / ec, 1.0, 1e-12);
    EXPECT_NEAR(m.e_l / el, 1.0, 1e-12);
    EXPECT_NEAR(m.omega / w, 1.0, 1e-12);
    EXPECT_NEAR(m.g, std::pow(ec / (32.0 * el), 0.25), 1e-12 * m.g);
  }
  EXPECT_NEAR(d.e_c12 / ec12, 1.0, 1e-12);
  EXPECT_EQ(d.e_l12, 0.0);
  EXPECT_EQ(d.alpha, 0.0);
  EXPECT_NEAR(d.beta, 0.5, 1e-12);
  EXPECT_NEAR(d.coupling / (-0.5 * w), 1.0, 1e-12);
}

TEST(Derive, DefaultsAreInTwoLevelRegime) {
  const DerivedParams d = derive(CircuitParams{});
  EXPECT_GT(d.modes[0].g, 0.0);
  EXPECT_LT(d.modes[0].g * d.modes[0].g, 0.05);
}

TEST(Derive, RejectsInvalidCircuit) {
  CircuitParams p;
  p.memristors[0].c_sigma = 0.0;
  EXPECT_THROW(derive(p), ConfigError);
  CircuitParams q;
  q.memristors = {MemristorCircuit{}, MemristorCircuit{}};
  q.l_c = -1.0;
  EXPECT_THROW(derive(q), ConfigError);
}

TEST(Hamiltonian, SingleMode) {
  const std::vector<double> expected{0, 1};
  EXPECT_LE(max_abs_diff(hamiltonian(reduced({1.0}), 2), ComplexMatrix::diagonal(expected)), 1e-15);
}

TEST(Hamiltonian, UncoupledPair) {
  const std::vector<double> expected{0, 1, 1, 2};
  EXPECT_LE(max_abs_diff(hamiltonian(reduced({1.0, 1.0}), 2), ComplexMatrix::diagonal(expected)), 1e-15);
}

TEST(Hamiltonian, HoppingElement) {
  const double kappa = 0.37;
  const ComplexMatrix h = hamiltonian(reduced({1.0, 1.0}, kappa), 2);
  EXPECT_NEAR(h(1, 2).real(), -kappa, 1e-15);  // <01|H|10>
  EXPECT_NEAR(h(2, 1).real(), -kappa, 1e-15);
}

TEST(Hamiltonian, HermitianForRandomParams) {
  Rng rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    CircuitParams p;
    p.memristors = {MemristorCircuit{rng.uniform(0.5e-12, 2e-12), rng.uniform(5e-9, 20e-9), 1.0},
                    MemristorCircuit{rng.uniform(0.5e-12, 2e-12), rng.uniform(5e-9, 20e-9), 1.0}};
    p.c_c = rng.uniform(0.0, 2e-12);
    p.l_c = rng.uniform(1e-9, 2e-8);
    const DerivedParams d = derive(p);
    for (std::size_t trunc : {2u, 3u, 4u}) {
      const ComplexMatrix h = hamiltonian(d, trunc);
      EXPECT_LE(h.hermiticity_error(), 1e-12 * h.max_abs());
    }
  }
}

TEST(Hamiltonian, LabelSwapSymmetry) {
  const ComplexMatrix h = hamiltonian(reduced({1.0, 1.0}, 0.2), 3);
  // Permutation |i j> -> |j i>.
  ComplexMatrix perm(9, 9);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) perm(j * 3 + i, i * 3 + j) = 1.0;
  EXPECT_LE(max_abs_diff(perm * h * perm.adjoint(), h), 1e-15);
}

TEST(Operators, CommutatorAwayFromTopLevel) {
  const ComplexMatrix a = local_annihilation(4);
  const ComplexMatrix c = commutator(a, a.adjoint());
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(c(k, k).real(), 1.0, 1e-14);
  EXPECT_NEAR(c(3, 3).real(), -3.0, 1e-14);
}

TEST(Operators, ChargeAndPhaseAsBuilt) {
  const DerivedParams d = reduced({1.0}, 0.0, 0.07);
  const OperatorSet ops = build_operators(d, 3);
  const auto& m = ops.modes[0];
  EXPECT_LE(max_abs_diff(m.charge, (m.adag - m.a) * cplx(0.0, 1.0 / (4.0 * 0.07))), 1e-15);
  EXPECT_LE(max_abs_diff(m.phase, (m.adag + m.a) * cplx(0.14, 0.0)), 1e-15);
  EXPECT_LE(m.charge.hermiticity_error(), 1e-15);
}

TEST(DecayRate, ZeroLambda) {
  const MemristorDerived m{0, 0, 1.0, 0.1};
  for (double t : {0.0, 0.3, 2.0}) EXPECT_EQ(decay_rate(t, m, DriveParams{0.0, kPi}, 0.0), 0.0);
}

TEST(DecayRate, FluxAtPiClosesTheChannel) {
  const MemristorDerived m{0, 0, 1.0, 0.1};
  EXPECT_NEAR(decay_rate(1.234, m, DriveParams{kPi, 0.0}, 5.0), 0.0, 1e-18);
}

TEST(DecayRate, HandValue) {
  const MemristorDerived m{0, 0, 1.0, 0.1};
  const double gamma = decay_rate(0.0, m, DriveParams{0.0, 0.0}, 2.0);
  EXPECT_NEAR(gamma, 2.0 * 0.01 * std::exp(-0.01), 1e-15);
  EXPECT_NEAR(gamma, 0.019801, 1e-6);
}

TEST(DecayRate, PeriodicAndBounded) {
  const MemristorDerived m{0, 0, 2.5, 0.08};
  const DriveParams drive{0.4, 2.0};
  const double period = 2.0 * kPi / m.omega;
  Rng rng(2);
  for (int k = 0; k < 200; ++k) {
    const double t = rng.uniform(0.0, 10.0);
    const double g = decay_rate(t, m, drive, 3.0);
    EXPECT_NEAR(g, decay_rate(t + period, m, drive, 3.0), 1e-12);
    EXPECT_GE(g, 0.0);
    EXPECT_LE(g, decay_rate_bound(m, 3.0) * (1 + 1e-15));
  }
}

TEST(InitialState, Examples) {
  const ComplexMatrix ground = initial_state({{0.0, 1.3}}, 2);
  EXPECT_LE(max_abs_diff(ground, ComplexMatrix{{1, 0}, {0, 0}}), 1e-15);
  const ComplexMatrix plus = initial_state({{kPi / 2, 0.0}}, 2);
  EXPECT_LE(max_abs_diff(plus, ComplexMatrix{{0.5, 0.5}, {0.5, 0.5}}), 1e-15);
  for (double eta : {0.0, 1.0, 4.0}) {
    const ComplexMatrix excited = initial_state({{kPi, eta}}, 2);
    EXPECT_LE(max_abs_diff(excited, ComplexMatrix{{0, 0}, {0, 1}}), 1e-15);
  }
}

TEST(InitialState, PureProductWithUnitTrace) {
  const ComplexMatrix rho = initial_state({{0.7, 2.0}, {2.1, 5.0}}, 3);
  ASSERT_EQ(rho.rows(), 9u);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-14);
  EXPECT_LE(max_abs_diff(rho * rho, rho), 1e-14);
  EXPECT_LE(max_abs_diff(rho, kron(initial_state({{0.7, 2.0}}, 3), initial_state({{2.1, 5.0}}, 3))), 1e-15);
}

TEST(InitialState, RejectsThetaOutOfRange) { EXPECT_THROW(initial_state({{4.0, 0.0}}, 2), ConfigError); }

}  // namespace
}  // namespace qmem
