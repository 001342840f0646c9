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

// Two-qubit concurrence, C = max(0, e1 - e2 - e3 - e4) with e_i the
// descending eigenvalues of sqrt(sqrt(rho) rho~ sqrt(rho)).

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <ostream>
#include <utility>
#include <vector>

#include "qmem/dynamics.hpp"
#include "qmem/error.hpp"
#include "qmem/numerics.hpp"

namespace qmem {

/// rho~ = (sy x sy) rho* (sy x sy), conjugation in the computational basis.
inline ComplexMatrix spin_flip(const ComplexMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) throw DimensionError("spin_flip: two-qubit (4x4) state required");
  const ComplexMatrix yy = kron(pauli::y(), pauli::y());
  return yy * rho.conjugate() * yy;
}

inline double concurrence(const ComplexMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) throw DimensionError("concurrence: two-qubit (4x4) state required");
  const ComplexMatrix root = sqrtm_psd(rho);
  const ComplexMatrix inner = (root * spin_flip(rho) * root).hermitian_part();
  const std::vector<double> eps = eigh(sqrtm_psd(inner)).values;
  return std::clamp(eps[0] - eps[1] - eps[2] - eps[3], 0.0, 1.0);
}

/// Restricts a two-mode state with `trunc` levels per mode to the lowest two
/// levels of each mode and renormalizes.
inline ComplexMatrix project_to_qubits(const ComplexMatrix& rho, std::size_t trunc) {
  if (rho.rows() != trunc * trunc) throw DimensionError("project_to_qubits: state is not a two-mode state");
  if (trunc == 2) return rho;
  ComplexMatrix out(4, 4);
  auto index = [trunc](std::size_t q) { return (q / 2) * trunc + (q % 2); };
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) out(i, j) = rho(index(i), index(j));
  const double tr = out.trace().real();
  if (!(tr > 0.0)) throw ConfigError("project_to_qubits: no weight on the qubit subspace");
  return out * cplx(1.0 / tr, 0.0);
}

struct ConcurrencePoint {
  double t = 0.0;
  double concurrence = 0.0;
};

/// Concurrence at every recorded time of a two-memristor trajectory.
/// Trajectories with more than two levels per mode are projected onto the
/// qubit subspace first (a warning goes to `warn` when given).
inline std::vector<ConcurrencePoint> concurrence_series(const Trajectory& tr, std::ostream* warn = &std::cerr) {
  if (tr.modes.size() != 2) throw ConfigError("concurrence_series: two memristors required");
  if (tr.rho_samples.size() != tr.times.size())
    throw ConfigError("concurrence_series: trajectory was recorded without density matrices");
  std::vector<ConcurrencePoint> out;
  out.reserve(tr.size());
  if (tr.rho_samples.empty()) return out;
  const std::size_t dim = tr.rho_samples.front().rows();
  std::size_t trunc = 2;
  while (trunc * trunc < dim) ++trunc;
  if (trunc != 2 && warn)
    *warn << "warning: concurrence computed on the projection onto the two lowest levels (trunc=" << trunc << ")\n";
  for (std::size_t k = 0; k < tr.size(); ++k)
    out.push_back({tr.times[k], concurrence(project_to_qubits(tr.rho_samples[k], trunc))});
  return out;
}

/// CSV with header t,concurrence.
inline void write_concurrence_csv(std::ostream& os, const std::vector<ConcurrencePoint>& series) {
  os << "t,concurrence\n";
  char buf[64];
  for (const auto& p : series) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.t, p.concurrence);
    os << buf;
  }
}

}  // namespace qmem
