// Copyright 2026 The QSL Authors
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

#include "qsl/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qsl/log.hpp"

namespace qsl {

CouplingSpec CouplingSpec::chain(int n_qubits, double j, CouplingKind kind) {
  CouplingSpec spec{kind, {}, {}};
  for (int i = 1; i < n_qubits; ++i) {
    spec.edges.emplace_back(i, i + 1);
    spec.strengths.push_back(j);
  }
  return spec;
}

CouplingSpec CouplingSpec::triangle(double j, CouplingKind kind) {
  return CouplingSpec{kind, {{1, 2}, {2, 3}, {1, 3}}, {j, j, j}};
}

CouplingSpec CouplingSpec::for_geometry(Geometry g, int n_qubits, double j, CouplingKind kind) {
  if (g == Geometry::triangle) {
    if (n_qubits != 3) throw std::invalid_argument("triangle geometry needs exactly 3 qubits");
    return triangle(j, kind);
  }
  return chain(n_qubits, j, kind);
}

CMatrix coupling_term(CouplingKind kind, int i, int j, int n_qubits, double strength) {
  auto zz = pauli_embed(PauliAxis::z, i, n_qubits) * pauli_embed(PauliAxis::z, j, n_qubits);
  if (kind == CouplingKind::heisenberg) {
    zz += pauli_embed(PauliAxis::x, i, n_qubits) * pauli_embed(PauliAxis::x, j, n_qubits);
    zz += pauli_embed(PauliAxis::y, i, n_qubits) * pauli_embed(PauliAxis::y, j, n_qubits);
  }
  return zz * Complex(strength);
}

SystemModel build_system(const std::vector<QubitParams>& qubits, const CouplingSpec& coupling,
                         ControlMode mode) {
  const int n = static_cast<int>(qubits.size());
  if (n == 0) throw std::invalid_argument("build_system: empty system");
  if (coupling.edges.size() != coupling.strengths.size()) {
    throw std::invalid_argument("build_system: one coupling strength per edge required");
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& [a, b] : coupling.edges) {
    if (a == b) throw std::invalid_argument("build_system: self-loop edge on qubit " + std::to_string(a));
    if (a < 1 || b < 1 || a > n || b > n) {
      throw std::invalid_argument("build_system: edge (" + std::to_string(a) + "," +
                                  std::to_string(b) + ") references a missing qubit");
    }
    if (!seen.insert(std::minmax(a, b)).second) {
      throw std::invalid_argument("build_system: duplicate edge");
    }
  }
  for (double s : coupling.strengths)
    if (!(s > 0.0)) throw std::invalid_argument("build_system: coupling strength must be > 0");
  for (const auto& q : qubits) {
    if (!(q.delta > 0.0)) throw std::invalid_argument("build_system: delta must be > 0");
    if (q.epsilon_bound < 0.0 || q.delta_bound < 0.0) {
      throw std::invalid_argument("build_system: amplitude bounds must be >= 0");
    }
  }

  const std::size_t dim = std::size_t{1} << n;
  SystemModel model;
  model.n_qubits = n;
  model.mode = mode;
  model.coupling = coupling.kind;
  model.drift = CMatrix(dim);

  for (int i = 1; i <= n; ++i) {
    const auto& q = qubits[i - 1];
    const auto sx = pauli_embed(PauliAxis::x, i, n);
    const auto sz = pauli_embed(PauliAxis::z, i, n);
    if (mode == ControlMode::fixed_delta) {
      add_scaled(model.drift, sx, -q.delta / 2.0);
      if (q.epsilon0 != 0.0) add_scaled(model.drift, sz, -q.epsilon0 / 2.0);
      model.controls.push_back({sz * Complex(-0.5), -q.epsilon_bound, q.epsilon_bound,
                                "eps_" + std::to_string(i)});
    } else {
      model.controls.push_back({sx * Complex(-0.5), 0.0, q.delta_bound, "delta_" + std::to_string(i)});
      model.controls.push_back({sz * Complex(-0.5), -q.epsilon_bound, q.epsilon_bound,
                                "eps_" + std::to_string(i)});
    }
  }
  for (std::size_t e = 0; e < coupling.edges.size(); ++e) {
    const auto [a, b] = coupling.edges[e];
    model.drift += coupling_term(coupling.kind, a, b, n, coupling.strengths[e]);
  }

  double min_delta = qubits.front().delta;
  for (const auto& q : qubits) min_delta = std::min(min_delta, q.delta);
  const double max_j =
      coupling.strengths.empty() ? 0.0 : *std::max_element(coupling.strengths.begin(), coupling.strengths.end());
  model.coupling_strength = max_j;
  model.coupling_ratio = max_j / min_delta;
  model.weak_coupling = model.coupling_ratio <= kWeakCouplingLimit;
  if (!model.weak_coupling) {
    std::ostringstream os;
    os << "J/min(Delta) = " << model.coupling_ratio << " violates the weak-coupling premise";
    warn(os.str());
  }
  model.basis_note = "computational basis |q1 q2 ...>, qubit 1 leftmost; sigma_z|0> = +|0>";
  return model;
}

CMatrix resonant_iswap_drift(double delta, double j) {
  if (j / delta > kWeakCouplingLimit) {
    std::ostringstream os;
    os << "resonant_iswap_drift: J/Delta = " << j / delta << " is not small";
    warn(os.str());
  }
  CMatrix h = (pauli_embed(PauliAxis::x, 1, 2) + pauli_embed(PauliAxis::x, 2, 2)) * Complex(-delta / 2.0);
  h += coupling_term(CouplingKind::ising, 1, 2, 2, j);
  return h;
}

CMatrix cz_drift(double eps1, double eps2, double j) {
  CMatrix h = pauli_embed(PauliAxis::z, 1, 2) * Complex(-eps1 / 2.0);
  add_scaled(h, pauli_embed(PauliAxis::z, 2, 2), -eps2 / 2.0);
  h += coupling_term(CouplingKind::ising, 1, 2, 2, j);
  return h;
}

std::vector<QubitParams> default_qubits(int n_qubits) {
  static constexpr double kDeltas[] = {1.0, 0.9, 0.82};
  std::vector<QubitParams> out(static_cast<std::size_t>(n_qubits));
  for (int i = 0; i < n_qubits && i < 3; ++i) out[i].delta = kDeltas[i];
  return out;
}

const char* to_string(CouplingKind k) { return k == CouplingKind::ising ? "ising" : "heisenberg"; }
const char* to_string(ControlMode m) {
  return m == ControlMode::fixed_delta ? "fixed_delta" : "tunable_delta";
}
const char* to_string(Geometry g) { return g == Geometry::chain ? "chain" : "triangle"; }

}  // namespace qsl
