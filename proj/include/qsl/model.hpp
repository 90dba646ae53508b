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

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qsl/linalg.hpp"

namespace qsl {

// Units: hbar = 1 and Delta_1 = 1 sets the energy scale.

enum class CouplingKind { ising, heisenberg };
enum class ControlMode { fixed_delta, tunable_delta };
enum class Geometry { chain, triangle };

/// Single-qubit parameters for H_i = -Delta_i/2 sigma_x - eps_i/2 sigma_z.
struct QubitParams {
  double delta = 1.0;
  /// Static eps offset, only used when Delta is fixed.
  double epsilon0 = 0.0;
  /// max |eps_i(t)|
  double epsilon_bound = 20.0;
  /// Delta_i(t) in [0, delta_bound] when tunable.
  double delta_bound = 2.0;
};

struct CouplingSpec {
  CouplingKind kind = CouplingKind::ising;
  std::vector<std::pair<int, int>> edges;  // 1-based qubit indices
  std::vector<double> strengths;           // J per edge

  /// Path graph 1-2-...-n with uniform J.
  static CouplingSpec chain(int n_qubits, double j, CouplingKind kind);
  /// 3-cycle with uniform J.
  static CouplingSpec triangle(double j, CouplingKind kind);
  static CouplingSpec for_geometry(Geometry g, int n_qubits, double j, CouplingKind kind);
};

struct ControlChannel {
  CMatrix op;
  double lower = 0.0;
  double upper = 0.0;
  std::string label;
};

struct SystemModel {
  int n_qubits = 0;
  CMatrix drift;
  std::vector<ControlChannel> controls;
  CouplingKind coupling = CouplingKind::ising;
  ControlMode mode = ControlMode::fixed_delta;
  /// Largest J over all edges.
  double coupling_strength = 0.0;
  /// max J / min Delta_i; the model assumes this is small.
  double coupling_ratio = 0.0;
  bool weak_coupling = true;
  std::string basis_note;

  std::size_t dim() const { return drift.dim(); }
  std::size_t n_controls() const { return controls.size(); }
};

/// Ratio above which the J << Delta premise is flagged.
inline constexpr double kWeakCouplingLimit = 0.1;

/**
 * Assembles the drift and control operators.
 *
 * Fixed Delta: drift holds -Delta_i sigma_x/2, the static -eps0_i sigma_z/2
 * and every coupling term; the controls are -sigma_z^(i)/2 with amplitude
 * eps_i(t) in [-epsilon_bound, epsilon_bound].
 *
 * Tunable Delta: drift is coupling only; the controls are -sigma_x^(i)/2
 * (amplitude Delta_i(t) in [0, delta_bound]) and -sigma_z^(i)/2, per qubit in
 * that order.
 *
 * J is never a control.
 */
SystemModel build_system(const std::vector<QubitParams>& qubits, const CouplingSpec& coupling,
                         ControlMode mode);

/// J sigma_z sigma_z (Ising) or J (xx + yy + zz) (Heisenberg) on qubits i, j.
CMatrix coupling_term(CouplingKind kind, int i, int j, int n_qubits, double strength);

/// -(Delta/2)(sx1 + sx2) + J sz1 sz2, two qubits in resonance.
CMatrix resonant_iswap_drift(double delta, double j);

/// -(eps1/2) sz1 - (eps2/2) sz2 + J sz1 sz2, with Delta switched off.
CMatrix cz_drift(double eps1, double eps2, double j);

/// Delta_i = 1, 0.9, 0.82 for up to three qubits; further qubits get 1.
std::vector<QubitParams> default_qubits(int n_qubits);

const char* to_string(CouplingKind k);
const char* to_string(ControlMode m);
const char* to_string(Geometry g);

}  // namespace qsl
