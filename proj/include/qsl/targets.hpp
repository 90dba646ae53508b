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
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qsl/linalg.hpp"
#include "qsl/propagator.hpp"

namespace qsl {

struct TargetGate {
  std::string label;
  CMatrix matrix;
  int n_qubits = 0;
};

enum class StandardGate { cnot, cz, iswap, sqrt_swap, toffoli };

/// Exact gate matrices in the computational basis. Qubit 1 (leftmost factor)
/// is the control for CNOT; qubits 1 and 2 control the Toffoli, qubit 3 is
/// its target.
TargetGate standard_gate(StandardGate gate);
/// Accepts CNOT, CZ, iSWAP, SQRT_SWAP, TOFFOLI (case-insensitive).
/// Throws std::invalid_argument on anything else.
TargetGate standard_gate(std::string_view name);
StandardGate parse_gate_name(std::string_view name);
const char* to_string(StandardGate gate);

/// |Tr(target^dagger u)|^2 / d^2.
double trace_fidelity(const CMatrix& target, const CMatrix& u);

/// Rotation by beta about the axis at polar angle theta (from z) and azimuth
/// phi (from the xz plane).
struct RotationSpec {
  double beta = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

/// exp(-i beta/2 (sin t cos p sx + sin t sin p sy + cos t sz)).
CMatrix rotation_unitary(const RotationSpec& spec);

/**
 * Three-segment pulse for a single qubit with fixed Delta and a tunable eps
 * (control -sigma_z/2, bound eps_bound): a fast z frame change, a tilted
 * rotation with eps = +-Delta cot(theta) for |beta| sin(theta)/Delta, and
 * the inverse frame change. The z segments run at |eps| = eps_bound, so
 * their finite tilt leaves an error of order (Delta/eps_bound)^2. Segments
 * that would rotate by zero are dropped.
 *
 * Throws std::invalid_argument for theta at 0 or pi (pure z rotations need no
 * middle step), beta = 0, or |Delta cot(theta)| > eps_bound.
 */
ControlPulse single_qubit_recipe(const RotationSpec& spec, double delta, double eps_bound);

/// Diagonal phase layer (x) diag(1, e^{i phi_q}).
CMatrix z_phase_layer(const std::vector<double>& phases);

/// Hadamard on every qubit on both sides: maps the sigma_x eigenbasis to
/// the computational one.
CMatrix to_x_eigenbasis(const CMatrix& u);

struct LocalCorrection {
  double fidelity = 0.0;
  std::vector<double> phases;  // per qubit, wrapped to (-pi, pi]
};

/// max over per-qubit z phases of trace_fidelity(target, z_phase_layer(phases) u),
/// found by coordinate ascent from several starts.
LocalCorrection fidelity_local_z_corrected(const CMatrix& u, const TargetGate& target);

/// max over product unitaries U_1 (x) ... (x) U_n of trace_fidelity(target, .):
/// the best a gate can do with no interaction time. Alternating exact
/// single-qubit maximization from several seeded starts.
double local_fidelity_bound(const TargetGate& target);

/// Nested [[re, im], ...] rows.
nlohmann::json gate_to_json(const TargetGate& gate);

}  // namespace qsl
