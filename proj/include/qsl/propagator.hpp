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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qsl/linalg.hpp"
#include "qsl/model.hpp"

namespace qsl {

/**
 * Piecewise-constant control amplitudes.
 *
 * Slices are uniform unless built from explicit segment widths. Amplitudes
 * are stored slice-major: amplitude(k, j) is control j during slice k.
 */
class ControlPulse {
 public:
  ControlPulse() = default;
  /// Uniform slices of width duration / n_slices, all amplitudes zero.
  ControlPulse(double duration, std::size_t n_slices, std::size_t n_controls);
  /// One slice per width; amplitudes[k] holds the n_controls values of slice k.
  static ControlPulse from_segments(std::vector<double> widths,
                                    const std::vector<std::vector<double>>& amplitudes);

  double duration() const { return duration_; }
  std::size_t n_slices() const { return widths_.size(); }
  std::size_t n_controls() const { return n_controls_; }
  double width(std::size_t k) const { return widths_[k]; }
  std::span<const double> widths() const { return widths_; }

  double& amplitude(std::size_t k, std::size_t j) { return amps_[k * n_controls_ + j]; }
  double amplitude(std::size_t k, std::size_t j) const { return amps_[k * n_controls_ + j]; }
  std::span<double> amplitudes() { return amps_; }
  std::span<const double> amplitudes() const { return amps_; }

  /// Hash of widths and amplitudes, used to detect stale caches.
  std::uint64_t fingerprint() const;

  bool operator==(const ControlPulse&) const = default;

 private:
  double duration_ = 0.0;
  std::size_t n_controls_ = 0;
  std::vector<double> widths_;
  std::vector<double> amps_;
};

/// Tolerance on amplitude bounds before a pulse is rejected.
inline constexpr double kBoundSlack = 1e-12;

/// Throws std::invalid_argument on control-count mismatch or amplitudes
/// outside their bounds.
void validate_pulse(const SystemModel& model, const ControlPulse& pulse);

/// drift + sum_j u_kj C_j for slice k.
CMatrix slice_hamiltonian(const SystemModel& model, const ControlPulse& pulse, std::size_t k);

/// Total propagator U_K ... U_1 with U_k = exp(-i H_k dt_k).
CMatrix evolve(const SystemModel& model, const ControlPulse& pulse);

/// Drift-only evolution exp(-i drift t); no controls involved.
CMatrix evolve_drift(const SystemModel& model, double duration);

struct PropagatorCache {
  std::vector<HermitianEigen> slice_eigs;
  std::vector<CMatrix> slice_unitaries;  // U_1 .. U_K at index 0 .. K-1
  /// forward[k] = U_k ... U_1, forward[0] = I, forward[K] = total.
  std::vector<CMatrix> forward;
  /// backward[k] = U_K ... U_{k+1}, backward[K] = I.
  std::vector<CMatrix> backward;
  std::uint64_t pulse_fingerprint = 0;

  const CMatrix& total() const { return forward.back(); }
};

PropagatorCache build_cache(const SystemModel& model, const ControlPulse& pulse);

/// Worst-case rotation per slice, dt * (||drift|| + sum_j max|u_j| ||C_j||),
/// with spectral norms. Above 0.5 rad the discretization is coarse.
double max_phase_per_slice(const SystemModel& model, double duration, std::size_t n_slices);
inline constexpr double kCoarseSliceRadians = 0.5;
/// Emits a warning when max_phase_per_slice exceeds kCoarseSliceRadians.
void check_discretization(const SystemModel& model, double duration, std::size_t n_slices);

/// One row per slice: t (slice start), dt, then one column per control.
void write_pulse_csv(std::ostream& os, const ControlPulse& pulse,
                     const std::vector<std::string>& labels);
ControlPulse read_pulse_csv(std::istream& is);

}  // namespace qsl
