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

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "qsl/linalg.hpp"
#include "qsl/model.hpp"

namespace qsl {

// Single-excitation transport on an open chain of N qubits with uniform J.
// Sites are 1-based in the public API and 0-based in amplitude vectors.

struct ChainSpec {
  std::size_t n_sites = 2;
  double J = 1.0;
  CouplingKind coupling = CouplingKind::ising;

  /// Throws std::invalid_argument unless N >= 2 and J > 0.
  void validate() const;
};

struct Wavepacket {
  double center_site = 1.0;
  /// Momentum k in (-pi, pi]; k = pi/2 travels toward site N fastest.
  double center_momentum = kPi / 2;
  /// Gaussian width in sites (standard deviation of the site probability).
  double width = 1.0;
};

/// E_k = 2J cos k. Throws std::invalid_argument for k outside (-pi, pi].
double dispersion(double k, double J);
/// dE/dk = -2J sin k.
double group_velocity(double k, double J);

/// Hopping amplitude in the one-excitation model: J (Ising, after the
/// rotating-wave step) or 2J (Heisenberg).
double effective_hopping(const ChainSpec& spec);
/// N / (2 J_eff): N/(2J) for Ising, N/(4J) for Heisenberg.
double t_min_transfer(const ChainSpec& spec);
/// N swaps of pi/(2J) each.
double sequential_iswap_time(const ChainSpec& spec);

inline constexpr std::size_t kMaxEffectiveSites = 512;

/// N x N tridiagonal hopping matrix, open boundaries, zero on-site energy.
/// Throws std::invalid_argument for N > kMaxEffectiveSites.
CMatrix effective_hopping_hamiltonian(const ChainSpec& spec);

/**
 * Normalized amplitudes psi_j ~ exp(-(j - c)^2 / (4 w^2)) exp(-i k j) on
 * sites 1..N, truncated at the chain ends. The sign of the phase makes a
 * positive k move toward larger j under positive hopping.
 *
 * Throws std::invalid_argument when width <= 0, width >= N, or the center
 * lies outside [1, N].
 */
std::vector<Complex> wavepacket_amplitudes(const Wavepacket& packet, std::size_t n_sites);

/// psi(t) = V exp(-i Lambda t) V^dagger psi0.
std::vector<Complex> evolve_in_eigenbasis(const HermitianEigen& eig, const std::vector<Complex>& psi0, double t);

struct TransferOptions {
  std::size_t n_samples = 401;
  /// Sampling window [0, t_max]; 0 means 2 * t_min_transfer.
  double t_max = 0.0;
};

struct TransferResult {
  double t_min_analytic = 0.0;
  double arrival_time = 0.0;
  /// |<target|psi(arrival_time)>|^2 with target the mirror image of the
  /// initial packet (site j -> N + 1 - j).
  double arrival_fidelity = 0.0;
  std::vector<double> times;
  std::vector<double> arrival_overlap;               // per sample
  std::vector<std::vector<double>> probabilities;    // [sample][site]
};

/// Evolves the packet under effective_hopping_hamiltonian (one
/// eigendecomposition, then exact evolution at each sample time).
TransferResult simulate_transfer(const ChainSpec& spec, const Wavepacket& packet, const TransferOptions& options = {});

// Full 2^N space, written in the sigma_x eigenbasis of every qubit so that
// an excitation is a single flipped bit (site 1 = most significant bit).

enum class FullSpaceForm {
  /// J sum (sigma_y sigma_y + sigma_z sigma_z): the flip-flop part of the
  /// Heisenberg coupling, hopping exactly 2J in the one-excitation sector.
  heisenberg_flip_flop,
  /// Full J (XX + YY + ZZ); adds an on-site shift of +2J on both end sites
  /// relative to the bulk.
  heisenberg_xxx,
  /// J sum sigma_z sigma_z with no rotating-wave approximation.
  ising,
};

inline constexpr std::size_t kMaxFullSpaceSites = 10;

/// -delta/2 sum sigma_x plus the coupling, in the rotated basis.
CMatrix full_space_chain_hamiltonian(const ChainSpec& spec, double delta, FullSpaceForm form);
std::vector<Complex> embed_single_excitation(const std::vector<Complex>& amplitudes);
std::vector<Complex> project_single_excitation(const std::vector<Complex>& full, std::size_t n_sites);

struct SectorComparison {
  /// max over times of min over phases a of || P psi_full - e^{ia} psi_eff ||.
  double max_state_error = 0.0;
  /// max over times of 1 - |<psi_eff | P psi_full>|^2.
  double max_infidelity = 0.0;
  /// max over times of the weight outside the one-excitation sector.
  double max_leakage = 0.0;
};

/// Evolves embed(psi0) under full_h and psi0 under effective_h at each time.
/// The sector phase is fixed by the overlap, so uniform energy offsets drop out.
SectorComparison compare_with_effective(const CMatrix& full_h, const CMatrix& effective_h,
                                        const std::vector<Complex>& psi0, const std::vector<double>& times);

/// Rows t, site, probability for probabilities >= threshold; 12 significant digits.
void write_trajectory_csv(std::ostream& os, const TransferResult& result, double threshold = 1e-6);
nlohmann::json transfer_summary(const ChainSpec& spec, const TransferResult& result);

}  // namespace qsl
