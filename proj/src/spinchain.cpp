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

#include "qsl/spinchain.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace qsl {

void ChainSpec::validate() const {
  if (n_sites < 2) throw std::invalid_argument("chain needs at least 2 sites");
  if (!(J > 0.0)) throw std::invalid_argument("chain coupling J must be > 0");
}

namespace {

void check_momentum(double k) {
  if (!(k > -kPi && k <= kPi)) throw std::invalid_argument("momentum must lie in (-pi, pi]");
}

Complex inner(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm_sq(const std::vector<Complex>& a) {
  double s = 0.0;
  for (const auto& x : a) s += std::norm(x);
  return s;
}

}  // namespace

double dispersion(double k, double J) {
  check_momentum(k);
  return 2.0 * J * std::cos(k);
}

double group_velocity(double k, double J) {
  check_momentum(k);
  return -2.0 * J * std::sin(k);
}

double effective_hopping(const ChainSpec& spec) {
  spec.validate();
  return spec.coupling == CouplingKind::heisenberg ? 2.0 * spec.J : spec.J;
}

double t_min_transfer(const ChainSpec& spec) {
  return static_cast<double>(spec.n_sites) / (2.0 * effective_hopping(spec));
}

double sequential_iswap_time(const ChainSpec& spec) {
  spec.validate();
  return static_cast<double>(spec.n_sites) * kPi / (2.0 * spec.J);
}

CMatrix effective_hopping_hamiltonian(const ChainSpec& spec) {
  const double hop = effective_hopping(spec);
  if (spec.n_sites > kMaxEffectiveSites) {
    throw std::invalid_argument("effective model limited to " + std::to_string(kMaxEffectiveSites) + " sites");
  }
  CMatrix h(spec.n_sites);
  for (std::size_t j = 0; j + 1 < spec.n_sites; ++j) {
    h(j, j + 1) = hop;
    h(j + 1, j) = hop;
  }
  return h;
}

std::vector<Complex> wavepacket_amplitudes(const Wavepacket& packet, std::size_t n_sites) {
  check_momentum(packet.center_momentum);
  const auto n = static_cast<double>(n_sites);
  if (!(packet.width > 0.0) || packet.width >= n) {
    throw std::invalid_argument("packet width must lie in (0, N)");
  }
  if (!(packet.center_site >= 1.0 && packet.center_site <= n)) {
    throw std::invalid_argument("packet center must lie on the chain");
  }
  std::vector<Complex> psi(n_sites);
  const double denom = 4.0 * packet.width * packet.width;
  for (std::size_t i = 0; i < n_sites; ++i) {
    const double j = static_cast<double>(i + 1);
    const double d = j - packet.center_site;
    psi[i] = std::exp(-d * d / denom) * std::polar(1.0, -packet.center_momentum * j);
  }
  const double norm = std::sqrt(norm_sq(psi));
  for (auto& x : psi) x /= norm;
  return psi;
}

std::vector<Complex> evolve_in_eigenbasis(const HermitianEigen& eig, const std::vector<Complex>& psi0, double t) {
  const std::size_t n = psi0.size();
  const CMatrix& v = eig.vectors;
  std::vector<Complex> c(n);
  for (std::size_t m = 0; m < n; ++m) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::conj(v(i, m)) * psi0[i];
    c[m] = s * std::polar(1.0, -eig.values[m] * t);
  }
  std::vector<Complex> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex s = 0.0;
    for (std::size_t m = 0; m < n; ++m) s += v(i, m) * c[m];
    out[i] = s;
  }
  return out;
}

TransferResult simulate_transfer(const ChainSpec& spec, const Wavepacket& packet, const TransferOptions& options) {
  if (options.n_samples < 2) throw std::invalid_argument("simulate_transfer: need at least 2 samples");
  const auto eig = eig_hermitian(effective_hopping_hamiltonian(spec));
  const auto psi0 = wavepacket_amplitudes(packet, spec.n_sites);
  // Mirror image j -> N + 1 - j: a packet launched from site 1 has fully
  // reflected off site N when it matches this state.
  const std::vector<Complex> target(psi0.rbegin(), psi0.rend());

  TransferResult r;
  r.t_min_analytic = t_min_transfer(spec);
  const double t_max = options.t_max > 0.0 ? options.t_max : 2.0 * r.t_min_analytic;
  r.times.resize(options.n_samples);
  r.arrival_overlap.resize(options.n_samples);
  r.probabilities.resize(options.n_samples);
  std::size_t best = 0;
  for (std::size_t s = 0; s < options.n_samples; ++s) {
    const double t = t_max * static_cast<double>(s) / static_cast<double>(options.n_samples - 1);
    const auto psi = evolve_in_eigenbasis(eig, psi0, t);
    r.times[s] = t;
    r.arrival_overlap[s] = std::norm(inner(target, psi));
    auto& prob = r.probabilities[s];
    prob.resize(spec.n_sites);
    for (std::size_t i = 0; i < spec.n_sites; ++i) prob[i] = std::norm(psi[i]);
    if (r.arrival_overlap[s] > r.arrival_overlap[best]) best = s;
  }
  r.arrival_time = r.times[best];
  r.arrival_fidelity = r.arrival_overlap[best];
  return r;
}

CMatrix full_space_chain_hamiltonian(const ChainSpec& spec, double delta, FullSpaceForm form) {
  spec.validate();
  if (spec.n_sites > kMaxFullSpaceSites) {
    throw std::invalid_argument("full-space chain limited to " + std::to_string(kMaxFullSpaceSites) + " sites");
  }
  const int n = static_cast<int>(spec.n_sites);
  // Hadamard on every qubit: sigma_x <-> sigma_z, sigma_y -> -sigma_y.
  CMatrix h(std::size_t{1} << n);
  for (int q = 1; q <= n; ++q) add_scaled(h, pauli_embed(PauliAxis::z, q, n), -delta / 2.0);
  auto bond = [&](PauliAxis axis, int q) {
    return pauli_embed(axis, q, n) * pauli_embed(axis, q + 1, n);
  };
  for (int q = 1; q < n; ++q) {
    switch (form) {
      case FullSpaceForm::heisenberg_flip_flop:
        add_scaled(h, bond(PauliAxis::x, q), spec.J);
        add_scaled(h, bond(PauliAxis::y, q), spec.J);
        break;
      case FullSpaceForm::heisenberg_xxx:
        add_scaled(h, bond(PauliAxis::x, q), spec.J);
        add_scaled(h, bond(PauliAxis::y, q), spec.J);
        add_scaled(h, bond(PauliAxis::z, q), spec.J);
        break;
      case FullSpaceForm::ising:
        add_scaled(h, bond(PauliAxis::x, q), spec.J);
        break;
    }
  }
  return h;
}

std::vector<Complex> embed_single_excitation(const std::vector<Complex>& amplitudes) {
  const std::size_t n = amplitudes.size();
  if (n == 0 || n > kMaxFullSpaceSites) throw std::invalid_argument("embed_single_excitation: bad site count");
  std::vector<Complex> full(std::size_t{1} << n);
  for (std::size_t i = 0; i < n; ++i) full[std::size_t{1} << (n - 1 - i)] = amplitudes[i];
  return full;
}

std::vector<Complex> project_single_excitation(const std::vector<Complex>& full, std::size_t n_sites) {
  if (full.size() != (std::size_t{1} << n_sites)) {
    throw std::invalid_argument("project_single_excitation: dimension mismatch");
  }
  std::vector<Complex> out(n_sites);
  for (std::size_t i = 0; i < n_sites; ++i) out[i] = full[std::size_t{1} << (n_sites - 1 - i)];
  return out;
}

SectorComparison compare_with_effective(const CMatrix& full_h, const CMatrix& effective_h,
                                        const std::vector<Complex>& psi0, const std::vector<double>& times) {
  const std::size_t n = psi0.size();
  if (effective_h.dim() != n || full_h.dim() != (std::size_t{1} << n)) {
    throw std::invalid_argument("compare_with_effective: dimension mismatch");
  }
  const auto eig_full = eig_hermitian(full_h);
  const auto eig_eff = eig_hermitian(effective_h);
  const auto full0 = embed_single_excitation(psi0);
  SectorComparison out;
  for (double t : times) {
    const auto full = evolve_in_eigenbasis(eig_full, full0, t);
    const auto sector = project_single_excitation(full, n);
    const auto eff = evolve_in_eigenbasis(eig_eff, psi0, t);
    const Complex ov = inner(eff, sector);
    const double in_sector = norm_sq(sector);
    const Complex phase = std::abs(ov) > 0.0 ? ov / std::abs(ov) : Complex(1.0);
    double err_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) err_sq += std::norm(sector[i] - phase * eff[i]);
    out.max_state_error = std::max(out.max_state_error, std::sqrt(err_sq));
    out.max_infidelity = std::max(out.max_infidelity, 1.0 - std::norm(ov));
    out.max_leakage = std::max(out.max_leakage, std::max(0.0, norm_sq(full) - in_sector));
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const TransferResult& result, double threshold) {
  const auto old_flags = os.flags();
  const auto old_prec = os.precision();
  os << "t,site,probability\n" << std::setprecision(12);
  for (std::size_t s = 0; s < result.times.size(); ++s) {
    const auto& prob = result.probabilities[s];
    for (std::size_t i = 0; i < prob.size(); ++i) {
      if (prob[i] >= threshold) os << result.times[s] << ',' << (i + 1) << ',' << prob[i] << '\n';
    }
  }
  os.flags(old_flags);
  os.precision(old_prec);
}

nlohmann::json transfer_summary(const ChainSpec& spec, const TransferResult& result) {
  return {{"N", spec.n_sites},
          {"J", spec.J},
          {"coupling", to_string(spec.coupling)},
          {"t_min_analytic", result.t_min_analytic},
          {"arrival_time", result.arrival_time},
          {"arrival_fidelity", result.arrival_fidelity},
          {"ratio", result.arrival_time / result.t_min_analytic},
          {"sequential_iswap_time", sequential_iswap_time(spec)}};
}

}  // namespace qsl
