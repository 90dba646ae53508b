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

#include "qsl/propagator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qsl/log.hpp"

namespace qsl {

ControlPulse::ControlPulse(double duration, std::size_t n_slices, std::size_t n_controls)
    : duration_(duration), n_controls_(n_controls) {
  if (n_slices == 0) throw std::invalid_argument("ControlPulse: need at least one slice");
  if (!(duration > 0.0)) throw std::invalid_argument("ControlPulse: duration must be > 0");
  widths_.assign(n_slices, duration / static_cast<double>(n_slices));
  amps_.assign(n_slices * n_controls, 0.0);
}

ControlPulse ControlPulse::from_segments(std::vector<double> widths,
                                         const std::vector<std::vector<double>>& amplitudes) {
  if (widths.empty()) throw std::invalid_argument("ControlPulse: need at least one slice");
  if (amplitudes.size() != widths.size()) {
    throw std::invalid_argument("ControlPulse: one amplitude row per segment required");
  }
  ControlPulse p;
  p.n_controls_ = amplitudes.front().size();
  for (double w : widths)
    if (!(w > 0.0)) throw std::invalid_argument("ControlPulse: segment widths must be > 0");
  for (const auto& row : amplitudes) {
    if (row.size() != p.n_controls_) throw std::invalid_argument("ControlPulse: ragged amplitude rows");
    p.amps_.insert(p.amps_.end(), row.begin(), row.end());
  }
  p.duration_ = std::accumulate(widths.begin(), widths.end(), 0.0);
  p.widths_ = std::move(widths);
  return p;
}

std::uint64_t ControlPulse::fingerprint() const {
  // FNV-1a over the raw bits.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](double x) {
    auto bits = std::bit_cast<std::uint64_t>(x);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  for (double w : widths_) mix(w);
  for (double a : amps_) mix(a);
  return h;
}

void validate_pulse(const SystemModel& model, const ControlPulse& pulse) {
  if (pulse.n_controls() != model.n_controls()) {
    throw std::invalid_argument("pulse has " + std::to_string(pulse.n_controls()) +
                                " controls, model has " + std::to_string(model.n_controls()));
  }
  for (std::size_t k = 0; k < pulse.n_slices(); ++k)
    for (std::size_t j = 0; j < pulse.n_controls(); ++j) {
      const double u = pulse.amplitude(k, j);
      const auto& c = model.controls[j];
      if (!(u >= c.lower - kBoundSlack && u <= c.upper + kBoundSlack)) {
        std::ostringstream os;
        os << "amplitude " << u << " of control " << c.label << " in slice " << k
           << " outside [" << c.lower << ", " << c.upper << "]";
        throw std::invalid_argument(os.str());
      }
    }
}

CMatrix slice_hamiltonian(const SystemModel& model, const ControlPulse& pulse, std::size_t k) {
  CMatrix h = model.drift;
  for (std::size_t j = 0; j < model.n_controls(); ++j) {
    const double u = pulse.amplitude(k, j);
    if (u != 0.0) add_scaled(h, model.controls[j].op, u);
  }
  return h;
}

namespace {

// Shared by evolve and build_cache so both produce identical bits.
template <typename OnSlice>
CMatrix propagate(const SystemModel& model, const ControlPulse& pulse, OnSlice&& on_slice) {
  validate_pulse(model, pulse);
  CMatrix total = CMatrix::identity(model.dim());
  CMatrix scratch(model.dim());
  for (std::size_t k = 0; k < pulse.n_slices(); ++k) {
    auto eig = eig_hermitian(slice_hamiltonian(model, pulse, k));
    CMatrix u = expm_from_eigen(eig, pulse.width(k));
    multiply_into(u, total, scratch);
    std::swap(total, scratch);
    on_slice(std::move(eig), std::move(u), total);
  }
  return total;
}

}  // namespace

CMatrix evolve(const SystemModel& model, const ControlPulse& pulse) {
  return propagate(model, pulse, [](HermitianEigen&&, CMatrix&&, const CMatrix&) {});
}

CMatrix evolve_drift(const SystemModel& model, double duration) {
  return expm_hermitian(model.drift, duration);
}

PropagatorCache build_cache(const SystemModel& model, const ControlPulse& pulse) {
  PropagatorCache cache;
  const std::size_t n = pulse.n_slices();
  cache.slice_eigs.reserve(n);
  cache.slice_unitaries.reserve(n);
  cache.forward.reserve(n + 1);
  cache.forward.push_back(CMatrix::identity(model.dim()));
  propagate(model, pulse, [&](HermitianEigen&& eig, CMatrix&& u, const CMatrix& total) {
    cache.slice_eigs.push_back(std::move(eig));
    cache.slice_unitaries.push_back(std::move(u));
    cache.forward.push_back(total);
  });
  cache.backward.assign(n + 1, CMatrix());
  cache.backward[n] = CMatrix::identity(model.dim());
  for (std::size_t k = n; k-- > 0;) {
    cache.backward[k] = cache.backward[k + 1] * cache.slice_unitaries[k];
  }
  cache.pulse_fingerprint = pulse.fingerprint();
  return cache;
}

double max_phase_per_slice(const SystemModel& model, double duration, std::size_t n_slices) {
  double scale = spectral_norm_hermitian(model.drift);
  for (const auto& c : model.controls) {
    scale += std::max(std::abs(c.lower), std::abs(c.upper)) * spectral_norm_hermitian(c.op);
  }
  return scale * duration / static_cast<double>(n_slices);
}

void check_discretization(const SystemModel& model, double duration, std::size_t n_slices) {
  const double phase = max_phase_per_slice(model, duration, n_slices);
  if (phase > kCoarseSliceRadians) {
    std::ostringstream os;
    os << "slice width " << duration / static_cast<double>(n_slices) << " allows up to " << phase
       << " rad per slice (> " << kCoarseSliceRadians << ")";
    warn(os.str());
  }
}

void write_pulse_csv(std::ostream& os, const ControlPulse& pulse,
                     const std::vector<std::string>& labels) {
  if (labels.size() != pulse.n_controls()) {
    throw std::invalid_argument("write_pulse_csv: one label per control required");
  }
  os << "t,dt";
  for (const auto& l : labels) os << ',' << l;
  os << '\n';
  const auto old_flags = os.flags();
  const auto old_prec = os.precision();
  os << std::setprecision(12);
  double t = 0.0;
  for (std::size_t k = 0; k < pulse.n_slices(); ++k) {
    os << t << ',' << pulse.width(k);
    for (std::size_t j = 0; j < pulse.n_controls(); ++j) os << ',' << pulse.amplitude(k, j);
    os << '\n';
    t += pulse.width(k);
  }
  os.flags(old_flags);
  os.precision(old_prec);
}

ControlPulse read_pulse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("read_pulse_csv: empty input");
  const auto n_cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (n_cols < 2) throw std::invalid_argument("read_pulse_csv: header needs t,dt columns");
  std::vector<double> widths;
  std::vector<std::vector<double>> amps;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != n_cols) throw std::invalid_argument("read_pulse_csv: ragged row");
    widths.push_back(row[1]);
    amps.emplace_back(row.begin() + 2, row.end());
  }
  return ControlPulse::from_segments(std::move(widths), amps);
}

}  // namespace qsl
