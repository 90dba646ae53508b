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

#include "qsl/targets.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace qsl {

namespace {

constexpr Complex kI{0.0, 1.0};

double wrap_angle(double a) {
  // (-pi, pi]
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

// exp(-i w H) for H = -(delta sx + eps sz)/2.
CMatrix segment_unitary(double delta, double eps, double w) {
  const double omega = std::hypot(delta, eps);
  if (omega == 0.0) return CMatrix::identity(2);
  const double c = std::cos(omega * w / 2.0);
  const double s = std::sin(omega * w / 2.0) / omega;
  const Complex i(0.0, 1.0);
  return CMatrix(2, {c + i * s * eps, i * s * delta, i * s * delta, c - i * s * eps});
}

// Vector part of target^dagger u after removing its global phase; zero iff
// u equals target up to phase.
std::array<double, 3> rotation_residual(const CMatrix& target, const CMatrix& u) {
  const CMatrix w = target.adjoint() * u;
  Complex tr = w.trace();
  const Complex phase = std::abs(tr) > 0.0 ? std::conj(tr) / std::abs(tr) : Complex(1.0);
  // w ~ a0 I - i a.sigma  =>  a_k = i Tr(sigma_k w) / 2.
  const Complex i(0.0, 1.0);
  const Complex tx = (w(0, 1) + w(1, 0)) * phase;
  const Complex ty = (i * w(0, 1) - i * w(1, 0)) * phase;
  const Complex tz = (w(0, 0) - w(1, 1)) * phase;
  return {(i * tx).real() / 2.0, (i * ty).real() / 2.0, (i * tz).real() / 2.0};
}

// The z segments at finite eps_bound rotate about a slightly tilted axis,
// leaving an error of order (delta / eps_bound)^2. Newton steps on the two
// z durations and the middle eps (middle duration held fixed) remove it.
// Keeps the input when the iteration does not improve it.
double refine_recipe(const CMatrix& target, double delta, double eps_bound, std::vector<double>& widths,
                     std::vector<std::vector<double>>& amps) {
  auto evaluate = [&](const std::array<double, 3>& p) {
    const CMatrix u = segment_unitary(delta, amps[2][0], p[1]) * segment_unitary(delta, p[2], widths[1]) *
                      segment_unitary(delta, amps[0][0], p[0]);
    return rotation_residual(target, u);
  };
  auto norm = [](const std::array<double, 3>& r) { return std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]); };

  std::array<double, 3> p{widths[0], widths[2], amps[1][0]};
  std::array<double, 3> r = evaluate(p);
  const double start = norm(r);
  double mu_rel = 1e-12;
  for (int iter = 0; iter < 60 && norm(r) > 1e-15; ++iter) {
    double jac[3][3];
    for (int k = 0; k < 3; ++k) {
      const double h = 1e-7 * std::max(1.0, std::abs(p[k]));
      auto pp = p, pm = p;
      pp[k] += h;
      pm[k] -= h;
      const auto rp = evaluate(pp), rm = evaluate(pm);
      for (int m = 0; m < 3; ++m) jac[m][k] = (rp[m] - rm[m]) / (2.0 * h);
    }
    // Levenberg-Marquardt on (J^T J + mu I) dp = -J^T r; the damping keeps
    // the step finite where the frame angles are nearly degenerate.
    double a[3][3], g[3];
    for (int m = 0; m < 3; ++m) {
      g[m] = 0.0;
      for (int l = 0; l < 3; ++l) {
        a[m][l] = 0.0;
        for (int q = 0; q < 3; ++q) a[m][l] += jac[q][m] * jac[q][l];
      }
      for (int q = 0; q < 3; ++q) g[m] -= jac[q][m] * r[q];
    }
    auto det3 = [](const double b[3][3]) {
      return b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
             b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    };
    const double scale = a[0][0] + a[1][1] + a[2][2];
    bool improved = false;
    for (; mu_rel < 1e6 && !improved; mu_rel *= 100.0) {
      double m3[3][3];
      for (int m = 0; m < 3; ++m)
        for (int l = 0; l < 3; ++l) m3[m][l] = a[m][l] + (m == l ? mu_rel * scale : 0.0);
      const double det = det3(m3);
      if (!(std::abs(det) > 0.0)) continue;
      std::array<double, 3> next = p;
      for (int k = 0; k < 3; ++k) {
        double b3[3][3];
        for (int m = 0; m < 3; ++m)
          for (int l = 0; l < 3; ++l) b3[m][l] = l == k ? g[m] : m3[m][l];
        next[k] += det3(b3) / det;
      }
      if (next[0] < 0.0 || next[1] < 0.0 || std::abs(next[2]) > eps_bound) continue;
      const auto rn = evaluate(next);
      if (norm(rn) < norm(r)) {
        p = next;
        r = rn;
        improved = true;
      }
    }
    if (!improved) break;
    mu_rel = std::max(1e-14, mu_rel / 1e4);
  }
  if (!(norm(r) < start)) return start;
  widths[0] = p[0];
  widths[2] = p[1];
  amps[1][0] = p[2];
  return norm(r);
}

}  // namespace

StandardGate parse_gate_name(std::string_view name) {
  const auto u = upper(name);
  if (u == "CNOT") return StandardGate::cnot;
  if (u == "CZ") return StandardGate::cz;
  if (u == "ISWAP") return StandardGate::iswap;
  if (u == "SQRT_SWAP" || u == "SQRTSWAP") return StandardGate::sqrt_swap;
  if (u == "TOFFOLI" || u == "CCNOT") return StandardGate::toffoli;
  throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
}

const char* to_string(StandardGate gate) {
  switch (gate) {
    case StandardGate::cnot: return "CNOT";
    case StandardGate::cz: return "CZ";
    case StandardGate::iswap: return "iSWAP";
    case StandardGate::sqrt_swap: return "SQRT_SWAP";
    case StandardGate::toffoli: return "TOFFOLI";
  }
  return "?";
}

TargetGate standard_gate(StandardGate gate) {
  const Complex h_plus{0.5, 0.5};
  const Complex h_minus{0.5, -0.5};
  switch (gate) {
    case StandardGate::cnot:
      return {"CNOT", CMatrix(4, {1, 0, 0, 0,  //
                                  0, 1, 0, 0,  //
                                  0, 0, 0, 1,  //
                                  0, 0, 1, 0}),
              2};
    case StandardGate::cz:
      return {"CZ", CMatrix(4, {1, 0, 0, 0,  //
                                0, 1, 0, 0,  //
                                0, 0, 1, 0,  //
                                0, 0, 0, -1}),
              2};
    case StandardGate::iswap:
      return {"iSWAP", CMatrix(4, {1, 0, 0, 0,   //
                                   0, 0, kI, 0,  //
                                   0, kI, 0, 0,  //
                                   0, 0, 0, 1}),
              2};
    case StandardGate::sqrt_swap:
      return {"SQRT_SWAP", CMatrix(4, {1, 0, 0, 0,              //
                                       0, h_plus, h_minus, 0,   //
                                       0, h_minus, h_plus, 0,   //
                                       0, 0, 0, 1}),
              2};
    case StandardGate::toffoli: {
      CMatrix m = CMatrix::identity(8);
      m(6, 6) = 0.0;
      m(7, 7) = 0.0;
      m(6, 7) = 1.0;
      m(7, 6) = 1.0;
      return {"TOFFOLI", m, 3};
    }
  }
  throw std::invalid_argument("unknown gate");
}

TargetGate standard_gate(std::string_view name) { return standard_gate(parse_gate_name(name)); }

double trace_fidelity(const CMatrix& target, const CMatrix& u) {
  if (target.dim() != u.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  Complex tr = 0.0;
  const std::size_t d = u.dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) tr += std::conj(target(i, j)) * u(i, j);
  return std::norm(tr) / static_cast<double>(d * d);
}

CMatrix rotation_unitary(const RotationSpec& spec) {
  const double nx = std::sin(spec.theta) * std::cos(spec.phi);
  const double ny = std::sin(spec.theta) * std::sin(spec.phi);
  const double nz = std::cos(spec.theta);
  const double c = std::cos(spec.beta / 2.0);
  const double s = std::sin(spec.beta / 2.0);
  // cos(b/2) I - i sin(b/2) n.sigma
  return CMatrix(2, {Complex(c, -s * nz), Complex(-s * ny, -s * nx),  //
                     Complex(s * ny, -s * nx), Complex(c, s * nz)});
}

ControlPulse single_qubit_recipe(const RotationSpec& spec, double delta, double eps_bound) {
  if (!(delta > 0.0)) throw std::invalid_argument("single_qubit_recipe: delta must be > 0");
  const double sin_t = std::sin(spec.theta);
  if (spec.theta < 0.0 || spec.theta > kPi) {
    throw std::invalid_argument("single_qubit_recipe: theta must lie in [0, pi]");
  }
  if (std::abs(sin_t) < 1e-12) {
    throw std::invalid_argument(
        "single_qubit_recipe: rotation axis along z; use a pure eps (z) pulse instead");
  }
  // beta in [-pi, pi); R_n(beta) and R_n(beta - 2 pi) differ by a global phase.
  double beta = wrap_angle(spec.beta);
  if (beta == kPi) beta = -kPi;
  if (std::abs(beta) < 1e-15) throw std::invalid_argument("single_qubit_recipe: beta = 0 needs no pulse");

  // With H = -(Delta sx + eps sz)/2 the evolution rotates about
  // m = (Delta, 0, eps)/|.| by a negative angle. For beta < 0 take m = n0 (the
  // axis in the xz plane); for beta > 0 take the mirror axis turned by pi.
  const double cot_t = std::cos(spec.theta) / sin_t;
  double eps_mid = delta * cot_t;
  double frame = spec.phi;
  if (beta > 0.0) {
    eps_mid = -eps_mid;
    frame += kPi;
  }
  if (std::abs(eps_mid) < 1e-14) eps_mid = 0.0;
  if (std::abs(eps_mid) > eps_bound) {
    throw std::invalid_argument("single_qubit_recipe: |Delta cot(theta)| exceeds eps_bound");
  }
  const double t_mid = std::abs(beta) * sin_t / delta;

  if (!(eps_bound > 0.0)) throw std::invalid_argument("single_qubit_recipe: eps_bound must be > 0");
  const CMatrix target = rotation_unitary(spec);
  std::vector<double> widths;
  std::vector<std::vector<double>> amps;
  double best_residual = std::numeric_limits<double>::infinity();
  // Frame turns go the short way first. Where the refinement cannot make
  // that exact (a nearly degenerate middle rotation) the long way round on
  // one or both sides is tried too, at the cost of a longer pulse.
  for (int variant = 0; variant < 4 && best_residual > 1e-12; ++variant) {
    std::vector<double> w;
    std::vector<std::vector<double>> a;
    // z rotation by psi at full strength: eps = -sign(psi) eps_bound.
    auto z_segment = [&](double psi, bool long_way) {
      psi = wrap_angle(psi);
      if (std::abs(psi) < 1e-12) return;
      if (long_way) psi -= std::copysign(2.0 * kPi, psi);
      w.push_back(std::abs(psi) / std::hypot(delta, eps_bound));
      a.push_back({psi > 0.0 ? -eps_bound : eps_bound});
    };
    z_segment(-frame, variant & 1);
    w.push_back(t_mid);
    a.push_back({eps_mid});
    z_segment(frame, variant & 2);
    if (w.size() != 3) {
      widths = std::move(w);
      amps = std::move(a);
      break;
    }
    const double residual = refine_recipe(target, delta, eps_bound, w, a);
    if (residual < 0.5 * best_residual) {
      best_residual = residual;
      widths = std::move(w);
      amps = std::move(a);
    }
  }
  return ControlPulse::from_segments(std::move(widths), amps);
}

CMatrix z_phase_layer(const std::vector<double>& phases) {
  const std::size_t n = phases.size();
  const std::size_t d = std::size_t{1} << n;
  CMatrix out(d);
  for (std::size_t b = 0; b < d; ++b) {
    double ph = 0.0;
    for (std::size_t q = 0; q < n; ++q)
      if ((b >> (n - 1 - q)) & 1U) ph += phases[q];
    out(b, b) = std::polar(1.0, ph);
  }
  return out;
}

CMatrix to_x_eigenbasis(const CMatrix& u) {
  const double r = 1.0 / std::sqrt(2.0);
  const CMatrix h1(2, {r, r, r, -r});
  CMatrix h = h1;
  for (std::size_t d = 2; d < u.dim(); d *= 2) h = kron(h, h1);
  return h * u * h;
}

LocalCorrection fidelity_local_z_corrected(const CMatrix& u, const TargetGate& target) {
  if (u.dim() != target.matrix.dim()) {
    throw std::invalid_argument("fidelity_local_z_corrected: dimension mismatch");
  }
  const std::size_t d = u.dim();
  std::size_t n = 0;
  while ((std::size_t{1} << n) < d) ++n;
  if ((std::size_t{1} << n) != d) {
    throw std::invalid_argument("fidelity_local_z_corrected: dimension is not a power of two");
  }

  // Tr(V^dag Z u) = sum_b z_b w_b with w_b = (u V^dag)_bb.
  std::vector<Complex> w(d);
  for (std::size_t b = 0; b < d; ++b) {
    Complex s = 0.0;
    for (std::size_t c = 0; c < d; ++c) s += u(b, c) * std::conj(target.matrix(b, c));
    w[b] = s;
  }
  auto overlap = [&](const std::vector<double>& ph) {
    Complex s = 0.0;
    for (std::size_t b = 0; b < d; ++b) {
      double a = 0.0;
      for (std::size_t q = 0; q < n; ++q)
        if ((b >> (n - 1 - q)) & 1U) a += ph[q];
      s += std::polar(1.0, a) * w[b];
    }
    return s;
  };

  auto ascend = [&](std::vector<double> ph) {
    for (int iter = 0; iter < 10000; ++iter) {
      double max_change = 0.0;
      for (std::size_t q = 0; q < n; ++q) {
        Complex a0 = 0.0, a1 = 0.0;
        for (std::size_t b = 0; b < d; ++b) {
          double a = 0.0;
          for (std::size_t r = 0; r < n; ++r)
            if (r != q && ((b >> (n - 1 - r)) & 1U)) a += ph[r];
          const Complex term = std::polar(1.0, a) * w[b];
          if ((b >> (n - 1 - q)) & 1U) {
            a1 += term;
          } else {
            a0 += term;
          }
        }
        if (std::abs(a0) == 0.0 || std::abs(a1) == 0.0) continue;
        const double next = wrap_angle(std::arg(a0) - std::arg(a1));
        max_change = std::max(max_change, std::abs(wrap_angle(next - ph[q])));
        ph[q] = next;
      }
      if (max_change < 1e-10) break;
    }
    return ph;
  };

  LocalCorrection best{trace_fidelity(target.matrix, u), std::vector<double>(n, 0.0)};
  // Starts on the quarter-turn grid; 4^n points, n <= 3 in practice.
  const std::size_t n_starts = n <= 4 ? (std::size_t{1} << (2 * n)) : 1;
  for (std::size_t s = 0; s < n_starts; ++s) {
    std::vector<double> ph(n);
    for (std::size_t q = 0; q < n; ++q) ph[q] = static_cast<double>((s >> (2 * q)) & 3U) * kPi / 2.0;
    ph = ascend(std::move(ph));
    const double f = std::norm(overlap(ph)) / static_cast<double>(d * d);
    if (f > best.fidelity + 1e-15) {
      best.fidelity = f;
      for (auto& p : ph) p = wrap_angle(p);
      best.phases = ph;
    }
  }
  return best;
}

namespace {

// argmax over unitary U of |Tr(x U)|, from the SVD x = W S V^dag: U = V W^dag.
CMatrix best_unitary_for(const CMatrix& x) {
  const auto eig = eig_hermitian(x.adjoint() * x);
  // Columns of eig.vectors are right singular vectors; largest value last.
  CMatrix v = eig.vectors;
  CMatrix w(2);
  const double s_hi = std::sqrt(std::max(eig.values[1], 0.0));
  const double s_lo = std::sqrt(std::max(eig.values[0], 0.0));
  if (s_hi < 1e-300) return CMatrix::identity(2);
  std::vector<Complex> v_hi{v(0, 1), v(1, 1)};
  auto u_hi = x.apply(v_hi);
  for (auto& z : u_hi) z /= s_hi;
  std::vector<Complex> u_lo;
  if (s_lo > 1e-12 * s_hi) {
    u_lo = x.apply(std::vector<Complex>{v(0, 0), v(1, 0)});
    for (auto& z : u_lo) z /= s_lo;
  } else {
    u_lo = {-std::conj(u_hi[1]), std::conj(u_hi[0])};
  }
  w(0, 0) = u_lo[0];
  w(1, 0) = u_lo[1];
  w(0, 1) = u_hi[0];
  w(1, 1) = u_hi[1];
  return v * w.adjoint();
}

CMatrix random_su2(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double a = g(rng), b = g(rng), c = g(rng), d = g(rng);
  const double n = std::sqrt(a * a + b * b + c * c + d * d);
  a /= n, b /= n, c /= n, d /= n;
  return CMatrix(2, {Complex(a, b), Complex(c, d), Complex(-c, d), Complex(a, -b)});
}

}  // namespace

double local_fidelity_bound(const TargetGate& target) {
  const CMatrix& v = target.matrix;
  const std::size_t d = v.dim();
  std::size_t n = 0;
  while ((std::size_t{1} << n) < d) ++n;
  if ((std::size_t{1} << n) != d) {
    throw std::invalid_argument("local_fidelity_bound: dimension is not a power of two");
  }
  auto bit = [n](std::size_t idx, std::size_t q) { return (idx >> (n - 1 - q)) & 1U; };

  auto overlap = [&](const std::vector<CMatrix>& us) {
    Complex s = 0.0;
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        Complex p = std::conj(v(r, c));
        for (std::size_t q = 0; q < n && p != Complex{}; ++q) p *= us[q](bit(r, q), bit(c, q));
        s += p;
      }
    return std::norm(s) / static_cast<double>(d * d);
  };

  std::mt19937_64 rng(0x5eed);
  double best = 0.0;
  constexpr int kStarts = 16;
  for (int start = 0; start < kStarts; ++start) {
    std::vector<CMatrix> us(n, CMatrix::identity(2));
    if (start > 0)
      for (auto& u : us) u = random_su2(rng);
    double f = overlap(us);
    for (int sweep = 0; sweep < 500; ++sweep) {
      for (std::size_t i = 0; i < n; ++i) {
        // Tr(V^dag P) = Tr(X U_i) with X_ba = sum conj(V_rc) prod_{q != i} U_q(r_q, c_q).
        CMatrix x(2);
        for (std::size_t r = 0; r < d; ++r)
          for (std::size_t c = 0; c < d; ++c) {
            Complex p = std::conj(v(r, c));
            for (std::size_t q = 0; q < n && p != Complex{}; ++q)
              if (q != i) p *= us[q](bit(r, q), bit(c, q));
            x(bit(c, i), bit(r, i)) += p;
          }
        us[i] = best_unitary_for(x);
      }
      const double next = overlap(us);
      const bool done = next - f < 1e-14;
      f = std::max(f, next);
      if (done) break;
    }
    best = std::max(best, f);
  }
  return std::min(best, 1.0);
}

nlohmann::json gate_to_json(const TargetGate& gate) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < gate.matrix.dim(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < gate.matrix.dim(); ++j)
      row.push_back({gate.matrix(i, j).real(), gate.matrix(i, j).imag()});
    rows.push_back(row);
  }
  return {{"label", gate.label}, {"n_qubits", gate.n_qubits}, {"matrix", rows}};
}

}  // namespace qsl
