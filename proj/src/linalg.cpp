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

#include "qsl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qsl {

CMatrix::CMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

CMatrix::CMatrix(std::size_t dim, std::initializer_list<Complex> row_major)
    : dim_(dim), data_(row_major) {
  if (data_.size() != dim * dim) {
    throw std::invalid_argument("CMatrix: initializer has " +
                                std::to_string(data_.size()) +
                                " entries, expected " +
                                std::to_string(dim * dim));
  }
}

CMatrix CMatrix::identity(std::size_t dim) {
  CMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> diag) {
  CMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMatrix CMatrix::diagonal(std::span<const double> diag) {
  CMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

Complex CMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

bool CMatrix::is_hermitian(double tol) const {
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j)
      if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
  return true;
}

bool CMatrix::is_unitary(double tol) const {
  CMatrix g = adjoint() * (*this);
  return frobenius_distance(g, identity(dim_)) <= tol;
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  if (other.dim_ != dim_) throw std::invalid_argument("CMatrix +=: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  if (other.dim_ != dim_) throw std::invalid_argument("CMatrix -=: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex scalar) {
  for (auto& z : data_) z *= scalar;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.dim());
  multiply_into(a, b, out);
  return out;
}

void multiply_into(const CMatrix& a, const CMatrix& b, CMatrix& out) {
  const std::size_t n = a.dim();
  if (b.dim() != n) throw std::invalid_argument("CMatrix *: dimension mismatch");
  if (out.dim() != n) out = CMatrix(n);
  const Complex* pa = a.data().data();
  const Complex* pb = b.data().data();
  Complex* po = out.data().data();
  std::fill(po, po + n * n, Complex{});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = pa[i * n + k];
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) po[i * n + j] += aik * pb[k * n + j];
    }
  }
}

void add_scaled(CMatrix& a, const CMatrix& b, double scale) {
  if (a.dim() != b.dim()) throw std::invalid_argument("add_scaled: dimension mismatch");
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) da[i] += scale * db[i];
}

std::vector<Complex> CMatrix::apply(std::span<const Complex> v) const {
  if (v.size() != dim_) throw std::invalid_argument("CMatrix::apply: dimension mismatch");
  std::vector<Complex> out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    Complex s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += (*this)(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  CMatrix out(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l) out(i * nb + k, j * nb + l) = aij * b(k, l);
    }
  return out;
}

double frobenius_distance(const CMatrix& a, const CMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("frobenius_distance: dimension mismatch");
  double s = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) s += std::norm(da[i] - db[i]);
  return std::sqrt(s);
}

CMatrix pauli(PauliAxis axis) {
  const Complex i{0.0, 1.0};
  switch (axis) {
    case PauliAxis::x:
      return CMatrix(2, {0.0, 1.0, 1.0, 0.0});
    case PauliAxis::y:
      return CMatrix(2, {0.0, -i, i, 0.0});
    case PauliAxis::z:
      return CMatrix(2, {1.0, 0.0, 0.0, -1.0});
  }
  throw std::invalid_argument("pauli: unknown axis");
}

CMatrix pauli_embed(PauliAxis axis, int qubit_index, int n_qubits) {
  if (n_qubits < 1 || qubit_index < 1 || qubit_index > n_qubits) {
    throw std::invalid_argument("pauli_embed: qubit index " + std::to_string(qubit_index) +
                                " out of range for " + std::to_string(n_qubits) + " qubits");
  }
  CMatrix out = qubit_index == 1 ? pauli(axis) : CMatrix::identity(2);
  for (int q = 2; q <= n_qubits; ++q)
    out = kron(out, q == qubit_index ? pauli(axis) : CMatrix::identity(2));
  return out;
}

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalTarget = 1e-12;

double off_diagonal_norm(const CMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// One complex Jacobi rotation zeroing a(p, q). The rotation is the real
// symmetric one composed with a phase on column q that makes a(p, q) real.
void rotate(CMatrix& a, CMatrix& v, std::size_t p, std::size_t q) {
  const std::size_t n = a.dim();
  const Complex apq = a(p, q);
  const double r = std::abs(apq);
  if (r == 0.0) return;
  const Complex phase = apq / r;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * r);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const Complex gpp = c;
  const Complex gpq = s;
  const Complex gqp = -s * std::conj(phase);
  const Complex gqq = c * std::conj(phase);

  for (std::size_t k = 0; k < n; ++k) {
    const Complex akp = a(k, p), akq = a(k, q);
    a(k, p) = akp * gpp + akq * gqp;
    a(k, q) = akp * gpq + akq * gqq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Complex apk = a(p, k), aqk = a(q, k);
    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (std::size_t k = 0; k < n; ++k) {
    const Complex vkp = v(k, p), vkq = v(k, q);
    v(k, p) = vkp * gpp + vkq * gqp;
    v(k, q) = vkp * gpq + vkq * gqq;
  }
}

}  // namespace

HermitianEigen eig_hermitian(const CMatrix& h) {
  if (!h.is_hermitian(kHermitianTol)) {
    throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");
  }
  const std::size_t n = h.dim();
  CMatrix a = h;
  CMatrix v = CMatrix::identity(n);
  const double target = kOffDiagonalTarget * std::max(1.0, h.frobenius_norm());

  // Sweep until the target is met, then once more: convergence is quadratic,
  // so the final sweep takes the residual down to rounding level.
  bool polishing = false;
  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off == 0.0 || (polishing && off <= target)) {
      converged = true;
      break;
    }
    if (off <= target) polishing = true;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
  }
  if (!converged) {
    if (off_diagonal_norm(a) > target) {
      throw ConvergenceError("eig_hermitian: exceeded " + std::to_string(kMaxSweeps) +
                             " Jacobi sweeps");
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });
  HermitianEigen out{std::vector<double>(n), CMatrix(n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

CMatrix expm_from_eigen(const HermitianEigen& eig, double t) {
  const std::size_t n = eig.values.size();
  std::vector<Complex> phases(n);
  for (std::size_t k = 0; k < n; ++k) phases[k] = std::polar(1.0, -eig.values[k] * t);
  CMatrix out(n);
  const CMatrix& q = eig.vectors;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += q(i, k) * phases[k] * std::conj(q(j, k));
      out(i, j) = s;
    }
  return out;
}

CMatrix expm_hermitian(const CMatrix& h, double t) {
  if (t == 0.0) {
    if (!h.is_hermitian(kHermitianTol)) {
      throw std::invalid_argument("expm_hermitian: matrix is not Hermitian");
    }
    return CMatrix::identity(h.dim());
  }
  return expm_from_eigen(eig_hermitian(h), t);
}

double spectral_norm_hermitian(const CMatrix& h) {
  const auto eig = eig_hermitian(h);
  double m = 0.0;
  for (double x : eig.values) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace qsl
