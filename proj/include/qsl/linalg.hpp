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

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace qsl {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Thrown when an eigen-iteration does not reach its off-diagonal target.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Dense square complex matrix, row-major.
 *
 * Sized for the few-qubit operators used throughout (dim 2..8) but works for
 * any dimension; the spin-chain effective models go up to a few hundred.
 */
class CMatrix {
 public:
  CMatrix() = default;
  /// Zero matrix of the given dimension.
  explicit CMatrix(std::size_t dim);
  /// Row-major initializer; size must be dim*dim.
  CMatrix(std::size_t dim, std::initializer_list<Complex> row_major);

  static CMatrix identity(std::size_t dim);
  static CMatrix diagonal(std::span<const Complex> diag);
  static CMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const { return dim_; }

  Complex& operator()(std::size_t row, std::size_t col) {
    return data_[row * dim_ + col];
  }
  const Complex& operator()(std::size_t row, std::size_t col) const {
    return data_[row * dim_ + col];
  }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  CMatrix adjoint() const;
  Complex trace() const;
  double frobenius_norm() const;

  bool is_hermitian(double tol) const;
  /// Frobenius norm of U^dagger U - I within tol.
  bool is_unitary(double tol) const;

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(Complex scalar);

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
  friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);

  /// Matrix-vector product.
  std::vector<Complex> apply(std::span<const Complex> v) const;

  bool operator==(const CMatrix&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

/// out = a * b without allocating when out already has the right size.
void multiply_into(const CMatrix& a, const CMatrix& b, CMatrix& out);

/// Adds scale * b into a.
void add_scaled(CMatrix& a, const CMatrix& b, double scale);

/// Kronecker product; qubit 1 is the leftmost tensor factor.
CMatrix kron(const CMatrix& a, const CMatrix& b);

double frobenius_distance(const CMatrix& a, const CMatrix& b);

enum class PauliAxis { x, y, z };

CMatrix pauli(PauliAxis axis);

/// sigma_axis acting on qubit `qubit_index` (1-based) of an n-qubit register.
CMatrix pauli_embed(PauliAxis axis, int qubit_index, int n_qubits);

struct HermitianEigen {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // columns are eigenvectors
};

/// Cyclic complex Jacobi. Throws std::invalid_argument when h is not
/// Hermitian and ConvergenceError past the sweep cap.
HermitianEigen eig_hermitian(const CMatrix& h);

/// exp(-i * diag(values) * t) conjugated back by the eigenvectors.
CMatrix expm_from_eigen(const HermitianEigen& eig, double t);

/// exp(-i h t) through the eigendecomposition of h.
CMatrix expm_hermitian(const CMatrix& h, double t);

/// Largest |eigenvalue| of a Hermitian matrix.
double spectral_norm_hermitian(const CMatrix& h);

inline constexpr double kHermitianTol = 1e-10;

}  // namespace qsl
