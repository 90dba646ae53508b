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

#include <doctest.h>

#include "helpers.hpp"
#include "qsl/linalg.hpp"

using namespace qsl;
using qsl::test::random_hermitian;
using qsl::test::random_matrix;

namespace {

const Complex I(0.0, 1.0);

CMatrix diag(std::initializer_list<double> d) {
  std::vector<double> v(d);
  return CMatrix::diagonal(std::span<const double>(v));
}

}  // namespace

TEST_CASE("kron of identities and Paulis") {
  CHECK(kron(CMatrix::identity(2), CMatrix::identity(2)) == CMatrix::identity(4));
  const auto z = pauli(PauliAxis::z);
  CHECK(kron(z, z) == diag({1, -1, -1, 1}));

  // sigma_x on qubit 1 maps |00> to |10>.
  const auto x1 = kron(pauli(PauliAxis::x), CMatrix::identity(2));
  const std::vector<Complex> ket00{1, 0, 0, 0};
  const auto out = x1.apply(ket00);
  CHECK(out == std::vector<Complex>{0, 0, 1, 0});
}

TEST_CASE("kron is associative") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 5; ++i) {
    const auto a = random_matrix(2, rng), b = random_matrix(2, rng), c = random_matrix(2, rng);
    CHECK(frobenius_distance(kron(kron(a, b), c), kron(a, kron(b, c))) <= 1e-13);
  }
}

TEST_CASE("pauli_embed places the operator on the right factor") {
  CHECK(pauli_embed(PauliAxis::z, 1, 1) == pauli(PauliAxis::z));
  CHECK(pauli_embed(PauliAxis::x, 2, 2) == kron(CMatrix::identity(2), pauli(PauliAxis::x)));
  CHECK(pauli_embed(PauliAxis::z, 2, 3) == diag({1, 1, -1, -1, 1, 1, -1, -1}));
  CHECK_THROWS_AS(pauli_embed(PauliAxis::x, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(pauli_embed(PauliAxis::x, 3, 2), std::invalid_argument);
}

TEST_CASE("expm_hermitian closed forms") {
  const auto u = expm_hermitian(pauli(PauliAxis::z), kPi / 2);
  CHECK(frobenius_distance(u, CMatrix(2, {-I, 0, 0, I})) <= 1e-15);

  std::mt19937_64 rng(2);
  const auto h = random_hermitian(4, rng);
  CHECK(frobenius_distance(expm_hermitian(h, 0.0), CMatrix::identity(4)) <= 1e-14);

  const auto minus_one = expm_hermitian(pauli(PauliAxis::x), kPi);
  CHECK(frobenius_distance(minus_one, CMatrix::identity(2) * Complex(-1.0)) <= 1e-14);
}

TEST_CASE("expm_hermitian is unitary and a one-parameter group") {
  std::mt19937_64 rng(3);
  for (std::size_t d : {2u, 4u, 8u}) {
    for (int i = 0; i < 5; ++i) {
      const auto h = random_hermitian(d, rng);
      const auto u = expm_hermitian(h, 0.7);
      CHECK(frobenius_distance(u.adjoint() * u, CMatrix::identity(d)) <= 1e-10);
      CHECK(u.is_unitary(1e-10));
      const auto prod = expm_hermitian(h, 0.3) * expm_hermitian(h, 1.1);
      CHECK(frobenius_distance(prod, expm_hermitian(h, 1.4)) <= 1e-10);
    }
  }
}

TEST_CASE("eig_hermitian examples") {
  const auto ez = eig_hermitian(pauli(PauliAxis::z));
  CHECK(ez.values[0] == doctest::Approx(-1.0));
  CHECK(ez.values[1] == doctest::Approx(1.0));

  const auto ex = eig_hermitian(pauli(PauliAxis::x));
  CHECK(ex.values[0] == doctest::Approx(-1.0));
  CHECK(ex.values[1] == doctest::Approx(1.0));
  // Ground state (|0> - |1>)/sqrt 2 up to phase.
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::conj(ex.vectors(0, 0)) * r - std::conj(ex.vectors(1, 0)) * r) == doctest::Approx(1.0));

  const auto zz = pauli_embed(PauliAxis::z, 1, 2) * pauli_embed(PauliAxis::z, 2, 2) * Complex(0.02);
  const auto e = eig_hermitian(zz);
  REQUIRE(e.values.size() == 4);
  CHECK(e.values[0] == doctest::Approx(-0.02));
  CHECK(e.values[1] == doctest::Approx(-0.02));
  CHECK(e.values[2] == doctest::Approx(0.02));
  CHECK(e.values[3] == doctest::Approx(0.02));
}

TEST_CASE("eig_hermitian reconstructs random matrices") {
  std::mt19937_64 rng(4);
  for (std::size_t d = 1; d <= 8; ++d) {
    for (int i = 0; i < 4; ++i) {
      const auto h = random_hermitian(d, rng);
      const auto e = eig_hermitian(h);
      std::vector<Complex> lam(e.values.begin(), e.values.end());
      const auto rec = e.vectors * CMatrix::diagonal(std::span<const Complex>(lam)) * e.vectors.adjoint();
      CHECK(frobenius_distance(rec, h) <= 1e-9);
      CHECK(e.vectors.is_unitary(1e-10));
      for (std::size_t k = 1; k < d; ++k) CHECK(e.values[k - 1] <= e.values[k]);
    }
  }
}

TEST_CASE("eig_hermitian handles degenerate spectra") {
  const auto h = pauli_embed(PauliAxis::x, 1, 3) + pauli_embed(PauliAxis::x, 2, 3) + pauli_embed(PauliAxis::x, 3, 3);
  const auto e = eig_hermitian(h);
  std::vector<Complex> lam(e.values.begin(), e.values.end());
  const auto rec = e.vectors * CMatrix::diagonal(std::span<const Complex>(lam)) * e.vectors.adjoint();
  CHECK(frobenius_distance(rec, h) <= 1e-12);
  CHECK(e.values.front() == doctest::Approx(-3.0));
  CHECK(e.values.back() == doctest::Approx(3.0));
}

TEST_CASE("hermitian and unitary predicates") {
  CHECK(pauli(PauliAxis::y).is_hermitian(0.0));
  CHECK(pauli(PauliAxis::y).is_unitary(1e-15));
  const CMatrix a(2, {1, I, I, 1});
  CHECK_FALSE(a.is_hermitian(1e-12));
  CHECK_FALSE(CMatrix(2, {1, 1, 0, 1}).is_unitary(1e-6));
  CHECK_THROWS_AS(expm_hermitian(a, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(eig_hermitian(a), std::invalid_argument);
}

TEST_CASE("spectral norm and basic algebra") {
  CHECK(spectral_norm_hermitian(diag({-3, 1, 2})) == doctest::Approx(3.0));
  const auto x = pauli(PauliAxis::x), y = pauli(PauliAxis::y), z = pauli(PauliAxis::z);
  CHECK(frobenius_distance(x * y, z * I) <= 1e-15);
  CHECK((x * x) == CMatrix::identity(2));
  CHECK(z.trace() == Complex(0.0));
  CHECK(CMatrix::identity(3).frobenius_norm() == doctest::Approx(std::sqrt(3.0)));
  CHECK_THROWS_AS(CMatrix(2, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(x * CMatrix::identity(4), std::invalid_argument);

  CMatrix out;
  multiply_into(x, z, out);
  CHECK(out == x * z);
  CMatrix acc = x;
  add_scaled(acc, z, 2.0);
  CHECK(acc == x + z * Complex(2.0));
}
