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

// Shared helpers for the unit tests.

#pragma once

#include <random>

#include "qsl/linalg.hpp"

namespace qsl::test {

inline CMatrix random_matrix(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(d);
  for (auto& z : m.data()) z = Complex(g(rng), g(rng));
  return m;
}

inline CMatrix random_hermitian(std::size_t d, std::mt19937_64& rng) {
  const CMatrix a = random_matrix(d, rng);
  return (a + a.adjoint()) * Complex(0.5);
}

inline CMatrix random_unitary(std::size_t d, std::mt19937_64& rng) {
  return expm_hermitian(random_hermitian(d, rng), 1.0);
}

/// Frobenius distance after removing the best global phase.
inline double phase_distance(const CMatrix& a, const CMatrix& b) {
  const Complex ov = (a.adjoint() * b).trace();
  const Complex phase = std::abs(ov) > 0.0 ? ov / std::abs(ov) : Complex(1.0);
  return frobenius_distance(a * phase, b);
}

}  // namespace qsl::test
