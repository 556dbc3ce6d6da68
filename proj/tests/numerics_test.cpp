// Copyright 2026 the otafl authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "otafl/numerics.hpp"

using namespace otafl;

namespace {

// Gram-Schmidt orthonormal basis from a seeded random matrix; used to build
// matrices with a known spectrum, independent of the library eigensolvers.
Matrix random_orthogonal(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) q[i][j] = rng.gauss();
    for (int k = 0; k < i; ++k) {
      const double proj = dot(q[i], q[k]);
      for (int j = 0; j < n; ++j) q[i][j] -= proj * q[k][j];
    }
    const double nrm = norm2(q[i]);
    for (int j = 0; j < n; ++j) q[i][j] /= nrm;
  }
  Matrix Q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Q(i, j) = q[i][j];
  return Q;
}

Matrix with_spectrum(const std::vector<double>& eig, std::uint64_t seed) {
  const int n = static_cast<int>(eig.size());
  const Matrix Q = random_orthogonal(n, seed);
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += Q(k, i) * eig[k] * Q(k, j);
      A(i, j) = s;
    }
  // Symmetrize away the last bits of rounding.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double m = 0.5 * (A(i, j) + A(j, i));
      A(i, j) = m;
      A(j, i) = m;
    }
  return A;
}

}  // namespace

TEST_CASE("rng is deterministic and uniform stays in [0,1)") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("gauss moments match a standard normal") {
  Rng rng(7);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.gauss();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("gauss scales mean and std") {
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) {
    const double z = a.gauss();
    CHECK(b.gauss(3.0, 2.0) == doctest::Approx(3.0 + 2.0 * z).epsilon(1e-15));
  }
}

TEST_CASE("cgauss has unit total variance and zero mean") {
  Rng rng(11);
  const int n = 100000;
  double re = 0.0, im = 0.0, pw = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto z = rng.cgauss();
    re += z.real();
    im += z.imag();
    pw += std::norm(z);
  }
  CHECK(std::abs(re / n) < 0.01);
  CHECK(std::abs(im / n) < 0.01);
  CHECK(pw / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("mix_seed separates streams") {
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
  CHECK(mix_seed(123, 45) == mix_seed(123, 45));
  Rng a(mix_seed(5, 0)), b(mix_seed(5, 1));
  int same = 0;
  for (int i = 0; i < 64; ++i) same += a.uniform() == b.uniform();
  CHECK(same == 0);
}

TEST_CASE("bisect finds the root of a monotone function") {
  const double root = bisect([](double x) { return std::cos(x); }, {0.0, 2.0});
  CHECK(root == doctest::Approx(M_PI / 2).epsilon(1e-10));
}

TEST_CASE("bisect rejects a bracket without sign change") {
  CHECK_THROWS_AS(bisect([](double x) { return x * x + 1.0; }, {0.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("c_function values and monotonicity") {
  CHECK(c_function(0.0) == 0.0);
  CHECK(c_function(1.0) == doctest::Approx(std::sqrt(M_PI) * std::exp(1.0)).epsilon(1e-15));
  double prev = 0.0;
  for (double x = 0.1; x < 5.0; x += 0.1) {
    const double y = c_function(x);
    CHECK(y > prev);
    prev = y;
  }
  CHECK_THROWS_AS(c_function(-1.0), std::domain_error);
  CHECK_THROWS_AS(c_function(30.0), std::overflow_error);
}

TEST_CASE("c_inverse round-trips c_function") {
  for (double x : {0.01, 0.1, 0.5, 1.0, 1.8488, 3.0, 7.5, 15.0}) {
    const double y = c_function(x);
    CHECK(c_inverse(y) == doctest::Approx(x).epsilon(1e-9));
  }
  // The value used by the privacy accountant at delta = 0.01.
  CHECK(c_inverse(100.0) == doctest::Approx(1.8488).epsilon(1e-3));
  CHECK_THROWS_AS(c_inverse(0.0), std::domain_error);
}

TEST_CASE("extreme eigenvalues on a known spectrum (Jacobi path)") {
  const std::vector<double> eig{0.3, 1.0, 2.5, 4.0, 4.0, 9.7, 12.0, 0.9, 3.3, 6.6};
  const Matrix A = with_spectrum(eig, 31);
  const auto [lo, hi] = extreme_eigenvalues(A);
  CHECK(lo == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(hi == doctest::Approx(12.0).epsilon(1e-10));
}

TEST_CASE("extreme eigenvalues on a known spectrum (power-iteration path)") {
  std::vector<double> eig(80);
  for (int i = 0; i < 80; ++i) eig[i] = 0.5 + 0.25 * i;
  eig[17] = 31.0;  // well-separated extremes
  eig[53] = 0.05;
  const Matrix A = with_spectrum(eig, 77);
  const auto [lo, hi] = extreme_eigenvalues(A);
  CHECK(hi == doctest::Approx(31.0).epsilon(1e-8));
  CHECK(lo == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("extreme eigenvalues rejects asymmetric input") {
  Matrix A(2, 2);
  A(0, 1) = 1.0;
  CHECK_THROWS_AS(extreme_eigenvalues(A), std::invalid_argument);
}

TEST_CASE("solve_linear_spd solves a random SPD system") {
  const int n = 12;
  Rng rng(3);
  Matrix B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = rng.gauss();
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = i == j ? 0.5 : 0.0;  // shift keeps it PD
      for (int k = 0; k < n; ++k) s += B(k, i) * B(k, j);
      A(i, j) = s;
    }
  std::vector<double> b(n);
  for (double& x : b) x = rng.gauss();
  const std::vector<double> x = solve_linear_spd(A, b);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += A(i, j) * x[j];
    CHECK(s == doctest::Approx(b[i]).epsilon(1e-9));
  }
}

TEST_CASE("solve_linear_spd rejects an indefinite matrix") {
  Matrix A(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = -1.0;
  std::vector<double> b{1.0, 1.0};
  CHECK_THROWS_AS(solve_linear_spd(A, b), std::runtime_error);
}

TEST_CASE("project_ball clips only outside the radius") {
  const std::vector<double> inside{0.3, -0.4};
  CHECK(project_ball(inside, 1.0) == inside);
  const std::vector<double> outside{3.0, 4.0};
  const auto p = project_ball(outside, 1.0);
  CHECK(norm2(p) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p[0] / p[1] == doctest::Approx(3.0 / 4.0).epsilon(1e-15));
}
