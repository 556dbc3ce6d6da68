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

#ifndef OTAFL_NUMERICS_HPP
#define OTAFL_NUMERICS_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace otafl {

// Deterministic random stream.  mt19937_64 has a fully specified sequence and
// the Gaussian path below is Box-Muller, so identical seeds give identical
// samples on every platform.  Value-like: copy freely, no shared state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double gauss(double mean = 0.0, double std = 1.0);

  // Fills out with i.i.d. N(mean, std^2) entries.
  void gauss_vec(std::span<double> out, double mean = 0.0, double std = 1.0);

  // Circularly symmetric complex Gaussian CN(0, 1).
  std::complex<double> cgauss();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64-style hash for deriving independent per-job seeds from a master
// seed without correlated low bits.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

struct RootBracket {
  double lo;
  double hi;
  double tol = 1e-12;   // absolute, on interval width or |f|
  int max_iter = 200;
};

// Monotone bisection.  Requires a sign change on [lo, hi].
double bisect(const std::function<double(double)>& f, const RootBracket& bracket);

// C(x) = sqrt(pi) * x * exp(x^2), strictly increasing on x >= 0.
double c_function(double x);

// Inverse of c_function on x >= 0, by bracketing + bisection.
double c_inverse(double y);

// Small dense row-major matrix.  Only what the solvers below need.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

// Smallest and largest eigenvalue of a symmetric PSD matrix.  Cyclic Jacobi
// sweeps up to dim 64, power iteration plus shifted power iteration above.
std::pair<double, double> extreme_eigenvalues(const Matrix& A);

// Solves A x = b for symmetric positive definite A via Cholesky.
std::vector<double> solve_linear_spd(const Matrix& A, std::span<const double> b);

// Euclidean projection onto the ball of radius W.
std::vector<double> project_ball(std::span<const double> w, double W);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace otafl

#endif  // OTAFL_NUMERICS_HPP
