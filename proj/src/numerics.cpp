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

#include "otafl/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace otafl {

double Rng::gauss(double mean, double std) {
  if (std < 0.0) throw std::invalid_argument("gauss: negative std");
  if (std == 0.0) return mean;
  if (has_spare_) {
    has_spare_ = false;
    return mean + std * spare_;
  }
  // Box-Muller; u1 in (0,1] avoids log(0).
  const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return mean + std * (r * std::cos(theta));
}

void Rng::gauss_vec(std::span<double> out, double mean, double std) {
  for (double& x : out) x = gauss(mean, std);
}

std::complex<double> Rng::cgauss() {
  const double s = std::sqrt(0.5);
  const double re = gauss(0.0, s);
  const double im = gauss(0.0, s);
  return {re, im};
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double bisect(const std::function<double(double)>& f, const RootBracket& bracket) {
  double lo = bracket.lo;
  double hi = bracket.hi;
  if (!(lo < hi)) throw std::invalid_argument("bisect: lo must be < hi");
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::invalid_argument("bisect: no sign change on bracket");
  }
  for (int it = 0; it < bracket.max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (std::abs(fmid) <= bracket.tol || (hi - lo) <= bracket.tol) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  if ((hi - lo) <= bracket.tol) return 0.5 * (lo + hi);
  throw std::runtime_error("bisect: max_iter exceeded");
}

double c_function(double x) {
  if (x < 0.0) throw std::domain_error("c_function: negative argument");
  if (x * x > 700.0) throw std::overflow_error("c_function: argument too large");
  return std::sqrt(M_PI) * x * std::exp(x * x);
}

double c_inverse(double y) {
  if (!(y > 0.0)) throw std::domain_error("c_inverse: argument must be positive");
  double hi = 1.0;
  while (c_function(hi) < y) hi *= 2.0;  // x* < 26.5 for any finite y
  double lo = 0.0;
  // Bisect until relative width 1e-12.
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * std::max(1.0, lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (c_function(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

void check_symmetric(const Matrix& A) {
  const int n = A.rows();
  if (n != A.cols()) throw std::invalid_argument("matrix must be square");
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(A(i, j)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(A(i, j) - A(j, i)) > 1e-12 * std::max(1.0, scale))
        throw std::invalid_argument("matrix is not symmetric");
}

// Full-spectrum cyclic Jacobi; destroys the working copy.
std::vector<double> jacobi_eigenvalues(Matrix A) {
  const int n = A.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    double diag = 0.0;
    for (int i = 0; i < n; ++i) {
      diag += A(i, i) * A(i, i);
      for (int j = i + 1; j < n; ++j) off += A(i, j) * A(i, j);
    }
    if (off <= 1e-30 * std::max(1.0, diag)) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = A(i, p);
          const double aiq = A(i, q);
          A(i, p) = c * aip - s * aiq;
          A(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = A(p, i);
          const double aqi = A(q, i);
          A(p, i) = c * api - s * aqi;
          A(q, i) = s * api + c * aqi;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = A(i, i);
  return eig;
}

// Largest eigenvalue of symmetric PSD A by power iteration with a fixed-seed
// start vector.  shift > 0 runs on (shift*I - A) and reports shift - lambda.
double power_iteration_max(const Matrix& A, double shift) {
  const int n = A.rows();
  Rng rng(0x9c0ffee5u);
  std::vector<double> v(n);
  for (double& x : v) x = rng.gauss();
  std::vector<double> Av(n);
  double lambda = 0.0;
  for (int it = 0; it < 20000; ++it) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += A(i, j) * v[j];
      Av[i] = shift == 0.0 ? s : shift * v[i] - s;
    }
    const double nrm = norm2(Av);
    if (nrm == 0.0) return shift == 0.0 ? 0.0 : shift;
    for (int i = 0; i < n; ++i) v[i] = Av[i] / nrm;
    double next = 0.0;
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += A(i, j) * v[j];
      next += v[i] * (shift == 0.0 ? s : shift * v[i] - s);
    }
    if (std::abs(next - lambda) <= 1e-12 * std::max(1.0, std::abs(next)) && it > 4) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return shift == 0.0 ? lambda : shift - lambda;
}

}  // namespace

std::pair<double, double> extreme_eigenvalues(const Matrix& A) {
  check_symmetric(A);
  const int n = A.rows();
  if (n <= 64) {
    std::vector<double> eig = jacobi_eigenvalues(A);
    double lo = eig[0];
    double hi = eig[0];
    for (double e : eig) {
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    return {lo, hi};
  }
  const double lmax = power_iteration_max(A, 0.0);
  const double lmin = power_iteration_max(A, lmax * (1.0 + 1e-12) + 1e-300);
  return {lmin, lmax};
}

std::vector<double> solve_linear_spd(const Matrix& A, std::span<const double> b) {
  const int n = A.rows();
  if (n != A.cols() || static_cast<size_t>(n) != b.size())
    throw std::invalid_argument("solve_linear_spd: dimension mismatch");
  // Cholesky A = L L^T, lower triangle.
  Matrix L(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = A(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      if (i == j) {
        if (s <= 0.0) throw std::runtime_error("solve_linear_spd: not positive definite");
        L(i, i) = std::sqrt(s);
      } else {
        L(i, j) = s / L(j, j);
      }
    }
  }
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= L(i, k) * y[k];
    y[i] = s / L(i, i);
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < n; ++k) s -= L(k, i) * x[k];
    x[i] = s / L(i, i);
  }
  return x;
}

std::vector<double> project_ball(std::span<const double> w, double W) {
  if (!(W > 0.0)) throw std::invalid_argument("project_ball: W must be positive");
  std::vector<double> out(w.begin(), w.end());
  const double nrm = norm2(w);
  if (nrm > W) {
    const double scale = W / nrm;
    for (double& x : out) x *= scale;
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace otafl
