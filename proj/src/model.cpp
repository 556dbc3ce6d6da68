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

#include "otafl/model.hpp"

#include <cmath>
#include <stdexcept>

namespace otafl {

namespace {

// Softmax of the C inner products w_c^T u, numerically stabilized.
std::vector<double> softmax_scores(std::span<const double> w, std::span<const double> u,
                                   int C) {
  const int d = static_cast<int>(u.size());
  std::vector<double> s(C);
  double smax = -1e300;
  for (int c = 0; c < C; ++c) {
    s[c] = dot(w.subspan(static_cast<size_t>(c) * d, d), u);
    smax = std::max(smax, s[c]);
  }
  double z = 0.0;
  for (int c = 0; c < C; ++c) {
    s[c] = std::exp(s[c] - smax);
    z += s[c];
  }
  for (int c = 0; c < C; ++c) s[c] /= z;
  return s;
}

double sample_loss(const LossSpec& spec, std::span<const double> w,
                   std::span<const double> u, double v) {
  if (spec.kind == LossKind::kRidge) {
    const double r = dot(w, u) - v;
    return 0.5 * r * r;
  }
  const std::vector<double> p = softmax_scores(w, u, spec.num_classes);
  const int cls = static_cast<int>(v);
  return -std::log(std::max(p[cls], 1e-300));
}

}  // namespace

std::vector<double> sample_gradient(const LossSpec& spec, std::span<const double> w,
                                    std::span<const double> u, double v) {
  const int d = static_cast<int>(u.size());
  if (static_cast<int>(w.size()) != spec.model_dim(d))
    throw std::invalid_argument("sample_gradient: dimension mismatch");
  if (spec.kind == LossKind::kRidge) {
    const double r = dot(w, u) - v;
    std::vector<double> g(d);
    for (int j = 0; j < d; ++j) g[j] = r * u[j];
    return g;
  }
  const int C = spec.num_classes;
  const std::vector<double> p = softmax_scores(w, u, C);
  const int cls = static_cast<int>(v);
  std::vector<double> g(static_cast<size_t>(C) * d);
  for (int c = 0; c < C; ++c) {
    const double coeff = p[c] - (c == cls ? 1.0 : 0.0);
    double* gc = g.data() + static_cast<size_t>(c) * d;
    for (int j = 0; j < d; ++j) gc[j] = coeff * u[j];
  }
  return g;
}

std::vector<double> clip_sample_gradient(std::span<const double> g, double clip) {
  if (!(clip > 0.0)) throw std::invalid_argument("clip_sample_gradient: clip must be > 0");
  std::vector<double> out(g.begin(), g.end());
  const double nrm = norm2(g);
  if (nrm > clip) {
    const double scale = clip / nrm;
    for (double& x : out) x *= scale;
  }
  return out;
}

std::vector<double> local_gradient(const LossSpec& spec, std::span<const double> w,
                                   const Dataset& data, std::span<const int> shard,
                                   std::optional<double> clip) {
  if (shard.empty()) throw std::invalid_argument("local_gradient: empty shard");
  std::vector<double> sum(w.size(), 0.0);
  for (int idx : shard) {
    std::vector<double> g = sample_gradient(spec, w, data.row(idx), data.v[idx]);
    if (clip) g = clip_sample_gradient(g, *clip);
    for (size_t j = 0; j < sum.size(); ++j) sum[j] += g[j];
  }
  const double inv = 1.0 / static_cast<double>(shard.size());
  for (size_t j = 0; j < sum.size(); ++j) sum[j] = sum[j] * inv + 2.0 * spec.lambda * w[j];
  return sum;
}

double global_loss(const LossSpec& spec, std::span<const double> w, const Dataset& data) {
  double sum = 0.0;
  for (int i = 0; i < data.D_tot; ++i) sum += sample_loss(spec, w, data.row(i), data.v[i]);
  return sum / data.D_tot + spec.lambda * dot(w, w);
}

std::vector<double> global_gradient(const LossSpec& spec, std::span<const double> w,
                                    const Dataset& data) {
  std::vector<int> all(data.D_tot);
  for (int i = 0; i < data.D_tot; ++i) all[i] = i;
  return local_gradient(spec, w, data, all);
}

RidgeOptimum ridge_optimum(const Dataset& data, double lambda) {
  const int d = data.d;
  Matrix A(d, d);
  std::vector<double> b(d, 0.0);
  for (int i = 0; i < data.D_tot; ++i) {
    const auto u = data.row(i);
    for (int p = 0; p < d; ++p) {
      b[p] += u[p] * data.v[i];
      for (int q = p; q < d; ++q) A(p, q) += u[p] * u[q];
    }
  }
  for (int p = 0; p < d; ++p) {
    A(p, p) += 2.0 * data.D_tot * lambda;
    for (int q = p + 1; q < d; ++q) A(q, p) = A(p, q);
  }
  RidgeOptimum opt;
  opt.w_star = solve_linear_spd(A, b);
  LossSpec spec{LossKind::kRidge, lambda, 0};
  opt.F_star = global_loss(spec, opt.w_star, data);
  return opt;
}

CurvatureConstants curvature(const Dataset& data, double lambda) {
  const int d = data.d;
  Matrix G(d, d);
  for (int i = 0; i < data.D_tot; ++i) {
    const auto u = data.row(i);
    for (int p = 0; p < d; ++p)
      for (int q = p; q < d; ++q) G(p, q) += u[p] * u[q];
  }
  const double inv = 1.0 / data.D_tot;
  for (int p = 0; p < d; ++p) {
    for (int q = p; q < d; ++q) {
      G(p, q) *= inv;
      G(q, p) = G(p, q);
    }
    G(p, p) += 2.0 * lambda;
  }
  const auto [lo, hi] = extreme_eigenvalues(G);
  return {lo, hi};
}

GradientBounds offline_bounds(const Dataset& data, const Partition& part,
                              double lambda, double W) {
  if (!(W > 0.0)) throw std::invalid_argument("offline_bounds: W must be > 0");
  GradientBounds bounds;
  double max_u2 = 0.0;
  for (int i = 0; i < data.D_tot; ++i) {
    const auto u = data.row(i);
    max_u2 = std::max(max_u2, dot(u, u));
  }
  bounds.gamma = 2.0 * W * max_u2;
  const int d = data.d;
  bounds.G.reserve(part.num_devices());
  for (const auto& shard : part.shards) {
    Matrix G(d, d);
    for (int idx : shard) {
      const auto u = data.row(idx);
      for (int p = 0; p < d; ++p)
        for (int q = p; q < d; ++q) G(p, q) += u[p] * u[q];
    }
    const double inv = 1.0 / static_cast<double>(shard.size());
    for (int p = 0; p < d; ++p) {
      for (int q = p; q < d; ++q) {
        G(p, q) *= inv;
        G(q, p) = G(p, q);
      }
      G(p, p) += 2.0 * lambda;
    }
    const auto [lo, hi] = extreme_eigenvalues(G);
    (void)lo;
    bounds.G.push_back(2.0 * W * hi);
  }
  return bounds;
}

}  // namespace otafl
