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

#ifndef OTAFL_MODEL_HPP
#define OTAFL_MODEL_HPP

#include <optional>
#include <span>
#include <vector>

#include "otafl/data.hpp"
#include "otafl/numerics.hpp"

namespace otafl {

enum class LossKind { kRidge, kMultinomialLogistic };

struct LossSpec {
  LossKind kind = LossKind::kRidge;
  double lambda = 0.0;  // weight of the ||w||^2 regularizer
  int num_classes = 0;  // logistic only

  // Model dimension for a dataset of covariate dimension d.
  int model_dim(int d) const {
    return kind == LossKind::kRidge ? d : num_classes * d;
  }
};

struct CurvatureConstants {
  double mu = 0.0;
  double L = 0.0;
};

// Per-sample gradient bound gamma and per-device local-gradient bounds G_k,
// both constant across iterations in the offline setting.
struct GradientBounds {
  double gamma = 0.0;
  std::vector<double> G;
};

// Gradient of the sample-wise loss at w for one sample (u, v), no regularizer.
// Ridge: (w^T u - v) u.  Logistic: per-class blocks (softmax_c - 1{v=c}) u.
std::vector<double> sample_gradient(const LossSpec& spec, std::span<const double> w,
                                    std::span<const double> u, double v);

// min{1, clip / ||g||} * g.  Zero vector maps to itself.
std::vector<double> clip_sample_gradient(std::span<const double> g, double clip);

// Mean of (optionally clipped) sample gradients over the shard plus the
// regularizer term 2*lambda*w.  The regularizer is never clipped.
std::vector<double> local_gradient(const LossSpec& spec, std::span<const double> w,
                                   const Dataset& data, std::span<const int> shard,
                                   std::optional<double> clip = std::nullopt);

double global_loss(const LossSpec& spec, std::span<const double> w, const Dataset& data);

std::vector<double> global_gradient(const LossSpec& spec, std::span<const double> w,
                                    const Dataset& data);

// Closed-form ridge optimum w* = (U^T U + 2 D_tot lambda I)^{-1} U^T v and the
// global loss F* at w*.
struct RidgeOptimum {
  std::vector<double> w_star;
  double F_star = 0.0;
};
RidgeOptimum ridge_optimum(const Dataset& data, double lambda);

// (mu, L) as extreme eigenvalues of U^T U / D_tot + 2 lambda I for ridge.
CurvatureConstants curvature(const Dataset& data, double lambda);

// gamma = 2W max_i ||u_i||^2 and G_k = 2W lambda_max(U_k^T U_k / D_k + 2 lambda I).
GradientBounds offline_bounds(const Dataset& data, const Partition& part,
                              double lambda, double W);

}  // namespace otafl

#endif  // OTAFL_MODEL_HPP
