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

#include "otafl/power.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace otafl {

namespace {

constexpr double kZetaRelTol = 1e-10;

void check_positive(double x, const char* what) {
  if (!(x > 0.0)) throw std::invalid_argument(std::string("power: ") + what + " must be > 0");
}

void check_oma(const PaInputsOma& in) {
  if (in.T < 1) throw std::invalid_argument("power: horizon must be >= 1");
  const size_t T = static_cast<size_t>(in.T);
  if (in.h.size() != T || in.gamma.size() != T || in.G.size() != T)
    throw std::invalid_argument("power: per-iteration vectors must have length T");
  for (double x : in.h) check_positive(x, "h");
  for (double x : in.gamma) check_positive(x, "gamma");
  for (double x : in.G) check_positive(x, "G");
  check_positive(in.D_k, "D_k");
  check_positive(in.P, "P");
  check_positive(in.N0, "N0");
  check_positive(in.mu, "mu");
  check_positive(in.L, "L");
  if (!(in.mu < in.L)) throw std::invalid_argument("power: need mu < L");
}

void check_noma(const PaInputsNoma& in) {
  if (in.T < 1) throw std::invalid_argument("power: horizon must be >= 1");
  const size_t T = static_cast<size_t>(in.T);
  const size_t K = in.h.size();
  if (K == 0 || in.G.size() != K || in.D.size() != K)
    throw std::invalid_argument("power: device dimensions inconsistent");
  if (in.gamma.size() != T)
    throw std::invalid_argument("power: gamma must have length T");
  for (size_t k = 0; k < K; ++k) {
    if (in.h[k].size() != T || in.G[k].size() != T)
      throw std::invalid_argument("power: per-device vectors must have length T");
    for (double x : in.h[k]) check_positive(x, "h");
    for (double x : in.G[k]) check_positive(x, "G");
    check_positive(in.D[k], "D_k");
  }
  for (double x : in.gamma) check_positive(x, "gamma");
  check_positive(in.P, "P");
  check_positive(in.N0, "N0");
  check_positive(in.mu, "mu");
  check_positive(in.L, "L");
  if (!(in.mu < in.L)) throw std::invalid_argument("power: need mu < L");
}

// ratio_t = h_t / (D_k G_t) for OMA; min over devices for NOMA.  Both
// problems reduce to choosing the effective gain e_t = h_t alpha_t (OMA) or
// e_t = c_t (NOMA), capped at sqrt(P) * ratio_t, with per-iteration privacy
// loss 2 (gamma_t e_t)^2 / N0.
std::vector<double> ratios_oma(const PaInputsOma& in) {
  std::vector<double> r(in.T);
  for (int t = 0; t < in.T; ++t) r[t] = in.h[t] / (in.D_k * in.G[t]);
  return r;
}

std::vector<double> ratios_noma(const PaInputsNoma& in) {
  std::vector<double> r(in.T, std::numeric_limits<double>::infinity());
  for (size_t k = 0; k < in.h.size(); ++k)
    for (int t = 0; t < in.T; ++t)
      r[t] = std::min(r[t], in.h[k][t] / (in.D[k] * in.G[k][t]));
  return r;
}

double free_lhs(const std::vector<double>& gamma, const std::vector<double>& ratio,
                double P, double N0) {
  double lhs = 0.0;
  for (size_t t = 0; t < gamma.size(); ++t) {
    const double gr = gamma[t] * ratio[t];
    lhs += 2.0 * P * gr * gr / N0;
  }
  return lhs;
}

// Accumulated privacy loss of the Theorem-1/2 schedule as a function of the
// multiplier zeta; strictly decreasing on the binding branch.
double loss_at_zeta(double zeta, const std::vector<double>& gamma,
                    const std::vector<double>& ratio, double P, double N0,
                    double decay) {
  const double inv_sqrt = 1.0 / std::sqrt(2.0 * zeta);
  double sum = 0.0;
  for (size_t t = 0; t < gamma.size(); ++t) {
    const double uncapped = 2.0 * gamma[t] * std::pow(decay, -0.5 * (t + 1.0)) * inv_sqrt;
    const double gr = gamma[t] * ratio[t];
    const double capped = 2.0 * P * gr * gr / N0;
    sum += std::min(uncapped, capped);
  }
  return sum;
}

// Effective gains e_t for a given zeta (binding branch).
std::vector<double> gains_at_zeta(double zeta, const std::vector<double>& gamma,
                                  const std::vector<double>& ratio, double P,
                                  double N0, double decay) {
  const double zpow = std::pow(2.0 * zeta, -0.25);
  std::vector<double> e(gamma.size());
  for (size_t t = 0; t < gamma.size(); ++t) {
    const double uncapped =
        std::sqrt(N0) * zpow * std::pow(decay, -0.25 * (t + 1.0)) / std::sqrt(gamma[t]);
    e[t] = std::min(uncapped, std::sqrt(P) * ratio[t]);
  }
  return e;
}

// Core of Theorems 1 and 2 in terms of the effective gain e_t.
PowerSchedule solve_effective(const std::vector<double>& gamma,
                              const std::vector<double>& ratio, double P, double N0,
                              double mu, double L, double budget) {
  const int T = static_cast<int>(gamma.size());
  PowerSchedule sched;
  sched.sigma.assign(T, 0.0);
  if (!(budget > 0.0)) {
    sched.scale.assign(T, 0.0);
    sched.exhausted = true;
    return sched;
  }
  const double decay = 1.0 - mu / L;
  if (free_lhs(gamma, ratio, P, N0) < budget) {
    sched.scale.resize(T);
    for (int t = 0; t < T; ++t) sched.scale[t] = std::sqrt(P) * ratio[t];
    return sched;
  }
  // Binding branch: bisection on zeta.  loss_at_zeta is continuous, strictly
  // decreasing, tends to the free-privacy LHS >= budget as zeta -> 0 and to 0
  // as zeta -> inf, so a bracket always exists.
  double lo = 1.0, hi = 1.0;
  for (int i = 0; i < 400 && loss_at_zeta(lo, gamma, ratio, P, N0, decay) < budget; ++i)
    lo *= 0.5;
  for (int i = 0; i < 400 && loss_at_zeta(hi, gamma, ratio, P, N0, decay) > budget; ++i)
    hi *= 2.0;
  for (int i = 0; i < 200 && (hi - lo) > kZetaRelTol * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (loss_at_zeta(mid, gamma, ratio, P, N0, decay) > budget)
      lo = mid;
    else
      hi = mid;
  }
  const double zeta = 0.5 * (lo + hi);
  sched.scale = gains_at_zeta(zeta, gamma, ratio, P, N0, decay);
  sched.binding = true;
  sched.zeta = zeta;
  return sched;
}

void effective_to_alpha(PowerSchedule& sched, const std::vector<double>& h) {
  for (size_t t = 0; t < sched.scale.size(); ++t) sched.scale[t] /= h[t];
}

}  // namespace

double free_privacy_lhs_oma(const PaInputsOma& in) {
  check_oma(in);
  return free_lhs(in.gamma, ratios_oma(in), in.P, in.N0);
}

double free_privacy_lhs_noma(const PaInputsNoma& in) {
  check_noma(in);
  return free_lhs(in.gamma, ratios_noma(in), in.P, in.N0);
}

PowerSchedule full_power_oma(const PaInputsOma& in) {
  check_oma(in);
  PowerSchedule sched;
  sched.sigma.assign(in.T, 0.0);
  sched.scale.resize(in.T);
  for (int t = 0; t < in.T; ++t) sched.scale[t] = std::sqrt(in.P) / (in.D_k * in.G[t]);
  return sched;
}

PowerSchedule full_power_noma(const PaInputsNoma& in) {
  check_noma(in);
  const std::vector<double> ratio = ratios_noma(in);
  PowerSchedule sched;
  sched.sigma.assign(in.T, 0.0);
  sched.scale.resize(in.T);
  for (int t = 0; t < in.T; ++t) sched.scale[t] = std::sqrt(in.P) * ratio[t];
  return sched;
}

PowerSchedule solve_offline_oma(const PaInputsOma& in) {
  check_oma(in);
  PowerSchedule sched =
      solve_effective(in.gamma, ratios_oma(in), in.P, in.N0, in.mu, in.L, in.budget);
  effective_to_alpha(sched, in.h);
  return sched;
}

PowerSchedule solve_offline_noma(const PaInputsNoma& in) {
  check_noma(in);
  return solve_effective(in.gamma, ratios_noma(in), in.P, in.N0, in.mu, in.L, in.budget);
}

PowerSchedule static_oma(const PaInputsOma& in) {
  check_oma(in);
  PowerSchedule sched;
  sched.sigma.assign(in.T, 0.0);
  sched.scale.resize(in.T);
  for (int t = 0; t < in.T; ++t) {
    const double even = std::sqrt(in.N0 * in.budget / (2.0 * in.T)) / (in.h[t] * in.gamma[t]);
    sched.scale[t] = std::min(even, std::sqrt(in.P) / (in.D_k * in.G[t]));
  }
  return sched;
}

PowerSchedule static_noma(const PaInputsNoma& in) {
  check_noma(in);
  const std::vector<double> ratio = ratios_noma(in);
  PowerSchedule sched;
  sched.sigma.assign(in.T, 0.0);
  sched.scale.resize(in.T);
  for (int t = 0; t < in.T; ++t) {
    const double even = std::sqrt(in.N0 * in.budget / (2.0 * in.T)) / in.gamma[t];
    sched.scale[t] = std::min(even, std::sqrt(in.P) * ratio[t]);
  }
  return sched;
}

std::vector<double> predict_bounds_oma(double last_received_norm, double h_prev,
                                       double alpha_prev, double D_k,
                                       double gamma_hat, int t, int horizon,
                                       double prev_estimate) {
  if (t < 1 || horizon < 1) throw std::invalid_argument("predict_bounds: bad horizon");
  double g_hat;
  if (t == 1)
    g_hat = gamma_hat;
  else if (alpha_prev > 0.0)
    g_hat = last_received_norm / (h_prev * alpha_prev * D_k);
  else
    g_hat = prev_estimate;  // silent device: keep the previous estimate
  return std::vector<double>(horizon, g_hat);
}

std::vector<double> predict_bounds_noma(double last_received_norm, double c_prev,
                                        double D_tot, double gamma_hat, int t,
                                        int horizon, double prev_estimate) {
  if (t < 1 || horizon < 1) throw std::invalid_argument("predict_bounds: bad horizon");
  double g_hat;
  if (t == 1)
    g_hat = gamma_hat;
  else if (c_prev > 0.0)
    g_hat = last_received_norm / (c_prev * D_tot);
  else
    g_hat = prev_estimate;
  return std::vector<double>(horizon, g_hat);
}

double online_step_oma(const OnlineInputsOma& in) {
  const int H = in.T - in.t + 1;
  if (H < 1 || static_cast<int>(in.h_hat.size()) != H)
    throw std::invalid_argument("online_step_oma: predictor horizon mismatch");
  if (!(in.residual > 0.0)) return 0.0;
  PaInputsOma sub;
  sub.T = H;
  sub.h = in.h_hat;
  sub.gamma.assign(H, in.gamma_hat);
  sub.G.assign(H, in.G_hat);
  sub.D_k = in.D_k;
  sub.P = in.P;
  sub.N0 = in.N0;
  sub.mu = in.mu;
  sub.L = in.L;
  sub.budget = in.residual;
  return solve_offline_oma(sub).scale[0];
}

double online_step_noma(const OnlineInputsNoma& in) {
  const int H = in.T - in.t + 1;
  if (H < 1) throw std::invalid_argument("online_step_noma: bad horizon");
  for (const auto& hk : in.h_hat)
    if (static_cast<int>(hk.size()) != H)
      throw std::invalid_argument("online_step_noma: predictor horizon mismatch");
  if (!(in.residual > 0.0)) return 0.0;
  PaInputsNoma sub;
  sub.T = H;
  sub.h = in.h_hat;
  sub.gamma.assign(H, in.gamma_hat);
  sub.G.assign(in.h_hat.size(), std::vector<double>(H, in.G_hat));
  sub.D = in.D;
  sub.P = in.P;
  sub.N0 = in.N0;
  sub.mu = in.mu;
  sub.L = in.L;
  sub.budget = in.residual;
  return solve_offline_noma(sub).scale[0];
}

}  // namespace otafl
