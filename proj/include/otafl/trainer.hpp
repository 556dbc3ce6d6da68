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

#ifndef OTAFL_TRAINER_HPP
#define OTAFL_TRAINER_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otafl/channel.hpp"
#include "otafl/data.hpp"
#include "otafl/model.hpp"
#include "otafl/privacy.hpp"

namespace otafl {

enum class Protocol { kOma, kNoma };
enum class PaMode { kOfflineOptimal, kStatic, kOnline, kNoDp };

std::string to_string(Protocol p);
std::string to_string(PaMode m);

struct TrainConfig {
  Protocol protocol = Protocol::kOma;
  PaMode pa_mode = PaMode::kOfflineOptimal;
  int I = 30;  // communication-block budget; OMA runs T = I/K iterations
  int K = 10;
  DpTarget dp{20.0, 0.01};
  double kappa = 10.0;
  double rho = 1.0;
  double N0 = 1.0;
  double snr_max_db = 30.0;  // P = 10^(dB/10) * d * N0
  LossSpec loss{LossKind::kRidge, 5e-5, 0};
  double W = 3.2;          // projection radius, also sets the offline bounds
  double gamma_hat = 20.0;  // clipping threshold / prior bound (online modes)
  // Curvature constants; computed from the dataset for ridge when absent.
  std::optional<CurvatureConstants> curvature_override;
  double sigma_extra = 0.0;  // artificial-noise ablation; 0 in all paper modes
  // Clip per-sample gradients to gamma_hat and use it as the gradient bound in
  // the schedules.  Always on in online mode; lets the static baseline run
  // with the same clipping when data-derived bounds are unavailable.
  bool clip = false;
  std::uint64_t seed = 0;
};

struct MetricsTrace {
  int T = 0;
  double budget = 0.0;
  double N0 = 1.0;
  std::vector<double> loss;       // F(w^{t+1}) per iteration
  std::vector<double> gap;        // normalized optimality gap, when F* known
  std::vector<double> gamma_used; // per-iteration sample-gradient bound charged
  // Slot-indexed accounting: one slot per device (OMA) or one aggregate (NOMA).
  std::vector<std::vector<double>> step_loss;  // [slot][t]
  std::vector<std::vector<double>> cum_loss;   // [slot][t], non-decreasing
  // Per-accounting-slot channel and scaling: h=1, scale=c for NOMA.
  std::vector<std::vector<double>> h;         // [slot][t]
  std::vector<std::vector<double>> scale;     // [slot][t]
  std::vector<std::vector<double>> sigma;     // [slot][t]
  std::vector<std::vector<double>> tx_power;  // [device][t], realized ||x||^2
  double f_initial = 0.0;
  double f_star = std::numeric_limits<double>::quiet_NaN();
  double final_loss = 0.0;
  double final_gap = std::numeric_limits<double>::quiet_NaN();
  // Lemma-2/4 right-hand side; NaN when not applicable (silent device or
  // unknown F*).
  double bound = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> w_final;
};

// Server-side gradient estimate (1/D_tot) sum_k y_k / (h_k alpha_k); devices
// with alpha=0 are silent and contribute nothing.
std::vector<double> server_estimate_oma(std::span<const std::vector<double>> ys,
                                        std::span<const double> hs,
                                        std::span<const double> alphas, double D_tot);

// NOMA estimate y / (c D_tot); c=0 -> zero vector.
std::vector<double> server_estimate_noma(std::span<const double> y, double c,
                                         double D_tot);

// w' = project_ball(w - (1/L) estimate, W).
std::vector<double> model_update(std::span<const double> w,
                                 std::span<const double> estimate, double L, double W);

// Right-hand side of the convergence bound.  noise_over_gain2[t] lists
// (m/(h alpha))^2 per device (OMA) or the single (m/c)^2 (NOMA) at iteration
// t+1.  Returns NaN when a silent device makes the bound inapplicable.
double bound_value(double mu, double L, int d, double D_tot, double initial_gap,
                   std::span<const std::vector<double>> noise_over_gain2);

// Full federated loop for one realization.
MetricsTrace run(const TrainConfig& config, const Dataset& data, const Partition& part);

// Trace serialization for the post-hoc DP audit.  Columns:
// iteration,device,h,scale,sigma,gamma,N0,step_loss,cum_loss,budget
void dump_trace(const MetricsTrace& trace, const std::string& path);

struct TraceAudit {
  bool consistent = false;  // recomputed losses match the recorded ledger
  bool satisfied = false;   // every slot stays within budget
  double worst_slack = 0.0;
  std::string detail;
};

// Recomputes every step loss from (h, scale, sigma, gamma, N0), accumulates in
// recorded order and compares against the stored ledger entries exactly.
TraceAudit verify_trace(const std::string& path);

}  // namespace otafl

#endif  // OTAFL_TRAINER_HPP
