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

#ifndef OTAFL_POWER_HPP
#define OTAFL_POWER_HPP

#include <vector>

namespace otafl {

// Inputs of the per-device power-allocation problem over a horizon of T
// iterations (OMA).  All vectors have length T, indexed by iteration.
struct PaInputsOma {
  int T = 0;
  std::vector<double> h;      // device's own channel gain per iteration
  std::vector<double> gamma;  // sample-gradient bound per iteration
  std::vector<double> G;      // local-gradient bound per iteration
  double D_k = 0.0;           // local dataset size
  double P = 0.0;
  double N0 = 1.0;
  double mu = 0.0;
  double L = 0.0;
  double budget = 0.0;  // DP budget R for this device
};

// Server-side joint problem (NOMA): per-device channel gains and gradient
// bounds, one common scaling factor per iteration.
struct PaInputsNoma {
  int T = 0;
  std::vector<std::vector<double>> h;  // [device][iteration]
  std::vector<double> gamma;           // per iteration
  std::vector<std::vector<double>> G;  // [device][iteration]
  std::vector<double> D;               // local dataset sizes
  double P = 0.0;
  double N0 = 1.0;
  double mu = 0.0;
  double L = 0.0;
  double budget = 0.0;
};

struct PowerSchedule {
  std::vector<double> scale;  // alpha_t (OMA) or c_t (NOMA)
  std::vector<double> sigma;  // artificial-noise std, 0 from the optimal solvers
  bool binding = false;       // DP constraint active (vs. free-privacy regime)
  bool exhausted = false;     // budget <= 0: all-silent schedule
  double zeta = 0.0;          // bisection multiplier, 0 on the free branch
};

// Left-hand side of the free-privacy condition; privacy comes for free at
// full power iff the returned sum is < budget.
double free_privacy_lhs_oma(const PaInputsOma& in);
double free_privacy_lhs_noma(const PaInputsNoma& in);

// Unconstrained (no-DP) schedule: full power every iteration.
PowerSchedule full_power_oma(const PaInputsOma& in);
PowerSchedule full_power_noma(const PaInputsNoma& in);

// Offline optimal schedules.  On the free branch the result is identical to
// the full-power schedule; on the binding branch the multiplier zeta is found
// by bisection so that the accumulated privacy loss equals the budget.
PowerSchedule solve_offline_oma(const PaInputsOma& in);
PowerSchedule solve_offline_noma(const PaInputsNoma& in);

// Baseline that splits the DP budget equally across iterations.
PowerSchedule static_oma(const PaInputsOma& in);
PowerSchedule static_noma(const PaInputsNoma& in);

// One-step-ahead gradient-bound predictors.  The single estimate is
// extrapolated as a constant over the remaining horizon of length `horizon`.
// At t=1 the prior bound gamma_hat is used; if the device was silent in the
// previous iteration (alpha_prev = 0) the previous estimate is reused.
std::vector<double> predict_bounds_oma(double last_received_norm, double h_prev,
                                       double alpha_prev, double D_k,
                                       double gamma_hat, int t, int horizon,
                                       double prev_estimate);
std::vector<double> predict_bounds_noma(double last_received_norm, double c_prev,
                                        double D_tot, double gamma_hat, int t,
                                        int horizon, double prev_estimate);

// State for one online decision at iteration t: the residual DP budget and
// predicted parameters over the remaining horizon [t..T].  Element 0 of each
// per-iteration vector refers to the current iteration (realized channel).
struct OnlineInputsOma {
  int t = 1;
  int T = 0;
  double residual = 0.0;
  std::vector<double> h_hat;  // length T - t + 1; h_hat[0] is the true h_t
  double gamma_hat = 0.0;
  double G_hat = 0.0;
  double D_k = 0.0;
  double P = 0.0;
  double N0 = 1.0;
  double mu = 0.0;
  double L = 0.0;
};

struct OnlineInputsNoma {
  int t = 1;
  int T = 0;
  double residual = 0.0;
  std::vector<std::vector<double>> h_hat;  // [device][0..T-t]
  double gamma_hat = 0.0;
  double G_hat = 0.0;  // common to all devices
  std::vector<double> D;
  double P = 0.0;
  double N0 = 1.0;
  double mu = 0.0;
  double L = 0.0;
};

// Re-solve the offline problem over the remaining horizon with the residual
// budget; return the current iteration's scaling factor.  Residual 0 -> 0.
double online_step_oma(const OnlineInputsOma& in);
double online_step_noma(const OnlineInputsNoma& in);

}  // namespace otafl

#endif  // OTAFL_POWER_HPP
