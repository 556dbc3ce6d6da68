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

#ifndef OTAFL_EXPERIMENTS_HPP
#define OTAFL_EXPERIMENTS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "otafl/trainer.hpp"

namespace otafl {

// Flat experiment configuration; defaults reproduce the reference settings
// (epsilon=20, delta=0.01, SNR_max=30 dB, K=10, I=30, lambda=5e-5, kappa=10,
// rho=1, W=3.2).
struct ExperimentConfig {
  double epsilon = 20.0;
  double delta = 0.01;
  double snr_max_db = 30.0;
  int num_users = 10;
  int comm_budget = 30;
  double lambda = 5e-5;
  int d_tot = 10000;
  int dim = 10;
  double noise_std = 0.2;
  double kappa = 10.0;
  double rho = 1.0;
  double n0 = 1.0;
  double w_max = 3.2;
  double gamma_hat = 20.0;
  double max_fraction = 0.0;  // 0 -> uniform partition
  double sigma_extra = 0.0;
  double mu = 0.0;  // 0 -> derived from the dataset (ridge)
  double big_l = 0.0;
  bool clip = false;
  int realizations = 200;
  std::uint64_t seed = 1;
  std::vector<Protocol> protocols{Protocol::kOma, Protocol::kNoma};
  std::vector<PaMode> pa_modes{PaMode::kOfflineOptimal, PaMode::kStatic, PaMode::kNoDp};
  std::string axis = "epsilon";
  std::vector<double> grid{2, 5, 10, 20, 50, 100, 150};
};

// key = value lines, '#' comments, unknown keys rejected.  The empty string
// yields the defaults above.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

// Effective configuration in the same key = value syntax; parse_config_text
// round-trips it to an identical struct.
std::string emit_config(const ExperimentConfig& cfg);

// TrainConfig for the first protocol / pa_mode of cfg.
TrainConfig to_train_config(const ExperimentConfig& cfg);

Protocol parse_protocol(const std::string& s);
PaMode parse_pa_mode(const std::string& s);

// Worker pool over [0, n); deterministic results are collected by index.
void parallel_for(int n, const std::function<void(int)>& fn, int num_threads = 0);

// Monte Carlo sweep over cfg.grid along cfg.axis, one CSV row per
// (value, protocol, pa_mode) with the mean and standard error of the final
// normalized optimality gap.  Deterministic given cfg.seed.
void run_sweep(const ExperimentConfig& cfg, const std::string& out_path);

// Single realization with the first protocol / pa_mode; dumps the privacy
// trace to out_path.
MetricsTrace run_single(const ExperimentConfig& cfg, const std::string& out_path);

struct ThresholdReport {
  double lhs_oma = 0.0;   // free-privacy LHS at unit channel gains
  double eps_oma = 0.0;   // epsilon at which R_dp equals the LHS
  double lhs_noma = 0.0;
  double eps_noma = 0.0;
};

// Free-privacy epsilon thresholds by bisection on the monotone r_dp.
ThresholdReport threshold_report(const ExperimentConfig& cfg);

}  // namespace otafl

#endif  // OTAFL_EXPERIMENTS_HPP
