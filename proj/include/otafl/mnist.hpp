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

#ifndef OTAFL_MNIST_HPP
#define OTAFL_MNIST_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "otafl/data.hpp"
#include "otafl/trainer.hpp"

namespace otafl {

// Digit-classification study: multinomial logistic regression over IDX data
// with the reference hyperparameters (lambda=0.01, W=10, gamma_hat=40,
// SNR_max=13 dB, epsilon=5, delta=0.01, mu=0.3, L=2.5).
struct MnistConfig {
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
  int subset = 1000;       // training samples kept (<= 60000)
  int test_subset = 1000;
  double lambda = 0.01;
  double W = 10.0;
  double gamma_hat = 40.0;
  double snr_max_db = 13.0;
  DpTarget dp{5.0, 0.01};
  double mu = 0.3;
  double L = 2.5;
  double kappa = 5.0;
  double rho = 0.0;
  int K = 10;
  Protocol protocol = Protocol::kOma;
  std::vector<PaMode> pa_modes{PaMode::kOnline, PaMode::kStatic};
  std::vector<int> I_grid{20, 40, 60, 80, 100};
  int realizations = 20;
  std::uint64_t seed = 1;
};

// Fraction of samples whose argmax class score differs from the label.
double test_error(const LossSpec& spec, std::span<const double> w, const Dataset& data);

struct MnistPoint {
  int I = 0;
  PaMode pa_mode = PaMode::kOnline;
  double train_loss_mean = 0.0;
  double train_loss_stderr = 0.0;
  double test_error_mean = 0.0;
  double test_error_stderr = 0.0;
};

// Runs the grid and writes one CSV row per (metric, I, pa_mode) in the sweep
// schema with axis in {train_loss, test_error} and value = I.
std::vector<MnistPoint> run_mnist(const MnistConfig& cfg, const std::string& out_path);

// Deterministic digit-like IDX fixture: 28x28 images drawn around ten fixed
// class templates, labels 0..9.  Lets the full pipeline run where the real
// dataset is not available.
void write_synthetic_digits(const std::string& images_path,
                            const std::string& labels_path, int count,
                            std::uint64_t seed);

}  // namespace otafl

#endif  // OTAFL_MNIST_HPP
