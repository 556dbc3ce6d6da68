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

#include "otafl/privacy.hpp"

#include <cmath>
#include <stdexcept>

namespace otafl {

namespace {

constexpr double kOverdrawTol = 1e-9;

}  // namespace

double r_dp(const DpTarget& target) {
  if (!(target.epsilon > 0.0)) throw std::invalid_argument("r_dp: epsilon must be > 0");
  if (!(target.delta > 0.0 && target.delta < 1.0))
    throw std::invalid_argument("r_dp: delta must be in (0,1)");
  const double c = c_inverse(1.0 / target.delta);
  const double root = std::sqrt(target.epsilon + c * c) - c;
  return root * root;
}

double sensitivity_bound_oma(double h, double alpha, double gamma) {
  return h * alpha * gamma;
}

double sensitivity_bound_noma(double c, double gamma) { return c * gamma; }

double step_loss_oma(double h, double alpha, double gamma, double sigma, double N0) {
  const double s = sensitivity_bound_oma(h, alpha, gamma);
  const double m2 = (h * alpha * sigma) * (h * alpha * sigma) + N0;
  return 2.0 * s * s / m2;
}

double step_loss_noma(double c, double gamma, std::span<const double> sigmas, double N0) {
  double var = 0.0;
  for (double s : sigmas) var += s * s;
  const double sens = sensitivity_bound_noma(c, gamma);
  return 2.0 * sens * sens / (c * c * var + N0);
}

PrivacyLedger::PrivacyLedger(double budget, int num_slots) : budget_(budget) {
  if (!(budget > 0.0)) throw std::invalid_argument("PrivacyLedger: budget must be > 0");
  if (num_slots < 1) throw std::invalid_argument("PrivacyLedger: need at least one slot");
  loss_.assign(num_slots, 0.0);
}

void PrivacyLedger::charge(int slot, double loss) {
  if (loss < 0.0) throw std::invalid_argument("PrivacyLedger: negative charge");
  loss_[slot] += loss;
  if (loss_[slot] > budget_ + kOverdrawTol)
    throw std::logic_error("PrivacyLedger: budget overdrawn (PA bug)");
}

void PrivacyLedger::charge_all(double loss) {
  for (int s = 0; s < num_slots(); ++s) charge(s, loss);
}

double PrivacyLedger::residual(int slot) const {
  return std::max(0.0, budget_ - loss_[slot]);
}

DpAudit dp_satisfied(std::span<const std::vector<double>> step_losses, double budget) {
  DpAudit audit;
  double worst = 0.0;
  for (const auto& slot : step_losses) {
    double sum = 0.0;
    for (double l : slot) sum += l;
    worst = std::max(worst, sum);
  }
  audit.worst_slack = budget - worst;
  audit.satisfied = worst <= budget + kOverdrawTol;
  return audit;
}

}  // namespace otafl
