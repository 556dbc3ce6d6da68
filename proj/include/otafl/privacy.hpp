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

#ifndef OTAFL_PRIVACY_HPP
#define OTAFL_PRIVACY_HPP

#include <span>
#include <vector>

#include "otafl/numerics.hpp"

namespace otafl {

struct DpTarget {
  double epsilon = 0.0;
  double delta = 0.0;
};

// Budget R_dp(eps, delta) = (sqrt(eps + c^2) - c)^2 with c = C^{-1}(1/delta).
double r_dp(const DpTarget& target);

// Sensitivity of the noiseless received signal to one changed sample.
double sensitivity_bound_oma(double h, double alpha, double gamma);
double sensitivity_bound_noma(double c, double gamma);

// Per-iteration privacy loss (sqrt(2) * sensitivity / m)^2 with effective
// noise std m = sqrt((h alpha sigma)^2 + N0).
double step_loss_oma(double h, double alpha, double gamma, double sigma, double N0);

// NOMA charges the same loss to every device; m^2 = c^2 sum_k sigma_k^2 + N0.
double step_loss_noma(double c, double gamma, std::span<const double> sigmas, double N0);

// Running accumulation of per-device privacy loss against a fixed budget.
// Use one slot for the aggregate NOMA ledger.
class PrivacyLedger {
 public:
  PrivacyLedger(double budget, int num_slots);

  void charge(int slot, double loss);
  void charge_all(double loss);

  double accumulated(int slot) const { return loss_[slot]; }
  // budget - accumulated, floored at 0.
  double residual(int slot) const;
  double budget() const { return budget_; }
  int num_slots() const { return static_cast<int>(loss_.size()); }

 private:
  double budget_;
  std::vector<double> loss_;
};

struct DpAudit {
  bool satisfied = false;
  double worst_slack = 0.0;  // budget minus the largest accumulated loss
};

// Post-hoc check of the DP condition: per slot (device for OMA, aggregate for
// NOMA), the sum of step losses must not exceed the budget.  step_losses is
// indexed [slot][iteration].
DpAudit dp_satisfied(std::span<const std::vector<double>> step_losses, double budget);

}  // namespace otafl

#endif  // OTAFL_PRIVACY_HPP
