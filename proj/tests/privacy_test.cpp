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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "otafl/privacy.hpp"

using namespace otafl;

TEST_CASE("dp budget at the reference operating point") {
  // epsilon=20, delta=0.01: c = C^{-1}(100) ~= 1.8488 and
  // R = (sqrt(20 + c^2) - c)^2 ~= 8.94.
  const double r = r_dp({20.0, 0.01});
  const double c = c_inverse(100.0);
  const double expect = std::pow(std::sqrt(20.0 + c * c) - c, 2.0);
  CHECK(r == doctest::Approx(expect).epsilon(1e-12));
  CHECK(r == doctest::Approx(8.9425).epsilon(1e-3));
}

TEST_CASE("dp budget is monotone in epsilon and in delta") {
  double prev = 0.0;
  for (double eps : {1.0, 2.0, 5.0, 10.0, 50.0}) {
    const double r = r_dp({eps, 0.01});
    CHECK(r > prev);
    prev = r;
  }
  CHECK(r_dp({10.0, 0.1}) > r_dp({10.0, 0.01}));
  CHECK_THROWS_AS(r_dp({0.0, 0.01}), std::invalid_argument);
  CHECK_THROWS_AS(r_dp({1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("per-step privacy loss formulas") {
  // OMA: 2 (h alpha gamma)^2 / ((h alpha sigma)^2 + N0).
  CHECK(step_loss_oma(1.0, 1.0, 1.0, 0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(step_loss_oma(2.0, 0.5, 3.0, 0.0, 4.0) ==
        doctest::Approx(2.0 * 9.0 / 4.0).epsilon(1e-12));
  CHECK(step_loss_oma(1.0, 1.0, 1.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // NOMA with K identical silent-noise devices matches OMA when c = h alpha.
  const std::vector<double> sig0{0.0, 0.0, 0.0};
  CHECK(step_loss_noma(2.0, 3.0, sig0, 4.0) ==
        doctest::Approx(step_loss_oma(1.0, 2.0, 3.0, 0.0, 4.0)).epsilon(1e-15));
  const std::vector<double> sig{1.0, 1.0};
  CHECK(step_loss_noma(1.0, 1.0, sig, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("ledger accumulates, floors the residual and rejects overdrawing") {
  PrivacyLedger ledger(1.0, 2);
  ledger.charge(0, 0.4);
  ledger.charge(0, 0.6);
  CHECK(ledger.accumulated(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ledger.residual(0) == 0.0);
  CHECK(ledger.residual(1) == 1.0);
  CHECK_THROWS_AS(ledger.charge(0, 1e-6), std::logic_error);
  CHECK_THROWS_AS(ledger.charge(1, -0.1), std::invalid_argument);
  // Float drift below the tolerance is not an overdraw.
  PrivacyLedger fine(1.0, 1);
  fine.charge(0, 1.0);
  CHECK_NOTHROW(fine.charge(0, 5e-10));
}

TEST_CASE("charge_all hits every slot") {
  PrivacyLedger ledger(2.0, 3);
  ledger.charge_all(0.5);
  for (int s = 0; s < 3; ++s) CHECK(ledger.accumulated(s) == 0.5);
}

TEST_CASE("post-hoc audit flags exactly the overdrawn case") {
  const std::vector<std::vector<double>> ok{{0.2, 0.3}, {0.4}};
  auto audit = dp_satisfied(ok, 0.5);
  CHECK(audit.satisfied);
  CHECK(audit.worst_slack == doctest::Approx(0.0).epsilon(1e-15));
  const std::vector<std::vector<double>> bad{{0.2, 0.3}, {0.6}};
  audit = dp_satisfied(bad, 0.5);
  CHECK_FALSE(audit.satisfied);
  CHECK(audit.worst_slack == doctest::Approx(-0.1).epsilon(1e-12));
}
