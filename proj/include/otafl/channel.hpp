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

#ifndef OTAFL_CHANNEL_HPP
#define OTAFL_CHANNEL_HPP

#include <complex>
#include <span>
#include <vector>

#include "otafl/numerics.hpp"

namespace otafl {

struct ChannelParams {
  double kappa = 0.0;  // Rice factor
  double rho = 0.0;    // block-to-block correlation of the diffuse component
  double N0 = 1.0;     // noise power per channel use
  double P = 0.0;      // per-device power budget
  int d = 0;           // channel uses per block (= model dimension)

  double snr_max() const { return P / (d * N0); }
};

// AR(1) Rician fading for one device.  Phase pre-compensation is modeled by
// construction: the effective gain presented to transmissions is h = |g|.
class FadingProcess {
 public:
  FadingProcess(const ChannelParams& params, Rng& rng);

  // AR(1) step of the diffuse component; returns the gain of the new block.
  double advance(Rng& rng);

  double h() const { return std::abs(g()); }
  std::complex<double> g() const;
  const ChannelParams& params() const { return params_; }

 private:
  ChannelParams params_;
  std::complex<double> r_;  // diffuse component, stationary CN(0,1)
};

// Predicted channel power lag blocks ahead given the current coefficient.
double predict_power(std::complex<double> g_now, const ChannelParams& params, int lag);

// y = h x + z with z ~ N(0, N0 I).  Enforces the transmit power contract
// ||x||^2 <= P (violations indicate a power-allocation bug upstream).
std::vector<double> oma_receive(std::span<const double> x, double h, double N0,
                                double P, Rng& rng);

// y = sum_k h_k x_k + z, one noise draw.
std::vector<double> noma_receive(std::span<const std::vector<double>> xs,
                                 std::span<const double> hs, double N0, double P,
                                 Rng& rng);

}  // namespace otafl

#endif  // OTAFL_CHANNEL_HPP
