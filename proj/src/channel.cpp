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

#include "otafl/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace otafl {

namespace {

void check_params(const ChannelParams& p) {
  if (p.kappa < 0.0) throw std::invalid_argument("channel: kappa must be >= 0");
  if (p.rho < 0.0 || p.rho > 1.0) throw std::invalid_argument("channel: rho must be in [0,1]");
  if (p.N0 < 0.0) throw std::invalid_argument("channel: N0 must be >= 0");
}

void check_power(std::span<const double> x, double P) {
  double p = 0.0;
  for (double v : x) p += v * v;
  if (p > P + 1e-9)
    throw std::logic_error("channel: transmit power contract violated (PA bug)");
}

}  // namespace

FadingProcess::FadingProcess(const ChannelParams& params, Rng& rng) : params_(params) {
  check_params(params);
  r_ = rng.cgauss();  // stationary CN(0,1)
}

std::complex<double> FadingProcess::g() const {
  const double k = params_.kappa;
  return std::sqrt(k / (k + 1.0)) + std::sqrt(1.0 / (k + 1.0)) * r_;
}

double FadingProcess::advance(Rng& rng) {
  const double rho = params_.rho;
  r_ = rho * r_ + std::sqrt(1.0 - rho * rho) * rng.cgauss();
  return h();
}

double predict_power(std::complex<double> g_now, const ChannelParams& params, int lag) {
  check_params(params);
  if (lag < 1) throw std::invalid_argument("predict_power: lag must be >= 1");
  const double k = params.kappa;
  const double rl = std::pow(params.rho, lag);
  const double p_now = std::norm(g_now);
  return (k + rl * rl) / (k + 1.0) * p_now + (1.0 - rl * rl) / (k + 1.0);
}

std::vector<double> oma_receive(std::span<const double> x, double h, double N0,
                                double P, Rng& rng) {
  check_power(x, P);
  std::vector<double> y(x.size());
  const double std = std::sqrt(N0);
  for (size_t i = 0; i < x.size(); ++i) y[i] = h * x[i] + rng.gauss(0.0, std);
  return y;
}

std::vector<double> noma_receive(std::span<const std::vector<double>> xs,
                                 std::span<const double> hs, double N0, double P,
                                 Rng& rng) {
  if (xs.empty() || xs.size() != hs.size())
    throw std::invalid_argument("noma_receive: device count mismatch");
  const size_t d = xs[0].size();
  std::vector<double> y(d, 0.0);
  for (size_t k = 0; k < xs.size(); ++k) {
    check_power(xs[k], P);
    if (xs[k].size() != d) throw std::invalid_argument("noma_receive: length mismatch");
    for (size_t i = 0; i < d; ++i) y[i] += hs[k] * xs[k][i];
  }
  const double std = std::sqrt(N0);
  for (size_t i = 0; i < d; ++i) y[i] += rng.gauss(0.0, std);
  return y;
}

}  // namespace otafl
