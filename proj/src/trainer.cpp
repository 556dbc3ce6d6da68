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

#include "otafl/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "otafl/power.hpp"

namespace otafl {

namespace {

constexpr int kChannelStream = 100;  // per-device channel rng substream base
constexpr int kNoiseStream = 7;      // receiver-noise rng substream

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::vector<double> zeros(size_t n) { return std::vector<double>(n, 0.0); }

// Scales x down to the power cap if the realized gradient norm exceeds the
// bound assumed by the solver (online heuristic; offline bounds are exact).
void clip_to_power(std::vector<double>& x, double P) {
  double p = 0.0;
  for (double v : x) p += v * v;
  if (p > P) {
    const double s = std::sqrt(P / p);
    for (double& v : x) v *= s;
  }
}

}  // namespace

std::string to_string(Protocol p) { return p == Protocol::kOma ? "oma" : "noma"; }

std::string to_string(PaMode m) {
  switch (m) {
    case PaMode::kOfflineOptimal: return "offline_optimal";
    case PaMode::kStatic: return "static";
    case PaMode::kOnline: return "online";
    case PaMode::kNoDp: return "no_dp";
  }
  return "?";
}

std::vector<double> server_estimate_oma(std::span<const std::vector<double>> ys,
                                        std::span<const double> hs,
                                        std::span<const double> alphas, double D_tot) {
  if (ys.empty()) throw std::invalid_argument("server_estimate_oma: no devices");
  std::vector<double> est(ys[0].size(), 0.0);
  for (size_t k = 0; k < ys.size(); ++k) {
    if (!(alphas[k] > 0.0)) continue;  // silent device
    const double inv = 1.0 / (hs[k] * alphas[k]);
    for (size_t j = 0; j < est.size(); ++j) est[j] += ys[k][j] * inv;
  }
  for (double& e : est) e /= D_tot;
  return est;
}

std::vector<double> server_estimate_noma(std::span<const double> y, double c,
                                         double D_tot) {
  if (!(c > 0.0)) return zeros(y.size());
  std::vector<double> est(y.begin(), y.end());
  const double inv = 1.0 / (c * D_tot);
  for (double& e : est) e *= inv;
  return est;
}

std::vector<double> model_update(std::span<const double> w,
                                 std::span<const double> estimate, double L, double W) {
  if (w.size() != estimate.size())
    throw std::invalid_argument("model_update: dimension mismatch");
  std::vector<double> next(w.size());
  const double eta = 1.0 / L;
  for (size_t j = 0; j < w.size(); ++j) next[j] = w[j] - eta * estimate[j];
  return project_ball(next, W);
}

double bound_value(double mu, double L, int d, double D_tot, double initial_gap,
                   std::span<const std::vector<double>> noise_over_gain2) {
  const int T = static_cast<int>(noise_over_gain2.size());
  const double decay = 1.0 - mu / L;
  double bound = std::pow(decay, T) * initial_gap;
  const double coeff = d / (2.0 * L * D_tot * D_tot);
  for (int t = 1; t <= T; ++t) {
    double sum = 0.0;
    for (double term : noise_over_gain2[t - 1]) {
      if (!std::isfinite(term)) return std::numeric_limits<double>::quiet_NaN();
      sum += term;
    }
    bound += coeff * std::pow(decay, T - t) * sum;
  }
  return bound;
}

MetricsTrace run(const TrainConfig& config, const Dataset& data, const Partition& part) {
  const int K = part.num_devices();
  if (config.K != K)
    throw std::invalid_argument("run: config.K does not match the partition");
  const bool oma = config.protocol == Protocol::kOma;
  if (oma && config.I % K != 0)
    throw std::invalid_argument("run: OMA requires K to divide the block budget I");
  const int T = oma ? config.I / K : config.I;
  if (T < 1) throw std::invalid_argument("run: empty iteration budget");

  const LossSpec& spec = config.loss;
  const int dim = spec.model_dim(data.d);
  const double N0 = config.N0;
  // Noiseless test mode (N0 = 0) keeps the absolute power of the unit-noise
  // system so the transmit-power contract stays meaningful.
  const double P = db_to_linear(config.snr_max_db) * dim * (N0 > 0.0 ? N0 : 1.0);
  const double R = r_dp(config.dp);

  CurvatureConstants curv;
  if (config.curvature_override) {
    curv = *config.curvature_override;
  } else if (spec.kind == LossKind::kRidge) {
    curv = curvature(data, spec.lambda);
  } else {
    throw std::invalid_argument("run: logistic loss requires curvature constants");
  }

  const bool online = config.pa_mode == PaMode::kOnline;
  const bool no_dp = config.pa_mode == PaMode::kNoDp;
  const bool clipping = online || config.clip;
  GradientBounds ob;
  if (clipping) {
    ob.gamma = config.gamma_hat;
    ob.G.assign(K, config.gamma_hat);
  } else {
    ob = offline_bounds(data, part, spec.lambda, config.W);
  }
  const double gamma_t = ob.gamma;

  // Channel simulation: one AR(1) Rician process per device advanced once per
  // block; a device's iteration-t gain is its state at its transmit block.
  ChannelParams chp{config.kappa, config.rho, N0, P, dim};
  std::vector<Rng> ch_rng;
  std::vector<FadingProcess> fading;
  ch_rng.reserve(K);
  fading.reserve(K);
  for (int k = 0; k < K; ++k) {
    ch_rng.emplace_back(mix_seed(config.seed, kChannelStream + k));
    fading.emplace_back(chp, ch_rng[k]);
  }
  std::vector<std::vector<double>> h(K, std::vector<double>(T));
  std::vector<std::vector<std::complex<double>>> g_at(
      K, std::vector<std::complex<double>>(T));
  for (int b = 1; b <= config.I; ++b) {
    for (int k = 0; k < K; ++k) fading[k].advance(ch_rng[k]);
    if (oma) {
      const int k = (b - 1) % K;
      const int t = (b - 1) / K;
      h[k][t] = fading[k].h();
      g_at[k][t] = fading[k].g();
    } else {
      for (int k = 0; k < K; ++k) {
        h[k][b - 1] = fading[k].h();
        g_at[k][b - 1] = fading[k].g();
      }
    }
  }

  // Offline schedules (online decisions are made inside the loop).
  std::vector<std::vector<double>> alpha(oma ? K : 1, std::vector<double>(T, 0.0));
  if (!online) {
    if (oma) {
      for (int k = 0; k < K; ++k) {
        PaInputsOma in;
        in.T = T;
        in.h = h[k];
        in.gamma.assign(T, ob.gamma);
        in.G.assign(T, ob.G[k]);
        in.D_k = static_cast<double>(part.shards[k].size());
        in.P = P;
        in.N0 = N0 > 0.0 ? N0 : 1.0;
        in.mu = curv.mu;
        in.L = curv.L;
        in.budget = R;
        switch (config.pa_mode) {
          case PaMode::kOfflineOptimal: alpha[k] = solve_offline_oma(in).scale; break;
          case PaMode::kStatic: alpha[k] = static_oma(in).scale; break;
          case PaMode::kNoDp: alpha[k] = full_power_oma(in).scale; break;
          default: break;
        }
      }
    } else {
      PaInputsNoma in;
      in.T = T;
      in.h = h;
      in.gamma.assign(T, ob.gamma);
      in.G.resize(K);
      in.D.resize(K);
      for (int k = 0; k < K; ++k) {
        in.G[k].assign(T, ob.G[k]);
        in.D[k] = static_cast<double>(part.shards[k].size());
      }
      in.P = P;
      in.N0 = N0 > 0.0 ? N0 : 1.0;
      in.mu = curv.mu;
      in.L = curv.L;
      in.budget = R;
      switch (config.pa_mode) {
        case PaMode::kOfflineOptimal: alpha[0] = solve_offline_noma(in).scale; break;
        case PaMode::kStatic: alpha[0] = static_noma(in).scale; break;
        case PaMode::kNoDp: alpha[0] = full_power_noma(in).scale; break;
        default: break;
      }
    }
  }

  const int num_slots = oma ? K : 1;
  std::optional<PrivacyLedger> ledger;
  if (!no_dp) ledger.emplace(R, num_slots);

  MetricsTrace trace;
  trace.T = T;
  trace.budget = R;
  trace.N0 = N0;
  trace.gamma_used.assign(T, gamma_t);
  trace.step_loss.assign(num_slots, std::vector<double>(T, 0.0));
  trace.cum_loss.assign(num_slots, std::vector<double>(T, 0.0));
  trace.h.assign(num_slots, std::vector<double>(T, 1.0));
  trace.scale.assign(num_slots, std::vector<double>(T, 0.0));
  trace.sigma.assign(num_slots, std::vector<double>(T, 0.0));
  trace.tx_power.assign(K, std::vector<double>(T, 0.0));

  double f_star = std::numeric_limits<double>::quiet_NaN();
  if (spec.kind == LossKind::kRidge) f_star = ridge_optimum(data, spec.lambda).F_star;
  trace.f_star = f_star;

  std::vector<double> D(K);
  double D_tot = 0.0;
  for (int k = 0; k < K; ++k) {
    D[k] = static_cast<double>(part.shards[k].size());
    D_tot += D[k];
  }

  Rng noise_rng(mix_seed(config.seed, kNoiseStream));
  std::vector<double> w(dim, 0.0);
  trace.f_initial = global_loss(spec, w, data);
  trace.loss.resize(T);
  if (std::isfinite(f_star)) trace.gap.resize(T);
  std::vector<std::vector<double>> noise_terms(T);

  // Online predictor state.
  std::vector<double> prev_G_hat(num_slots, config.gamma_hat);
  std::vector<double> prev_scale(num_slots, 0.0);
  std::vector<double> prev_h(num_slots, 1.0);
  std::vector<double> prev_y_norm(num_slots, 0.0);
  const double sigma = config.sigma_extra;
  const std::optional<double> clip =
      clipping ? std::optional<double>(config.gamma_hat) : std::nullopt;

  for (int t = 1; t <= T; ++t) {
    std::vector<std::vector<double>> grads(K);
    for (int k = 0; k < K; ++k)
      grads[k] = local_gradient(spec, w, data, part.shards[k], clip);

    std::vector<double> est;
    if (oma) {
      std::vector<std::vector<double>> ys(K);
      std::vector<double> hs(K), alphas(K);
      for (int k = 0; k < K; ++k) {
        hs[k] = h[k][t - 1];
        double a;
        if (online) {
          std::vector<double> G_hat =
              predict_bounds_oma(prev_y_norm[k], prev_h[k], prev_scale[k], D[k],
                                 config.gamma_hat, t, T - t + 1, prev_G_hat[k]);
          prev_G_hat[k] = G_hat[0];
          OnlineInputsOma oin;
          oin.t = t;
          oin.T = T;
          oin.residual = ledger ? ledger->residual(k) : R;
          oin.h_hat.resize(T - t + 1);
          oin.h_hat[0] = hs[k];
          for (int j = 1; j <= T - t; ++j)
            oin.h_hat[j] = std::sqrt(predict_power(g_at[k][t - 1], chp, K * j));
          oin.gamma_hat = config.gamma_hat;
          oin.G_hat = G_hat[0];
          oin.D_k = D[k];
          oin.P = P;
          oin.N0 = N0;
          oin.mu = curv.mu;
          oin.L = curv.L;
          a = online_step_oma(oin);
        } else {
          a = alpha[k][t - 1];
        }
        alphas[k] = a;
        if (a > 0.0) {
          std::vector<double> x(dim);
          for (int j = 0; j < dim; ++j) {
            x[j] = a * D[k] * grads[k][j];
            if (sigma > 0.0) x[j] += a * noise_rng.gauss(0.0, sigma);
          }
          if (clipping || sigma > 0.0) clip_to_power(x, P);
          trace.tx_power[k][t - 1] = dot(x, x);
          ys[k] = oma_receive(x, hs[k], N0, P, noise_rng);
        } else {
          ys[k] = zeros(dim);
        }
        const double loss = a > 0.0 ? step_loss_oma(hs[k], a, gamma_t, sigma, N0) : 0.0;
        if (ledger) ledger->charge(k, loss);
        trace.step_loss[k][t - 1] = loss;
        trace.h[k][t - 1] = hs[k];
        trace.scale[k][t - 1] = a;
        trace.sigma[k][t - 1] = sigma;
        prev_y_norm[k] = norm2(ys[k]);
        prev_h[k] = hs[k];
        prev_scale[k] = a;
      }
      est = server_estimate_oma(ys, hs, alphas, D_tot);
      noise_terms[t - 1].resize(K);
      for (int k = 0; k < K; ++k) {
        const double ha = hs[k] * alphas[k];
        const double m2 = ha * ha * sigma * sigma + N0;
        noise_terms[t - 1][k] =
            alphas[k] > 0.0 ? m2 / (ha * ha) : std::numeric_limits<double>::infinity();
      }
    } else {
      double c;
      if (online) {
        std::vector<double> G_hat =
            predict_bounds_noma(prev_y_norm[0], prev_scale[0], D_tot,
                                config.gamma_hat, t, T - t + 1, prev_G_hat[0]);
        prev_G_hat[0] = G_hat[0];
        OnlineInputsNoma nin;
        nin.t = t;
        nin.T = T;
        nin.residual = ledger ? ledger->residual(0) : R;
        nin.h_hat.assign(K, std::vector<double>(T - t + 1));
        for (int k = 0; k < K; ++k) {
          nin.h_hat[k][0] = h[k][t - 1];
          for (int j = 1; j <= T - t; ++j)
            nin.h_hat[k][j] = std::sqrt(predict_power(g_at[k][t - 1], chp, j));
        }
        nin.gamma_hat = config.gamma_hat;
        nin.G_hat = G_hat[0];
        nin.D = D;
        nin.P = P;
        nin.N0 = N0;
        nin.mu = curv.mu;
        nin.L = curv.L;
        c = online_step_noma(nin);
      } else {
        c = alpha[0][t - 1];
      }
      std::vector<double> y;
      if (c > 0.0) {
        std::vector<std::vector<double>> xs(K);
        std::vector<double> hs(K);
        for (int k = 0; k < K; ++k) {
          hs[k] = h[k][t - 1];
          xs[k].resize(dim);
          const double s = c / hs[k] * D[k];
          for (int j = 0; j < dim; ++j) {
            xs[k][j] = s * grads[k][j];
            if (sigma > 0.0) xs[k][j] += c / hs[k] * noise_rng.gauss(0.0, sigma);
          }
          if (clipping || sigma > 0.0) clip_to_power(xs[k], P);
          trace.tx_power[k][t - 1] = dot(xs[k], xs[k]);
        }
        y = noma_receive(xs, hs, N0, P, noise_rng);
      } else {
        y = zeros(dim);
      }
      est = server_estimate_noma(y, c, D_tot);
      // Same scalar arithmetic as the post-hoc audit: fold the K artificial
      // noise sources into one effective std.
      const double sigma_eff = sigma * std::sqrt(static_cast<double>(K));
      const double loss = c > 0.0 ? step_loss_oma(1.0, c, gamma_t, sigma_eff, N0) : 0.0;
      if (ledger) ledger->charge(0, loss);
      trace.step_loss[0][t - 1] = loss;
      trace.h[0][t - 1] = 1.0;
      trace.scale[0][t - 1] = c;
      trace.sigma[0][t - 1] = sigma_eff;
      prev_y_norm[0] = norm2(y);
      prev_scale[0] = c;
      const double m2 = c * c * sigma_eff * sigma_eff + N0;
      noise_terms[t - 1].assign(
          1, c > 0.0 ? m2 / (c * c) : std::numeric_limits<double>::infinity());
    }

    w = model_update(w, est, curv.L, config.W);
    trace.loss[t - 1] = global_loss(spec, w, data);
    if (std::isfinite(f_star))
      trace.gap[t - 1] = (trace.loss[t - 1] - f_star) / f_star;
    for (int s = 0; s < num_slots; ++s)
      trace.cum_loss[s][t - 1] =
          (t > 1 ? trace.cum_loss[s][t - 2] : 0.0) + trace.step_loss[s][t - 1];
  }

  trace.final_loss = trace.loss.back();
  if (std::isfinite(f_star)) {
    trace.final_gap = trace.gap.back();
    trace.bound = bound_value(curv.mu, curv.L, dim, D_tot,
                              trace.f_initial - f_star, noise_terms);
  }
  trace.w_final = std::move(w);
  return trace;
}

void dump_trace(const MetricsTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_trace: cannot open " + path);
  out << "iteration,device,h,scale,sigma,gamma,N0,step_loss,cum_loss,budget\n";
  char buf[512];
  for (int t = 1; t <= trace.T; ++t) {
    for (size_t s = 0; s < trace.step_loss.size(); ++s) {
      std::snprintf(buf, sizeof buf,
                    "%d,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t, s,
                    trace.h[s][t - 1], trace.scale[s][t - 1], trace.sigma[s][t - 1],
                    trace.gamma_used[t - 1], trace.N0, trace.step_loss[s][t - 1],
                    trace.cum_loss[s][t - 1], trace.budget);
      out << buf;
    }
  }
  if (!out) throw std::runtime_error("dump_trace: write failed for " + path);
}

TraceAudit verify_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("verify_trace: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) ||
      line != "iteration,device,h,scale,sigma,gamma,N0,step_loss,cum_loss,budget")
    throw std::runtime_error("verify_trace: bad header in " + path);

  TraceAudit audit;
  audit.consistent = true;
  std::vector<double> running;
  double budget = 0.0;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<double> f;
    while (std::getline(ss, field, ',')) f.push_back(std::stod(field));
    if (f.size() != 10)
      throw std::runtime_error("verify_trace: malformed row " + std::to_string(row));
    const size_t slot = static_cast<size_t>(f[1]);
    const double h = f[2], scale = f[3], sig = f[4], gamma = f[5], N0 = f[6];
    const double step = f[7], cum = f[8];
    budget = f[9];
    if (running.size() <= slot) running.resize(slot + 1, 0.0);
    const double recomputed = scale > 0.0 ? step_loss_oma(h, scale, gamma, sig, N0) : 0.0;
    running[slot] += recomputed;
    if (recomputed != step || running[slot] != cum) {
      audit.consistent = false;
      audit.detail = "ledger mismatch at row " + std::to_string(row);
    }
  }
  std::vector<std::vector<double>> slots(running.size());
  for (size_t s = 0; s < running.size(); ++s) slots[s] = {running[s]};
  const DpAudit dp = dp_satisfied(slots, budget);
  audit.satisfied = dp.satisfied;
  audit.worst_slack = dp.worst_slack;
  if (audit.consistent && audit.detail.empty())
    audit.detail = audit.satisfied ? "ok" : "budget exceeded";
  return audit;
}

}  // namespace otafl
