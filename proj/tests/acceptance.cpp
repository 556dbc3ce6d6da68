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
//
// Acceptance gate.  Each test case checks one release criterion end to end
// and prints a single "criterion N: PASS|FAIL" line.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "otafl/channel.hpp"
#include "otafl/experiments.hpp"
#include "otafl/mnist.hpp"
#include "otafl/power.hpp"
#include "otafl/privacy.hpp"
#include "otafl/trainer.hpp"

using namespace otafl;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Collects sub-check results and prints the per-criterion verdict line.
struct Criterion {
  int n;
  bool ok = true;

  explicit Criterion(int num) : n(num) {}
  void check(bool cond, const std::string& what) {
    if (!cond) ok = false;
    CHECK_MESSAGE(cond, what);
  }
  ~Criterion() {
    std::printf("criterion %d: %s\n", n, ok ? "PASS" : "FAIL");
    std::fflush(stdout);
  }
};

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform();
}

// ---------------------------------------------------------------------------
// Scalar reduction of the offline power problem used by the grid oracle.
// Both protocols reduce to choosing effective gains e_t in (0, cap_t] to
// minimize sum_t weight_t N0 / e_t^2 subject to sum_t 2 gamma_t^2 e_t^2 / N0
// <= R, with weight_t = (1 - mu/L)^(T-t).
// ---------------------------------------------------------------------------
struct ScalarProblem {
  int T = 0;
  std::vector<double> cap;
  std::vector<double> gamma;
  std::vector<double> weight;
  double N0 = 1.0;
  double R = 0.0;
};

double scalar_objective(const ScalarProblem& p, const std::vector<double>& e) {
  double obj = 0.0;
  for (int t = 0; t < p.T; ++t) {
    if (!(e[t] > 0.0)) return kInf;
    obj += p.weight[t] * p.N0 / (e[t] * e[t]);
  }
  return obj;
}

double scalar_charge(const ScalarProblem& p, const std::vector<double>& e) {
  double sum = 0.0;
  for (int t = 0; t < p.T; ++t)
    sum += 2.0 * p.gamma[t] * p.gamma[t] * e[t] * e[t] / p.N0;
  return sum;
}

// Given the first T-1 gains, the last one is largest-feasible (the objective
// is decreasing in every coordinate).
double head_eval(const ScalarProblem& p, std::vector<double>& e) {
  double used = 0.0;
  const int last = p.T - 1;
  for (int t = 0; t < last; ++t)
    used += 2.0 * p.gamma[t] * p.gamma[t] * e[t] * e[t] / p.N0;
  if (used > p.R) return kInf;
  const double g2 = p.gamma[last] * p.gamma[last];
  const double allow = std::sqrt((p.R - used) * p.N0 / (2.0 * g2));
  e[last] = std::min(p.cap[last], allow);
  return scalar_objective(p, e);
}

// Projected-grid solve with range refinement; independent of the closed form.
double oracle_objective(const ScalarProblem& p) {
  std::vector<double> full = p.cap;
  if (scalar_charge(p, full) <= p.R) return scalar_objective(p, full);
  if (p.T == 1) {
    const double g2 = p.gamma[0] * p.gamma[0];
    std::vector<double> e{std::min(p.cap[0], std::sqrt(p.R * p.N0 / (2.0 * g2)))};
    return scalar_objective(p, e);
  }
  const int dims = p.T - 1;
  const int npts = dims == 1 ? 600 : 100;
  std::vector<double> lo(dims), hi(dims);
  for (int i = 0; i < dims; ++i) {
    lo[i] = p.cap[i] * 1e-6;
    hi[i] = p.cap[i];
  }
  double best = kInf;
  std::vector<double> best_e(p.T, 0.0);
  std::vector<double> e(p.T, 0.0);
  for (int pass = 0; pass < 5; ++pass) {
    std::vector<double> step(dims);
    for (int i = 0; i < dims; ++i) step[i] = (hi[i] - lo[i]) / (npts - 1);
    const long total = static_cast<long>(std::pow(npts, dims));
    for (long idx = 0; idx < total; ++idx) {
      long rest = idx;
      for (int i = 0; i < dims; ++i) {
        e[i] = lo[i] + step[i] * static_cast<double>(rest % npts);
        rest /= npts;
      }
      const double obj = head_eval(p, e);
      if (obj < best) {
        best = obj;
        best_e = e;
      }
    }
    for (int i = 0; i < dims; ++i) {
      lo[i] = std::max(p.cap[i] * 1e-9, best_e[i] - 2.0 * step[i]);
      hi[i] = std::min(p.cap[i], best_e[i] + 2.0 * step[i]);
    }
  }
  return best;
}

// Residual of the stationarity/complementarity system at a candidate point.
double kkt_residual(const ScalarProblem& p, const std::vector<double>& e, bool binding) {
  double res = 0.0;
  if (!binding) {
    for (int t = 0; t < p.T; ++t)
      res = std::max(res, std::abs(e[t] - p.cap[t]) / p.cap[t]);
    if (scalar_charge(p, e) >= p.R) res = std::max(res, 1.0);
    return res;
  }
  res = std::abs(scalar_charge(p, e) - p.R) / p.R;
  // Multiplier implied by each coordinate: interior ones must agree, capped
  // ones must not want to shrink.
  std::vector<double> interior;
  std::vector<double> capped;
  for (int t = 0; t < p.T; ++t) {
    const double g2 = p.gamma[t] * p.gamma[t];
    const double lam = p.weight[t] * p.N0 * p.N0 / (2.0 * g2 * std::pow(e[t], 4.0));
    if (e[t] < p.cap[t] * (1.0 - 1e-8))
      interior.push_back(lam);
    else
      capped.push_back(lam);
  }
  if (interior.empty()) return std::max(res, 1.0);
  const double lam = interior[0];
  for (double l : interior) res = std::max(res, std::abs(l - lam) / lam);
  for (double l : capped) res = std::max(res, std::max(0.0, (lam - l) / lam));
  return res;
}

// Random offline instance in either protocol, together with its scalar form
// and the schedule's effective gains.
struct Instance {
  ScalarProblem scalar;
  PowerSchedule schedule;
  std::vector<double> e;
  bool binding = false;
};

Instance random_instance(Rng& rng, int index) {
  const int T = 1 + static_cast<int>(rng.next_u64() % 3);
  const bool noma = index % 2 == 1;
  const int K = noma ? 1 + static_cast<int>(rng.next_u64() % 3) : 1;
  const double P = uniform_in(rng, 1.0, 50.0);
  const double N0 = uniform_in(rng, 0.5, 2.0);
  const double mu = uniform_in(rng, 0.1, 0.9);
  const double L = 1.0;
  const double factors[] = {0.05, 0.3, 0.8, 1.3, 4.0};
  const double factor = factors[index % 5];

  Instance inst;
  inst.scalar.T = T;
  inst.scalar.N0 = N0;
  inst.scalar.gamma.resize(T);
  inst.scalar.weight.resize(T);
  for (int t = 0; t < T; ++t) {
    inst.scalar.gamma[t] = uniform_in(rng, 0.5, 3.0);
    inst.scalar.weight[t] = std::pow(1.0 - mu / L, T - 1 - t);
  }
  if (!noma) {
    PaInputsOma in;
    in.T = T;
    in.P = P;
    in.N0 = N0;
    in.mu = mu;
    in.L = L;
    in.D_k = uniform_in(rng, 10.0, 100.0);
    in.gamma = inst.scalar.gamma;
    in.h.resize(T);
    in.G.resize(T);
    inst.scalar.cap.resize(T);
    for (int t = 0; t < T; ++t) {
      in.h[t] = uniform_in(rng, 0.2, 2.0);
      in.G[t] = uniform_in(rng, 0.5, 4.0);
      inst.scalar.cap[t] = std::sqrt(P) * in.h[t] / (in.D_k * in.G[t]);
    }
    in.budget = factor * free_privacy_lhs_oma(in);
    inst.scalar.R = in.budget;
    inst.schedule = solve_offline_oma(in);
    inst.e.resize(T);
    for (int t = 0; t < T; ++t) inst.e[t] = inst.schedule.scale[t] * in.h[t];
  } else {
    PaInputsNoma in;
    in.T = T;
    in.P = P;
    in.N0 = N0;
    in.mu = mu;
    in.L = L;
    in.gamma = inst.scalar.gamma;
    in.h.assign(K, std::vector<double>(T));
    in.G.assign(K, std::vector<double>(T));
    in.D.resize(K);
    inst.scalar.cap.assign(T, kInf);
    for (int k = 0; k < K; ++k) {
      in.D[k] = uniform_in(rng, 10.0, 100.0);
      for (int t = 0; t < T; ++t) {
        in.h[k][t] = uniform_in(rng, 0.2, 2.0);
        in.G[k][t] = uniform_in(rng, 0.5, 4.0);
        inst.scalar.cap[t] = std::min(inst.scalar.cap[t],
                                      std::sqrt(P) * in.h[k][t] / (in.D[k] * in.G[k][t]));
      }
    }
    in.budget = factor * free_privacy_lhs_noma(in);
    inst.scalar.R = in.budget;
    inst.schedule = solve_offline_noma(in);
    inst.e = inst.schedule.scale;
  }
  inst.binding = inst.schedule.binding;
  return inst;
}

// ---------------------------------------------------------------------------
// Monte Carlo helpers over full training runs with common random numbers.
// ---------------------------------------------------------------------------
struct Cell {
  std::vector<double> v;
  double mean = 0.0;
  double se = 0.0;
};

Cell stats(std::vector<double> values) {
  Cell c;
  c.v = std::move(values);
  const int n = static_cast<int>(c.v.size());
  for (double x : c.v) c.mean += x;
  c.mean /= n;
  double ss = 0.0;
  for (double x : c.v) ss += (x - c.mean) * (x - c.mean);
  c.se = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return c;
}

Cell mc_gaps(const Dataset& data, const Partition& part, const TrainConfig& base,
             int realizations, std::uint64_t master) {
  std::vector<double> gaps(realizations);
  parallel_for(realizations, [&](int r) {
    TrainConfig cfg = base;
    cfg.seed = mix_seed(master, 0x100 + static_cast<std::uint64_t>(r));
    gaps[r] = run(cfg, data, part).final_gap;
  });
  return stats(std::move(gaps));
}

// Mean and standard error of the per-seed difference a - b.
Cell paired_diff(const Cell& a, const Cell& b) {
  std::vector<double> d(a.v.size());
  for (size_t i = 0; i < d.size(); ++i) d[i] = a.v[i] - b.v[i];
  return stats(std::move(d));
}

Dataset reference_data(std::uint64_t seed = 0xACC0'0001, int n = 10000, int d = 10) {
  Rng rng(seed);
  return generate_synthetic(n, d, 0.2, rng);
}

TrainConfig reference_config() {
  TrainConfig cfg;
  cfg.protocol = Protocol::kOma;
  cfg.pa_mode = PaMode::kOfflineOptimal;
  cfg.I = 30;
  cfg.K = 10;
  cfg.dp = {20.0, 0.01};
  cfg.kappa = 10.0;
  cfg.rho = 1.0;
  cfg.snr_max_db = 30.0;
  cfg.loss = {LossKind::kRidge, 5e-5, 0};
  cfg.W = 3.2;
  return cfg;
}

}  // namespace

// ---------------------------------------------------------------------------
// 1. Closed-form schedules match a brute-force projected-grid oracle and
//    satisfy the first-order optimality system.
// ---------------------------------------------------------------------------
TEST_CASE("criterion_1_solver_matches_grid_oracle") {
  Criterion crit(1);
  Rng rng(0xC1'2026);
  for (int i = 0; i < 100; ++i) {
    const Instance inst = random_instance(rng, i);
    const std::string tag = "instance " + std::to_string(i);
    // Feasibility of the returned schedule.
    bool feasible = scalar_charge(inst.scalar, inst.e) <= inst.scalar.R * (1.0 + 1e-9);
    for (int t = 0; t < inst.scalar.T; ++t)
      feasible = feasible && inst.e[t] <= inst.scalar.cap[t] * (1.0 + 1e-9);
    crit.check(feasible, tag + ": schedule feasible");
    // Objective within 1e-4 relative of the grid oracle.
    const double obj_solver = scalar_objective(inst.scalar, inst.e);
    const double obj_oracle = oracle_objective(inst.scalar);
    crit.check(std::abs(obj_solver - obj_oracle) <= 1e-4 * obj_oracle,
               tag + ": objective " + std::to_string(obj_solver) + " vs oracle " +
                   std::to_string(obj_oracle));
    // First-order conditions.
    crit.check(kkt_residual(inst.scalar, inst.e, inst.binding) <= 1e-6,
               tag + ": KKT residual");
  }
}

// ---------------------------------------------------------------------------
// 2. Binding schedules meet the privacy budget with equality, free schedules
//    with strictly positive slack, and the post-hoc audit agrees with the
//    online ledger.
// ---------------------------------------------------------------------------
TEST_CASE("criterion_2_dp_constraint_equality") {
  Criterion crit(2);
  Rng rng(0xC2'2026);
  int binding_seen = 0;
  int free_seen = 0;
  for (int i = 0; i < 60; ++i) {
    const Instance inst = random_instance(rng, i);
    const double charge = scalar_charge(inst.scalar, inst.e);
    const std::string tag = "instance " + std::to_string(i);
    if (inst.binding) {
      ++binding_seen;
      crit.check(std::abs(charge - inst.scalar.R) <= 1e-6 * inst.scalar.R,
                 tag + ": binding equality");
    } else {
      ++free_seen;
      crit.check(charge < inst.scalar.R, tag + ": free-regime strict slack");
    }
  }
  crit.check(binding_seen > 10 && free_seen > 10, "both regimes exercised");

  // Ledger vs post-hoc verification on real runs in every DP mode.
  const Dataset data = reference_data(0xACC0'0002, 2000);
  const Partition part = partition_uniform(data, 10);
  for (PaMode mode : {PaMode::kOfflineOptimal, PaMode::kStatic, PaMode::kOnline}) {
    TrainConfig cfg = reference_config();
    cfg.pa_mode = mode;
    cfg.dp = {5.0, 0.01};
    if (mode == PaMode::kOnline) {
      cfg.kappa = 5.0;
      cfg.rho = 0.0;
    }
    cfg.seed = 11;
    const MetricsTrace trace = run(cfg, data, part);
    const std::string path = tmp_path("otafl_acc2_trace.csv");
    dump_trace(trace, path);
    const TraceAudit audit = verify_trace(path);
    crit.check(audit.consistent, to_string(mode) + ": audit recomputation matches ledger");
    crit.check(audit.satisfied, to_string(mode) + ": audit within budget");
    std::remove(path.c_str());
  }
}

// ---------------------------------------------------------------------------
// 3. Privacy-for-free threshold structure at the reference operating point.
// ---------------------------------------------------------------------------
TEST_CASE("criterion_3_privacy_for_free_threshold") {
  Criterion crit(3);
  const Dataset data = reference_data();
  const Partition part = partition_uniform(data, 10);
  const int R = 200;

  const ThresholdReport rep = threshold_report(ExperimentConfig{});
  const double eps_hi =
      std::max(100.0, 3.0 * std::max(rep.eps_oma, rep.eps_noma));

  for (Protocol proto : {Protocol::kOma, Protocol::kNoma}) {
    TrainConfig base = reference_config();
    base.protocol = proto;
    base.pa_mode = PaMode::kNoDp;
    const Cell nodp = mc_gaps(data, part, base, R, 0xC3);

    base.pa_mode = PaMode::kOfflineOptimal;
    base.dp = {eps_hi, 0.01};
    const Cell hi = mc_gaps(data, part, base, R, 0xC3);
    const double se_hi = std::sqrt(hi.se * hi.se + nodp.se * nodp.se);
    crit.check(std::abs(hi.mean - nodp.mean) <= 2.0 * se_hi + 1e-12,
               to_string(proto) + ": adaptive equals no-DP above threshold");

    base.dp = {5.0, 0.01};
    const Cell lo = mc_gaps(data, part, base, R, 0xC3);
    const Cell d = paired_diff(lo, nodp);
    crit.check(d.mean > 2.0 * d.se,
               to_string(proto) + ": strictly worse below threshold (diff " +
                   std::to_string(d.mean) + " se " + std::to_string(d.se) + ")");
  }
}

// ---------------------------------------------------------------------------
// 4. Ordering at a stringent privacy level: NOMA beats OMA under adaptive
//    power, and adaptive beats static within each protocol.
// ---------------------------------------------------------------------------
TEST_CASE("criterion_4_protocol_and_mode_ordering") {
  Criterion crit(4);
  const Dataset data = reference_data();
  const Partition part = partition_uniform(data, 10);
  const int R = 200;

  auto cells_at = [&](double eps) {
    std::vector<Cell> out;
    for (Protocol proto : {Protocol::kOma, Protocol::kNoma})
      for (PaMode mode : {PaMode::kOfflineOptimal, PaMode::kStatic}) {
        TrainConfig cfg = reference_config();
        cfg.protocol = proto;
        cfg.pa_mode = mode;
        cfg.dp = {eps, 0.01};
        out.push_back(mc_gaps(data, part, cfg, R, 0xC4));
      }
    return out;  // {oma_ad, oma_st, noma_ad, noma_st}
  };

  const auto c5 = cells_at(5.0);
  const Cell& oma_ad = c5[0];
  const Cell& oma_st = c5[1];
  const Cell& noma_ad = c5[2];
  const Cell& noma_st = c5[3];
  crit.check(noma_ad.mean <= oma_ad.mean, "NOMA adaptive <= OMA adaptive");
  crit.check(oma_ad.mean <= oma_st.mean, "OMA adaptive <= OMA static");
  crit.check(noma_ad.mean <= noma_st.mean, "NOMA adaptive <= NOMA static");

  const Cell sep1 = paired_diff(oma_ad, noma_ad);
  const Cell sep2 = paired_diff(oma_st, oma_ad);
  const Cell sep3 = paired_diff(noma_st, noma_ad);
  crit.check(sep1.mean > 2.0 * sep1.se, "protocol separation at 2 standard errors");
  crit.check(sep2.mean > 2.0 * sep2.se, "OMA mode separation at 2 standard errors");
  crit.check(sep3.mean > 2.0 * sep3.se, "NOMA mode separation at 2 standard errors");
}

// ---------------------------------------------------------------------------
// 5. The convergence bound dominates the empirical mean optimality gap.
// ---------------------------------------------------------------------------
TEST_CASE("criterion_5_bound_validity") {
  Criterion crit(5);
  const Dataset data = reference_data();
  const Partition part = partition_uniform(data, 10);
  const int R = 1000;
  for (Protocol proto : {Protocol::kOma, Protocol::kNoma}) {
    TrainConfig base = reference_config();
    base.protocol = proto;
    base.dp = {5.0, 0.01};
    std::vector<double> gaps(R);
    std::vector<double> bounds(R);
    parallel_for(R, [&](int r) {
      TrainConfig cfg = base;
      cfg.seed = mix_seed(0xC5, 0x100 + static_cast<std::uint64_t>(r));
      const MetricsTrace trace = run(cfg, data, part);
      gaps[r] = trace.final_loss - trace.f_star;
      bounds[r] = trace.bound;
    });
    const Cell g = stats(std::move(gaps));
    const Cell b = stats(std::move(bounds));
    crit.check(std::none_of(b.v.begin(), b.v.end(),
                            [](double x) { return std::isnan(x); }),
               to_string(proto) + ": bound defined for every seed");
    crit.check(g.mean <= b.mean,
               to_string(proto) + ": mean gap " + std::to_string(g.mean) +
                   " <= mean bound " + std::to_string(b.mean));
  }
}

// ---------------------------------------------------------------------------
// 6. Geometric contraction without privacy noise at high SNR.
// ---------------------------------------------------------------------------
TEST_CASE("criterion_6_geometric_convergence") {
  Criterion crit(6);
  const Dataset data = reference_data(0xACC0'0006, 4000);
  const Partition part = partition_uniform(data, 10);
  TrainConfig cfg = reference_config();
  cfg.pa_mode = PaMode::kNoDp;
  cfg.snr_max_db = 90.0;
  cfg.I = 50;
  cfg.seed = 3;
  const MetricsTrace trace = run(cfg, data, part);
  const CurvatureConstants curv = curvature(data, cfg.loss.lambda);
  const double decay = 1.0 - curv.mu / curv.L;
  double ratio_sum = 0.0;
  int count = 0;
  double prev = trace.f_initial - trace.f_star;
  for (int t = 0; t < trace.T; ++t) {
    const double gap = trace.loss[t] - trace.f_star;
    if (prev > 1e-12) {
      ratio_sum += gap / prev;
      ++count;
    }
    prev = gap;
  }
  crit.check(count > 0, "run long enough to measure contraction");
  crit.check(ratio_sum / count <= decay + 0.05,
             "mean contraction factor " + std::to_string(ratio_sum / count) +
                 " vs limit " + std::to_string(decay + 0.05));
}

// ---------------------------------------------------------------------------
// 7. Online scheme never overdraws the budget, and with perfect predictions
//    it retraces the offline schedule.
// ---------------------------------------------------------------------------
TEST_CASE("criterion_7_online_budget_safety") {
  Criterion crit(7);
  const Dataset data = reference_data(0xACC0'0007, 4000);
  const Partition part = partition_uniform(data, 10);
  for (Protocol proto : {Protocol::kOma, Protocol::kNoma}) {
    std::vector<int> bad(25, 0);
    parallel_for(25, [&](int r) {
      TrainConfig cfg = reference_config();
      cfg.protocol = proto;
      cfg.pa_mode = PaMode::kOnline;
      cfg.dp = {5.0, 0.01};
      cfg.kappa = 5.0;
      cfg.rho = 0.0;
      cfg.gamma_hat = 20.0;
      cfg.seed = mix_seed(0xC7, static_cast<std::uint64_t>(r));
      const MetricsTrace trace = run(cfg, data, part);
      const DpAudit audit = dp_satisfied(trace.step_loss, trace.budget);
      if (!audit.satisfied) bad[r] = 1;
    });
    crit.check(std::count(bad.begin(), bad.end(), 1) == 0,
               to_string(proto) + ": 25 online runs within budget");
  }

  // Perfect-prediction equivalence, OMA.
  {
    Rng rng(0xC7'01);
    PaInputsOma in;
    in.T = 6;
    in.P = 30.0;
    in.N0 = 1.0;
    in.mu = 0.4;
    in.L = 1.0;
    in.D_k = 50.0;
    in.gamma.assign(in.T, 1.3);
    in.G.assign(in.T, 2.0);
    in.h.resize(in.T);
    for (int t = 0; t < in.T; ++t) in.h[t] = uniform_in(rng, 0.3, 1.8);
    in.budget = 0.4 * free_privacy_lhs_oma(in);
    const PowerSchedule off = solve_offline_oma(in);
    double residual = in.budget;
    double worst = 0.0;
    for (int t = 1; t <= in.T; ++t) {
      OnlineInputsOma o;
      o.t = t;
      o.T = in.T;
      o.residual = residual;
      o.h_hat.assign(in.h.begin() + (t - 1), in.h.end());
      o.gamma_hat = 1.3;
      o.G_hat = 2.0;
      o.D_k = in.D_k;
      o.P = in.P;
      o.N0 = in.N0;
      o.mu = in.mu;
      o.L = in.L;
      const double s = online_step_oma(o);
      worst = std::max(worst, std::abs(s - off.scale[t - 1]));
      residual -= step_loss_oma(in.h[t - 1], s, 1.3, 0.0, in.N0);
    }
    crit.check(worst <= 1e-8, "OMA perfect prediction retraces offline, deviation " +
                                  std::to_string(worst));
    crit.check(residual >= -1e-9, "OMA online residual non-negative");
  }

  // Perfect-prediction equivalence, NOMA.
  {
    Rng rng(0xC7'02);
    PaInputsNoma in;
    in.T = 6;
    in.P = 30.0;
    in.N0 = 1.0;
    in.mu = 0.4;
    in.L = 1.0;
    const int K = 3;
    in.gamma.assign(in.T, 1.3);
    in.h.assign(K, std::vector<double>(in.T));
    in.G.assign(K, std::vector<double>(in.T, 2.0));
    in.D = {40.0, 55.0, 35.0};
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < in.T; ++t) in.h[k][t] = uniform_in(rng, 0.3, 1.8);
    in.budget = 0.4 * free_privacy_lhs_noma(in);
    const PowerSchedule off = solve_offline_noma(in);
    const std::vector<double> zeros(K, 0.0);
    double residual = in.budget;
    double worst = 0.0;
    for (int t = 1; t <= in.T; ++t) {
      OnlineInputsNoma o;
      o.t = t;
      o.T = in.T;
      o.residual = residual;
      o.h_hat.resize(K);
      for (int k = 0; k < K; ++k)
        o.h_hat[k].assign(in.h[k].begin() + (t - 1), in.h[k].end());
      o.gamma_hat = 1.3;
      o.G_hat = 2.0;
      o.D = in.D;
      o.P = in.P;
      o.N0 = in.N0;
      o.mu = in.mu;
      o.L = in.L;
      const double c = online_step_noma(o);
      worst = std::max(worst, std::abs(c - off.scale[t - 1]));
      residual -= step_loss_noma(c, 1.3, zeros, in.N0);
    }
    crit.check(worst <= 1e-8, "NOMA perfect prediction retraces offline, deviation " +
                                  std::to_string(worst));
    crit.check(residual >= -1e-9, "NOMA online residual non-negative");
  }
}

// ---------------------------------------------------------------------------
// 8. Static power allocation has an interior optimum in the iteration count,
//    adaptive allocation does not degrade with more iterations.
// ---------------------------------------------------------------------------
TEST_CASE("criterion_8_static_interior_optimum") {
  Criterion crit(8);
  const Dataset data = reference_data();
  const Partition part = partition_uniform(data, 10);
  const int R = 200;
  const std::vector<int> grid{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};

  std::vector<Cell> adaptive;
  std::vector<Cell> fixed;
  for (int I : grid) {
    TrainConfig cfg = reference_config();
    cfg.I = I;
    cfg.dp = {5.0, 0.01};
    cfg.pa_mode = PaMode::kOfflineOptimal;
    adaptive.push_back(mc_gaps(data, part, cfg, R, 0xC8));
    cfg.pa_mode = PaMode::kStatic;
    fixed.push_back(mc_gaps(data, part, cfg, R, 0xC8));
  }

  size_t best = 0;
  for (size_t i = 1; i < fixed.size(); ++i)
    if (fixed[i].mean < fixed[best].mean) best = i;
  const Cell tail = paired_diff(fixed.back(), fixed[best]);
  crit.check(best + 1 < fixed.size(),
             "static optimum interior at I=" + std::to_string(grid[best]));
  crit.check(tail.mean > 2.0 * tail.se,
             "static tail exceeds its minimum (diff " + std::to_string(tail.mean) +
                 " se " + std::to_string(tail.se) + ")");
  for (size_t i = 0; i + 1 < adaptive.size(); ++i) {
    const Cell d = paired_diff(adaptive[i + 1], adaptive[i]);
    crit.check(d.mean <= 2.0 * d.se + 1e-12,
               "adaptive non-increasing from I=" + std::to_string(grid[i]));
  }
}

// ---------------------------------------------------------------------------
// 9. Numerics micro-suite: budget inversion, channel predictor against the
//    Monte Carlo conditional mean, eigensolver against a constructed-spectrum
//    oracle.
// ---------------------------------------------------------------------------
TEST_CASE("criterion_9_numerics_micro_suite") {
  Criterion crit(9);
  // c_inverse round-trip across nine decades.
  for (double y = 1e-3; y <= 1e6; y *= 10.0) {
    const double x = c_inverse(y);
    crit.check(std::abs(c_function(x) - y) / y <= 1e-9,
               "c_inverse round-trip at y=" + std::to_string(y));
  }

  // Channel-power predictor vs the Monte Carlo conditional mean.
  {
    ChannelParams params;
    params.kappa = 5.0;
    params.rho = 0.5;
    const std::complex<double> los(std::sqrt(5.0 / 6.0), 0.0);
    const std::complex<double> r_now(0.6, -0.8);
    const std::complex<double> g_now = los + std::sqrt(1.0 / 6.0) * r_now;
    Rng rng(0xC9'01);
    for (int lag : {1, 2, 5}) {
      const double rl = std::pow(params.rho, lag);
      const double diffuse = std::sqrt(1.0 - rl * rl);
      double mc = 0.0;
      const int n = 4000000;
      for (int i = 0; i < n; ++i) {
        const std::complex<double> r = rl * r_now + diffuse * rng.cgauss();
        mc += std::norm(los + std::sqrt(1.0 / 6.0) * r);
      }
      mc /= n;
      const double predicted = predict_power(g_now, params, lag);
      crit.check(std::abs(predicted - mc) / mc <= 0.01,
                 "predictor within 1% of conditional mean at lag " +
                     std::to_string(lag) + " (predicted " + std::to_string(predicted) +
                     ", Monte Carlo " + std::to_string(mc) + ")");
    }
  }

  // Eigensolver vs a matrix with a constructed spectrum.
  {
    Rng rng(0xC9'02);
    const int dim = 10;
    std::vector<double> eig(dim);
    for (int i = 0; i < dim; ++i) eig[i] = uniform_in(rng, 0.1, 9.0);
    std::sort(eig.begin(), eig.end());
    // Random orthogonal basis by Gram-Schmidt.
    std::vector<std::vector<double>> q(dim, std::vector<double>(dim));
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) q[i][j] = rng.gauss();
      for (int p = 0; p < i; ++p) {
        const double proj = dot(q[i], q[p]);
        for (int j = 0; j < dim; ++j) q[i][j] -= proj * q[p][j];
      }
      const double nrm = norm2(q[i]);
      for (int j = 0; j < dim; ++j) q[i][j] /= nrm;
    }
    Matrix A(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        double s = 0.0;
        for (int p = 0; p < dim; ++p) s += q[p][i] * eig[p] * q[p][j];
        A(i, j) = s;
      }
    const auto [lo, hi] = extreme_eigenvalues(A);
    crit.check(std::abs(lo - eig.front()) <= 1e-8, "smallest eigenvalue");
    crit.check(std::abs(hi - eig.back()) <= 1e-8, "largest eigenvalue");
  }
}

// ---------------------------------------------------------------------------
// 10. Digit classification at desk scale: online adaptive power matches or
//     beats the static baseline at every iteration budget.
// ---------------------------------------------------------------------------
TEST_CASE("criterion_10_digit_study_ordering") {
  Criterion crit(10);
  const std::string train_img = tmp_path("otafl_acc10_train_img.idx");
  const std::string train_lab = tmp_path("otafl_acc10_train_lab.idx");
  const std::string test_img = tmp_path("otafl_acc10_test_img.idx");
  const std::string test_lab = tmp_path("otafl_acc10_test_lab.idx");
  write_synthetic_digits(train_img, train_lab, 1000, 1);
  write_synthetic_digits(test_img, test_lab, 1000, 2);

  MnistConfig cfg;
  cfg.train_images = train_img;
  cfg.train_labels = train_lab;
  cfg.test_images = test_img;
  cfg.test_labels = test_lab;
  const auto points = run_mnist(cfg, "");
  crit.check(points.size() == 2 * cfg.I_grid.size(), "one point per (I, mode)");

  for (int I : cfg.I_grid) {
    double online_err = -1.0;
    double static_err = -1.0;
    for (const auto& p : points) {
      if (p.I != I) continue;
      if (p.pa_mode == PaMode::kOnline) online_err = p.test_error_mean;
      if (p.pa_mode == PaMode::kStatic) static_err = p.test_error_mean;
    }
    crit.check(online_err >= 0.0 && static_err >= 0.0,
               "grid point I=" + std::to_string(I) + " present");
    crit.check(online_err <= static_err + 1e-12,
               "adaptive <= static at I=" + std::to_string(I) + " (" +
                   std::to_string(online_err) + " vs " + std::to_string(static_err) + ")");
  }
  std::remove(train_img.c_str());
  std::remove(train_lab.c_str());
  std::remove(test_img.c_str());
  std::remove(test_lab.c_str());
}
