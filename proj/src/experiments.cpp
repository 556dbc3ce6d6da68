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

#include "otafl/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "otafl/power.hpp"

namespace otafl {

namespace {

constexpr std::uint64_t kDataStream = 0xDA7A;
constexpr std::uint64_t kRealizationStream = 0x100;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::runtime_error("config:" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, int line) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) fail(line, "trailing characters in number '" + v + "'");
    return x;
  } catch (const std::invalid_argument&) {
    fail(line, "expected a number, got '" + v + "'");
  }
}

int parse_int(const std::string& v, int line) {
  const double x = parse_double(v, line);
  if (x != std::floor(x)) fail(line, "expected an integer, got '" + v + "'");
  return static_cast<int>(x);
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(line, "expected a boolean, got '" + v + "'");
}

void validate(const ExperimentConfig& cfg) {
  auto bad = [](const std::string& msg) { throw std::runtime_error("config: " + msg); };
  if (!(cfg.epsilon > 0.0)) bad("epsilon must be > 0");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) bad("delta must be in (0,1)");
  if (cfg.num_users < 1) bad("num_users must be >= 1");
  if (cfg.comm_budget < 1) bad("comm_budget must be >= 1");
  if (cfg.d_tot < 1 || cfg.dim < 1) bad("dataset dimensions must be >= 1");
  if (cfg.lambda < 0.0) bad("lambda must be >= 0");
  if (cfg.noise_std < 0.0) bad("noise_std must be >= 0");
  if (cfg.kappa < 0.0) bad("kappa must be >= 0");
  if (cfg.rho < 0.0 || cfg.rho > 1.0) bad("rho must be in [0,1]");
  if (!(cfg.n0 > 0.0)) bad("n0 must be > 0");
  if (!(cfg.w_max > 0.0)) bad("w_max must be > 0");
  if (!(cfg.gamma_hat > 0.0)) bad("gamma_hat must be > 0");
  if (cfg.max_fraction < 0.0 || cfg.max_fraction >= 1.0) bad("max_fraction must be in [0,1)");
  if (cfg.sigma_extra < 0.0) bad("sigma_extra must be >= 0");
  if (cfg.mu < 0.0 || cfg.big_l < 0.0) bad("curvature overrides must be >= 0");
  if ((cfg.mu > 0.0) != (cfg.big_l > 0.0)) bad("mu and l must be set together");
  if (cfg.mu > 0.0 && !(cfg.mu < cfg.big_l)) bad("need mu < l");
  if (cfg.realizations < 1) bad("realizations must be >= 1");
  if (cfg.protocols.empty()) bad("protocols must be nonempty");
  if (cfg.pa_modes.empty()) bad("pa_modes must be nonempty");
  if (cfg.grid.empty()) bad("grid must be nonempty");
  static const std::vector<std::string> axes{"epsilon",     "snr_max",  "max_fraction",
                                            "comm_budget", "num_users", "clip"};
  bool ok = false;
  for (const auto& a : axes) ok = ok || a == cfg.axis;
  if (!ok) bad("unknown axis '" + cfg.axis + "'");
}

Dataset make_dataset(const ExperimentConfig& cfg) {
  Rng rng(mix_seed(cfg.seed, kDataStream));
  return generate_synthetic(cfg.d_tot, cfg.dim, cfg.noise_std, rng);
}

Partition make_partition(const ExperimentConfig& cfg, const Dataset& data) {
  return cfg.max_fraction > 0.0
             ? partition_skewed(data, cfg.num_users, cfg.max_fraction)
             : partition_uniform(data, cfg.num_users);
}

void apply_axis(ExperimentConfig& cfg, double value) {
  if (cfg.axis == "epsilon")
    cfg.epsilon = value;
  else if (cfg.axis == "snr_max")
    cfg.snr_max_db = value;
  else if (cfg.axis == "max_fraction")
    cfg.max_fraction = value;
  else if (cfg.axis == "comm_budget")
    cfg.comm_budget = static_cast<int>(value);
  else if (cfg.axis == "num_users")
    cfg.num_users = static_cast<int>(value);
  else if (cfg.axis == "clip")
    cfg.gamma_hat = value;
  validate(cfg);
}

}  // namespace

Protocol parse_protocol(const std::string& s) {
  if (s == "oma") return Protocol::kOma;
  if (s == "noma") return Protocol::kNoma;
  throw std::runtime_error("config: unknown protocol '" + s + "'");
}

PaMode parse_pa_mode(const std::string& s) {
  if (s == "offline_optimal") return PaMode::kOfflineOptimal;
  if (s == "static") return PaMode::kStatic;
  if (s == "online") return PaMode::kOnline;
  if (s == "no_dp") return PaMode::kNoDp;
  throw std::runtime_error("config: unknown pa_mode '" + s + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (val.empty()) fail(lineno, "empty value for '" + key + "'");
    if (key == "epsilon") cfg.epsilon = parse_double(val, lineno);
    else if (key == "delta") cfg.delta = parse_double(val, lineno);
    else if (key == "snr_max_db") cfg.snr_max_db = parse_double(val, lineno);
    else if (key == "num_users") cfg.num_users = parse_int(val, lineno);
    else if (key == "comm_budget") cfg.comm_budget = parse_int(val, lineno);
    else if (key == "lambda") cfg.lambda = parse_double(val, lineno);
    else if (key == "d_tot") cfg.d_tot = parse_int(val, lineno);
    else if (key == "dim") cfg.dim = parse_int(val, lineno);
    else if (key == "noise_std") cfg.noise_std = parse_double(val, lineno);
    else if (key == "kappa") cfg.kappa = parse_double(val, lineno);
    else if (key == "rho") cfg.rho = parse_double(val, lineno);
    else if (key == "n0") cfg.n0 = parse_double(val, lineno);
    else if (key == "w_max") cfg.w_max = parse_double(val, lineno);
    else if (key == "gamma_hat") cfg.gamma_hat = parse_double(val, lineno);
    else if (key == "max_fraction") cfg.max_fraction = parse_double(val, lineno);
    else if (key == "sigma_extra") cfg.sigma_extra = parse_double(val, lineno);
    else if (key == "mu") cfg.mu = parse_double(val, lineno);
    else if (key == "l") cfg.big_l = parse_double(val, lineno);
    else if (key == "clip") cfg.clip = parse_bool(val, lineno);
    else if (key == "realizations") cfg.realizations = parse_int(val, lineno);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_double(val, lineno));
    else if (key == "axis") cfg.axis = val;
    else if (key == "grid") {
      cfg.grid.clear();
      for (const auto& item : split(val, ',')) cfg.grid.push_back(parse_double(item, lineno));
    } else if (key == "protocols") {
      cfg.protocols.clear();
      for (const auto& item : split(val, ',')) cfg.protocols.push_back(parse_protocol(item));
    } else if (key == "pa_modes") {
      cfg.pa_modes.clear();
      for (const auto& item : split(val, ',')) cfg.pa_modes.push_back(parse_pa_mode(item));
    } else {
      fail(lineno, "unknown key '" + key + "'");
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string emit_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "epsilon = " << fmt(cfg.epsilon) << "\n";
  out << "delta = " << fmt(cfg.delta) << "\n";
  out << "snr_max_db = " << fmt(cfg.snr_max_db) << "\n";
  out << "num_users = " << cfg.num_users << "\n";
  out << "comm_budget = " << cfg.comm_budget << "\n";
  out << "lambda = " << fmt(cfg.lambda) << "\n";
  out << "d_tot = " << cfg.d_tot << "\n";
  out << "dim = " << cfg.dim << "\n";
  out << "noise_std = " << fmt(cfg.noise_std) << "\n";
  out << "kappa = " << fmt(cfg.kappa) << "\n";
  out << "rho = " << fmt(cfg.rho) << "\n";
  out << "n0 = " << fmt(cfg.n0) << "\n";
  out << "w_max = " << fmt(cfg.w_max) << "\n";
  out << "gamma_hat = " << fmt(cfg.gamma_hat) << "\n";
  out << "max_fraction = " << fmt(cfg.max_fraction) << "\n";
  out << "sigma_extra = " << fmt(cfg.sigma_extra) << "\n";
  out << "mu = " << fmt(cfg.mu) << "\n";
  out << "l = " << fmt(cfg.big_l) << "\n";
  out << "clip = " << (cfg.clip ? "true" : "false") << "\n";
  out << "realizations = " << cfg.realizations << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "axis = " << cfg.axis << "\n";
  out << "grid = ";
  for (size_t i = 0; i < cfg.grid.size(); ++i)
    out << (i ? "," : "") << fmt(cfg.grid[i]);
  out << "\n";
  out << "protocols = ";
  for (size_t i = 0; i < cfg.protocols.size(); ++i)
    out << (i ? "," : "") << to_string(cfg.protocols[i]);
  out << "\n";
  out << "pa_modes = ";
  for (size_t i = 0; i < cfg.pa_modes.size(); ++i)
    out << (i ? "," : "") << to_string(cfg.pa_modes[i]);
  out << "\n";
  return out.str();
}

TrainConfig to_train_config(const ExperimentConfig& cfg) {
  TrainConfig t;
  t.protocol = cfg.protocols.front();
  t.pa_mode = cfg.pa_modes.front();
  t.I = cfg.comm_budget;
  t.K = cfg.num_users;
  t.dp = {cfg.epsilon, cfg.delta};
  t.kappa = cfg.kappa;
  t.rho = cfg.rho;
  t.N0 = cfg.n0;
  t.snr_max_db = cfg.snr_max_db;
  t.loss = {LossKind::kRidge, cfg.lambda, 0};
  t.W = cfg.w_max;
  t.gamma_hat = cfg.gamma_hat;
  if (cfg.mu > 0.0) t.curvature_override = CurvatureConstants{cfg.mu, cfg.big_l};
  t.sigma_extra = cfg.sigma_extra;
  t.clip = cfg.clip;
  t.seed = cfg.seed;
  return t;
}

void parallel_for(int n, const std::function<void(int)>& fn, int num_threads) {
  if (n <= 0) return;
  if (num_threads <= 0)
    num_threads = static_cast<int>(std::thread::hardware_concurrency());
  num_threads = std::max(1, std::min(num_threads, n));
  if (num_threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(num_threads);
  for (int i = 0; i < num_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

void run_sweep(const ExperimentConfig& cfg, const std::string& out_path) {
  validate(cfg);
  const Dataset data = make_dataset(cfg);
  const int V = static_cast<int>(cfg.grid.size());
  const int Np = static_cast<int>(cfg.protocols.size());
  const int Nm = static_cast<int>(cfg.pa_modes.size());
  const int R = cfg.realizations;
  const int cells = V * Np * Nm;

  // Per-value configs and partitions (axes num_users / max_fraction change
  // the partition; the dataset is fixed).
  std::vector<ExperimentConfig> value_cfg(V, cfg);
  std::vector<Partition> parts;
  parts.reserve(V);
  for (int vi = 0; vi < V; ++vi) {
    apply_axis(value_cfg[vi], cfg.grid[vi]);
    parts.push_back(make_partition(value_cfg[vi], data));
  }

  std::vector<double> gap(static_cast<size_t>(cells) * R, 0.0);
  parallel_for(cells * R, [&](int job) {
    const int r = job % R;
    const int cell = job / R;
    const int mi = cell % Nm;
    const int pi = (cell / Nm) % Np;
    const int vi = cell / (Nm * Np);
    TrainConfig tc = to_train_config(value_cfg[vi]);
    tc.protocol = cfg.protocols[pi];
    tc.pa_mode = cfg.pa_modes[mi];
    // Common random numbers across cells: realization r reuses one substream.
    tc.seed = mix_seed(cfg.seed, kRealizationStream + r);
    gap[static_cast<size_t>(cell) * R + r] = run(tc, data, parts[vi]).final_gap;
  });

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("sweep: cannot open " + out_path);
  out << "axis,value,protocol,pa_mode,metric_mean,metric_stderr,realizations,seed\n";
  for (int cell = 0; cell < cells; ++cell) {
    const int mi = cell % Nm;
    const int pi = (cell / Nm) % Np;
    const int vi = cell / (Nm * Np);
    double mean = 0.0;
    for (int r = 0; r < R; ++r) mean += gap[static_cast<size_t>(cell) * R + r];
    mean /= R;
    double var = 0.0;
    for (int r = 0; r < R; ++r) {
      const double d = gap[static_cast<size_t>(cell) * R + r] - mean;
      var += d * d;
    }
    const double stderr_ = R > 1 ? std::sqrt(var / (R - 1.0) / R) : 0.0;
    out << cfg.axis << ',' << fmt(cfg.grid[vi]) << ','
        << to_string(cfg.protocols[pi]) << ',' << to_string(cfg.pa_modes[mi]) << ','
        << fmt(mean) << ',' << fmt(stderr_) << ',' << R << ',' << cfg.seed << "\n";
  }
  if (!out) throw std::runtime_error("sweep: write failed for " + out_path);
}

MetricsTrace run_single(const ExperimentConfig& cfg, const std::string& out_path) {
  validate(cfg);
  const Dataset data = make_dataset(cfg);
  const Partition part = make_partition(cfg, data);
  TrainConfig tc = to_train_config(cfg);
  tc.seed = mix_seed(cfg.seed, kRealizationStream);
  MetricsTrace trace = run(tc, data, part);
  if (!out_path.empty()) dump_trace(trace, out_path);
  return trace;
}

ThresholdReport threshold_report(const ExperimentConfig& cfg) {
  validate(cfg);
  const Dataset data = make_dataset(cfg);
  const Partition part = make_partition(cfg, data);
  const GradientBounds ob = offline_bounds(data, part, cfg.lambda, cfg.w_max);
  const int K = part.num_devices();
  const int dim = cfg.dim;
  const double P = std::pow(10.0, cfg.snr_max_db / 10.0) * dim * cfg.n0;
  if (cfg.comm_budget % K != 0)
    throw std::runtime_error("threshold: OMA requires num_users | comm_budget");
  const int T_oma = cfg.comm_budget / K;
  const int T_noma = cfg.comm_budget;

  // Unit channel gains: the per-step LHS term is 2 P gamma^2 / (N0 (D_k G_k)^2);
  // the binding device is the one with the smallest D_k G_k.
  double min_dg = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k)
    min_dg = std::min(min_dg, part.shards[k].size() * ob.G[k]);
  const double step_term = 2.0 * P * ob.gamma * ob.gamma / (cfg.n0 * min_dg * min_dg);

  ThresholdReport rep;
  rep.lhs_oma = T_oma * step_term;
  rep.lhs_noma = T_noma * step_term;
  auto solve_eps = [&](double lhs) {
    if (!(lhs > 0.0)) return 0.0;
    auto f = [&](double eps) { return r_dp({eps, cfg.delta}) - lhs; };
    double hi = 1.0;
    for (int i = 0; i < 400 && f(hi) < 0.0; ++i) hi *= 2.0;
    return bisect(f, {1e-12, hi, 1e-10 * hi, 200});
  };
  rep.eps_oma = solve_eps(rep.lhs_oma);
  rep.eps_noma = solve_eps(rep.lhs_noma);
  return rep;
}

}  // namespace otafl
