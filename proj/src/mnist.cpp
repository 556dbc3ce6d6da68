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

#include "otafl/mnist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "otafl/experiments.hpp"

namespace otafl {

namespace {

constexpr int kNumClasses = 10;
constexpr int kImageSide = 28;
constexpr std::uint64_t kRealizationStream = 0x200;

struct Stats {
  double mean = 0.0;
  double stderr_ = 0.0;
};

Stats summarize(const std::vector<double>& xs) {
  Stats s;
  for (double x : xs) s.mean += x;
  s.mean /= xs.size();
  if (xs.size() > 1) {
    double var = 0.0;
    for (double x : xs) var += (x - s.mean) * (x - s.mean);
    s.stderr_ = std::sqrt(var / (xs.size() - 1.0) / xs.size());
  }
  return s;
}

}  // namespace

double test_error(const LossSpec& spec, std::span<const double> w, const Dataset& data) {
  if (spec.kind != LossKind::kMultinomialLogistic)
    throw std::invalid_argument("test_error: logistic loss expected");
  const int d = data.d;
  int wrong = 0;
  for (int i = 0; i < data.D_tot; ++i) {
    const auto u = data.row(i);
    int best = 0;
    double best_score = -1e300;
    for (int c = 0; c < spec.num_classes; ++c) {
      const double s = dot(w.subspan(static_cast<size_t>(c) * d, d), u);
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    if (best != static_cast<int>(data.v[i])) ++wrong;
  }
  return static_cast<double>(wrong) / data.D_tot;
}

std::vector<MnistPoint> run_mnist(const MnistConfig& cfg, const std::string& out_path) {
  if (cfg.subset < 1 || cfg.subset > 60000)
    throw std::invalid_argument("mnist: subset must be in [1, 60000]");
  const Dataset train = load_idx(cfg.train_images, cfg.train_labels, cfg.subset);
  const Dataset test = load_idx(cfg.test_images, cfg.test_labels, cfg.test_subset);
  if (test.d != train.d) throw std::runtime_error("mnist: train/test dimension mismatch");
  const LossSpec spec{LossKind::kMultinomialLogistic, cfg.lambda, kNumClasses};
  const Partition part = partition_uniform(train, cfg.K);

  std::vector<MnistPoint> points;
  for (int I : cfg.I_grid) {
    for (PaMode mode : cfg.pa_modes) {
      std::vector<double> losses(cfg.realizations), errors(cfg.realizations);
      parallel_for(cfg.realizations, [&](int r) {
        TrainConfig tc;
        tc.protocol = cfg.protocol;
        tc.pa_mode = mode;
        tc.I = I;
        tc.K = cfg.K;
        tc.dp = cfg.dp;
        tc.kappa = cfg.kappa;
        tc.rho = cfg.rho;
        tc.snr_max_db = cfg.snr_max_db;
        tc.loss = spec;
        tc.W = cfg.W;
        tc.gamma_hat = cfg.gamma_hat;
        tc.curvature_override = CurvatureConstants{cfg.mu, cfg.L};
        tc.clip = true;  // gradient bounds are unknowable for image data
        tc.seed = mix_seed(cfg.seed, kRealizationStream + r);
        const MetricsTrace trace = run(tc, train, part);
        losses[r] = trace.final_loss;
        errors[r] = test_error(spec, trace.w_final, test);
      });
      MnistPoint p;
      p.I = I;
      p.pa_mode = mode;
      const Stats sl = summarize(losses);
      const Stats se = summarize(errors);
      p.train_loss_mean = sl.mean;
      p.train_loss_stderr = sl.stderr_;
      p.test_error_mean = se.mean;
      p.test_error_stderr = se.stderr_;
      points.push_back(p);
    }
  }

  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("mnist: cannot open " + out_path);
    out << "axis,value,protocol,pa_mode,metric_mean,metric_stderr,realizations,seed\n";
    char buf[256];
    for (const MnistPoint& p : points) {
      std::snprintf(buf, sizeof buf, "train_loss,%d,%s,%s,%.17g,%.17g,%d,%llu\n", p.I,
                    to_string(cfg.protocol).c_str(), to_string(p.pa_mode).c_str(),
                    p.train_loss_mean, p.train_loss_stderr, cfg.realizations,
                    static_cast<unsigned long long>(cfg.seed));
      out << buf;
      std::snprintf(buf, sizeof buf, "test_error,%d,%s,%s,%.17g,%.17g,%d,%llu\n", p.I,
                    to_string(cfg.protocol).c_str(), to_string(p.pa_mode).c_str(),
                    p.test_error_mean, p.test_error_stderr, cfg.realizations,
                    static_cast<unsigned long long>(cfg.seed));
      out << buf;
    }
  }
  return points;
}

void write_synthetic_digits(const std::string& images_path,
                            const std::string& labels_path, int count,
                            std::uint64_t seed) {
  const int pixels = kImageSide * kImageSide;
  // Fixed class templates, independent of `seed` so that train and test files
  // share the same class structure.
  std::vector<std::vector<double>> templates(kNumClasses, std::vector<double>(pixels));
  Rng template_rng(mix_seed(0xD161735, 0));
  for (int c = 0; c < kNumClasses; ++c)
    for (int j = 0; j < pixels; ++j)
      templates[c][j] = std::max(0.0, template_rng.gauss(0.1, 0.3));

  Dataset data;
  data.d = pixels + 1;
  data.D_tot = count;
  data.U.resize(static_cast<size_t>(count) * data.d);
  data.v.resize(count);
  Rng rng(mix_seed(seed, 0xD161));
  for (int i = 0; i < count; ++i) {
    const int c = i % kNumClasses;
    double* u = data.U.data() + static_cast<size_t>(i) * data.d;
    for (int j = 0; j < pixels; ++j)
      u[j] = std::clamp(templates[c][j] + rng.gauss(0.0, 0.15), 0.0, 1.0);
    u[pixels] = 1.0;
    data.v[i] = c;
  }
  save_idx(data, kImageSide, kImageSide, images_path, labels_path);
}

}  // namespace otafl
