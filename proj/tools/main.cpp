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

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "otafl/experiments.hpp"
#include "otafl/mnist.hpp"
#include "otafl/trainer.hpp"

namespace {

otafl::ExperimentConfig load_experiment_config(const std::string& config_path,
                                               std::uint64_t* seed, int* realizations) {
  otafl::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = otafl::parse_config(config_path);
  if (seed) cfg.seed = *seed;
  if (realizations) cfg.realizations = *realizations;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private federated learning over fading channels"};
  app.require_subcommand(1);

  std::string config_path, out_path, trace_path;
  std::uint64_t seed = 0;
  int realizations = 0;

  auto* run_cmd = app.add_subcommand("run", "Single realization; dumps the privacy trace");
  run_cmd->add_option("--config", config_path, "Configuration file");
  auto* run_seed = run_cmd->add_option("--seed", seed, "Master seed");
  run_cmd->add_option("--out", out_path, "Trace CSV output path");

  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep along the config axis");
  sweep_cmd->add_option("--config", config_path, "Configuration file");
  auto* sweep_seed = sweep_cmd->add_option("--seed", seed, "Master seed");
  auto* sweep_real = sweep_cmd->add_option("--realizations", realizations,
                                           "Realizations per sweep point");
  sweep_cmd->add_option("--out", out_path, "CSV output path")->required();

  auto* thr_cmd = app.add_subcommand("threshold", "Free-privacy epsilon thresholds");
  thr_cmd->add_option("--config", config_path, "Configuration file");
  auto* thr_seed = thr_cmd->add_option("--seed", seed, "Master seed");

  auto* verify_cmd = app.add_subcommand("verify", "Post-hoc DP audit of a trace file");
  verify_cmd->add_option("trace", trace_path, "Trace CSV produced by `run`")->required();

  auto* mnist_cmd = app.add_subcommand("mnist", "Digit-classification study");
  otafl::MnistConfig mcfg;
  bool synthetic = false;
  mnist_cmd->add_option("--images", mcfg.train_images, "Training images (IDX)");
  mnist_cmd->add_option("--labels", mcfg.train_labels, "Training labels (IDX)");
  mnist_cmd->add_option("--test-images", mcfg.test_images, "Test images (IDX)");
  mnist_cmd->add_option("--test-labels", mcfg.test_labels, "Test labels (IDX)");
  mnist_cmd->add_flag("--synthetic", synthetic,
                      "Generate a synthetic digit fixture instead of loading files");
  mnist_cmd->add_option("--subset", mcfg.subset, "Training subset size");
  std::vector<int> grid;
  mnist_cmd->add_option("--grid", grid, "Block-budget grid (space separated)");
  auto* mnist_seed = mnist_cmd->add_option("--seed", mcfg.seed, "Master seed");
  auto* mnist_real =
      mnist_cmd->add_option("--realizations", mcfg.realizations, "Realizations per point");
  mnist_cmd->add_option("--out", out_path, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      auto cfg = load_experiment_config(config_path, run_seed->count() ? &seed : nullptr,
                                        nullptr);
      const otafl::MetricsTrace trace = otafl::run_single(cfg, out_path);
      std::printf("iterations=%d final_loss=%.6g final_gap=%.6g bound=%.6g budget=%.6g\n",
                  trace.T, trace.final_loss, trace.final_gap, trace.bound, trace.budget);
    } else if (*sweep_cmd) {
      auto cfg = load_experiment_config(config_path, sweep_seed->count() ? &seed : nullptr,
                                        sweep_real->count() ? &realizations : nullptr);
      otafl::run_sweep(cfg, out_path);
      std::printf("wrote %s\n", out_path.c_str());
    } else if (*thr_cmd) {
      auto cfg = load_experiment_config(config_path, thr_seed->count() ? &seed : nullptr,
                                        nullptr);
      const otafl::ThresholdReport rep = otafl::threshold_report(cfg);
      std::printf("oma_lhs=%.6g oma_epsilon=%.6g\n", rep.lhs_oma, rep.eps_oma);
      std::printf("noma_lhs=%.6g noma_epsilon=%.6g\n", rep.lhs_noma, rep.eps_noma);
    } else if (*verify_cmd) {
      const otafl::TraceAudit audit = otafl::verify_trace(trace_path);
      std::printf("consistent=%s satisfied=%s worst_slack=%.6g detail=%s\n",
                  audit.consistent ? "yes" : "no", audit.satisfied ? "yes" : "no",
                  audit.worst_slack, audit.detail.c_str());
      if (!audit.consistent || !audit.satisfied) return 1;
    } else if (*mnist_cmd) {
      (void)mnist_seed;
      (void)mnist_real;
      if (!grid.empty()) mcfg.I_grid = grid;
      if (synthetic) {
        mcfg.train_images = "mnist_train_images.idx";
        mcfg.train_labels = "mnist_train_labels.idx";
        mcfg.test_images = "mnist_test_images.idx";
        mcfg.test_labels = "mnist_test_labels.idx";
        otafl::write_synthetic_digits(mcfg.train_images, mcfg.train_labels, mcfg.subset,
                                      mcfg.seed);
        otafl::write_synthetic_digits(mcfg.test_images, mcfg.test_labels,
                                      mcfg.test_subset, mcfg.seed + 1);
      }
      const auto points = otafl::run_mnist(mcfg, out_path);
      for (const auto& p : points)
        std::printf("I=%d pa_mode=%s train_loss=%.4f test_error=%.4f\n", p.I,
                    otafl::to_string(p.pa_mode).c_str(), p.train_loss_mean,
                    p.test_error_mean);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
