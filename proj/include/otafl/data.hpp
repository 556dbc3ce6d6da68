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

#ifndef OTAFL_DATA_HPP
#define OTAFL_DATA_HPP

#include <span>
#include <string>
#include <vector>

#include "otafl/numerics.hpp"

namespace otafl {

// Covariates stored row-major (D_tot x d).  Labels are real for regression or
// class indices 0..C-1 for classification.
struct Dataset {
  std::vector<double> U;
  std::vector<double> v;
  int d = 0;
  int D_tot = 0;

  std::span<const double> row(int i) const {
    return {U.data() + static_cast<size_t>(i) * d, static_cast<size_t>(d)};
  }
};

// Disjoint index sets covering 0..D_tot-1.
struct Partition {
  std::vector<std::vector<int>> shards;

  int num_devices() const { return static_cast<int>(shards.size()); }
  int shard_size(int k) const { return static_cast<int>(shards[k].size()); }
};

// Rows i.i.d. N(0, I_d); label v = u(2) + 3*u(5) + noise_std * z with the
// entry indices 1-based as stored (internally columns 1 and 4).
Dataset generate_synthetic(int D_tot, int d, double noise_std, Rng& rng);

// K shards of near-equal size (first D_tot % K shards get the extra sample).
Partition partition_uniform(const Dataset& data, int K);

// Shard 0 takes ceil(max_fraction * D_tot) samples; the rest is split evenly
// across the remaining K-1 devices.
Partition partition_skewed(const Dataset& data, int K, double max_fraction);

// IDX-format reader (big-endian).  Pixels scaled to [0,1], each image
// flattened and extended with a trailing bias entry 1.0.  limit > 0 keeps the
// first `limit` samples in file order.
Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 int limit = -1);

// IDX writer, for fixtures and for exporting generated data.
void save_idx(const Dataset& data, int rows, int cols,
              const std::string& images_path, const std::string& labels_path);

// CSV round-trip for synthetic datasets: header row, one sample per line,
// label last.
void save_csv(const Dataset& data, const std::string& path);
Dataset load_csv(const std::string& path);

}  // namespace otafl

#endif  // OTAFL_DATA_HPP
