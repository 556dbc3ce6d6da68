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

#include "otafl/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace otafl {

namespace {

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const std::string& what) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("idx: truncated file while reading " + what);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_be32(std::ostream& out, std::uint32_t x) {
  unsigned char b[4] = {static_cast<unsigned char>(x >> 24),
                        static_cast<unsigned char>(x >> 16),
                        static_cast<unsigned char>(x >> 8),
                        static_cast<unsigned char>(x)};
  out.write(reinterpret_cast<char*>(b), 4);
}

}  // namespace

Dataset generate_synthetic(int D_tot, int d, double noise_std, Rng& rng) {
  if (D_tot < 1) throw std::invalid_argument("generate_synthetic: D_tot must be >= 1");
  if (d < 5) throw std::invalid_argument("generate_synthetic: d must be >= 5");
  Dataset data;
  data.d = d;
  data.D_tot = D_tot;
  data.U.resize(static_cast<size_t>(D_tot) * d);
  data.v.resize(D_tot);
  for (int i = 0; i < D_tot; ++i) {
    double* u = data.U.data() + static_cast<size_t>(i) * d;
    for (int j = 0; j < d; ++j) u[j] = rng.gauss();
    data.v[i] = u[1] + 3.0 * u[4] + noise_std * rng.gauss();
  }
  return data;
}

Partition partition_uniform(const Dataset& data, int K) {
  if (K < 1 || K > data.D_tot)
    throw std::invalid_argument("partition_uniform: need 1 <= K <= D_tot");
  Partition part;
  part.shards.resize(K);
  const int base = data.D_tot / K;
  const int extra = data.D_tot % K;
  int idx = 0;
  for (int k = 0; k < K; ++k) {
    const int size = base + (k < extra ? 1 : 0);
    part.shards[k].reserve(size);
    for (int j = 0; j < size; ++j) part.shards[k].push_back(idx++);
  }
  return part;
}

Partition partition_skewed(const Dataset& data, int K, double max_fraction) {
  if (K < 2) throw std::invalid_argument("partition_skewed: need K >= 2");
  if (max_fraction < 1.0 / K || max_fraction >= 1.0)
    throw std::invalid_argument("partition_skewed: max_fraction must be in [1/K, 1)");
  const int big = static_cast<int>(std::ceil(max_fraction * data.D_tot));
  const int rest = data.D_tot - big;
  if (rest < K - 1)
    throw std::invalid_argument("partition_skewed: fraction leaves some devices empty");
  Partition part;
  part.shards.resize(K);
  int idx = 0;
  part.shards[0].reserve(big);
  for (int j = 0; j < big; ++j) part.shards[0].push_back(idx++);
  const int base = rest / (K - 1);
  const int extra = rest % (K - 1);
  for (int k = 1; k < K; ++k) {
    const int size = base + (k - 1 < extra ? 1 : 0);
    part.shards[k].reserve(size);
    for (int j = 0; j < size; ++j) part.shards[k].push_back(idx++);
  }
  return part;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 int limit) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw std::runtime_error("idx: cannot open " + images_path);
  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw std::runtime_error("idx: cannot open " + labels_path);

  if (read_be32(img, "images magic") != kIdxImagesMagic)
    throw std::runtime_error("idx: bad magic in " + images_path);
  const int n_img = static_cast<int>(read_be32(img, "image count"));
  const int rows = static_cast<int>(read_be32(img, "rows"));
  const int cols = static_cast<int>(read_be32(img, "cols"));

  if (read_be32(lab, "labels magic") != kIdxLabelsMagic)
    throw std::runtime_error("idx: bad magic in " + labels_path);
  const int n_lab = static_cast<int>(read_be32(lab, "label count"));
  if (n_img != n_lab) throw std::runtime_error("idx: image/label count mismatch");

  int n = n_img;
  if (limit > 0) n = std::min(n, limit);
  const int pixels = rows * cols;

  Dataset data;
  data.d = pixels + 1;  // trailing bias entry
  data.D_tot = n;
  data.U.resize(static_cast<size_t>(n) * data.d);
  data.v.resize(n);

  std::vector<unsigned char> buf(pixels);
  for (int i = 0; i < n; ++i) {
    img.read(reinterpret_cast<char*>(buf.data()), pixels);
    if (!img) throw std::runtime_error("idx: truncated image data in " + images_path);
    double* u = data.U.data() + static_cast<size_t>(i) * data.d;
    for (int j = 0; j < pixels; ++j) u[j] = buf[j] / 255.0;
    u[pixels] = 1.0;
    unsigned char label;
    lab.read(reinterpret_cast<char*>(&label), 1);
    if (!lab) throw std::runtime_error("idx: truncated label data in " + labels_path);
    if (label > 9) throw std::runtime_error("idx: label out of range");
    data.v[i] = static_cast<double>(label);
  }
  return data;
}

void save_idx(const Dataset& data, int rows, int cols,
              const std::string& images_path, const std::string& labels_path) {
  const int pixels = rows * cols;
  if (data.d != pixels + 1)
    throw std::invalid_argument("save_idx: dataset dimension does not match rows*cols+1");
  std::ofstream img(images_path, std::ios::binary);
  std::ofstream lab(labels_path, std::ios::binary);
  if (!img || !lab) throw std::runtime_error("save_idx: cannot open output files");
  write_be32(img, kIdxImagesMagic);
  write_be32(img, static_cast<std::uint32_t>(data.D_tot));
  write_be32(img, static_cast<std::uint32_t>(rows));
  write_be32(img, static_cast<std::uint32_t>(cols));
  write_be32(lab, kIdxLabelsMagic);
  write_be32(lab, static_cast<std::uint32_t>(data.D_tot));
  for (int i = 0; i < data.D_tot; ++i) {
    const double* u = data.U.data() + static_cast<size_t>(i) * data.d;
    for (int j = 0; j < pixels; ++j) {
      const double q = std::clamp(u[j], 0.0, 1.0) * 255.0;
      const unsigned char byte = static_cast<unsigned char>(std::lround(q));
      img.write(reinterpret_cast<const char*>(&byte), 1);
    }
    const unsigned char label = static_cast<unsigned char>(data.v[i]);
    lab.write(reinterpret_cast<const char*>(&label), 1);
  }
}

void save_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv: cannot open " + path);
  out.precision(17);
  for (int j = 0; j < data.d; ++j) out << "u" << j + 1 << ",";
  out << "v\n";
  for (int i = 0; i < data.D_tot; ++i) {
    const double* u = data.U.data() + static_cast<size_t>(i) * data.d;
    for (int j = 0; j < data.d; ++j) out << u[j] << ",";
    out << data.v[i] << "\n";
  }
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_csv: empty file");
  int d = static_cast<int>(std::count(line.begin(), line.end(), ',')) ;
  Dataset data;
  data.d = d;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<int>(vals.size()) != d + 1)
      throw std::runtime_error("load_csv: inconsistent column count");
    data.U.insert(data.U.end(), vals.begin(), vals.end() - 1);
    data.v.push_back(vals.back());
  }
  data.D_tot = static_cast<int>(data.v.size());
  return data;
}

}  // namespace otafl
