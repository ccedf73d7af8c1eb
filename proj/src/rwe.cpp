// Copyright 2026 The gpqe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gpqe/rwe.hpp"

#include <cmath>

#include "gpqe/errors.hpp"
#include "gpqe/random.hpp"

namespace gpqe {

namespace {

void check_config(const RweConfig& config) {
  if (config.rows == 0 || config.cols == 0) {
    throw DataError("RWE rows and cols must be at least 1");
  }
  if (config.projection_dim && *config.projection_dim == 0) {
    throw DataError("projection dimension must be at least 1");
  }
}

}  // namespace

EmbeddingMatrix rwe_generate(const RweConfig& config) {
  check_config(config);
  SplitMix64 rng(config.seed);
  std::vector<float> values(config.rows * config.cols);
  std::vector<double> row(config.cols);
  for (std::size_t i = 0; i < config.rows; ++i) {
    double norm_sq = 0.0;
    do {
      norm_sq = 0.0;
      for (auto& v : row) {
        v = rng.normal();
        norm_sq += v * v;
      }
    } while (norm_sq == 0.0);
    const double inv_norm = 1.0 / std::sqrt(norm_sq);
    for (std::size_t j = 0; j < config.cols; ++j) {
      values[i * config.cols + j] = static_cast<float>(row[j] * inv_norm);
    }
  }
  return EmbeddingMatrix(config.rows, config.cols, std::move(values));
}

std::vector<float> projection_init(std::size_t n, std::size_t m,
                                   std::uint64_t seed) {
  if (n == 0 || m == 0) throw DataError("projection shape must be positive");
  const double bound = std::sqrt(6.0 / static_cast<double>(n + m));
  SplitMix64 rng(seed);
  std::vector<float> w(n * m);
  for (auto& v : w) {
    v = static_cast<float>(bound * (2.0 * rng.uniform() - 1.0));
  }
  return w;
}

SizeReport rwe_size_report(const RweConfig& config) {
  check_config(config);
  SizeReport r;
  r.float_params = 2;
  if (config.projection_dim) r.float_params += config.cols * *config.projection_dim;
  r.int_params = 0;
  r.storable_bits = r.float_params * kFloatBits;
  r.theoretical_bits = static_cast<double>(r.storable_bits);
  r.baseline_bits = config.rows * config.cols * kFloatBits;
  r.compression_ratio =
      static_cast<double>(r.baseline_bits) / static_cast<double>(r.storable_bits);
  return r;
}

}  // namespace gpqe
