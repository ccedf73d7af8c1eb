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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gpqe/embedding.hpp"
#include "gpqe/quantizer.hpp"

namespace gpqe {

struct RweConfig {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> projection_dim;
};

// Random word embeddings: i.i.d. standard normal entries, each row scaled to
// unit L2 norm. Depends only on (rows, cols, seed).
EmbeddingMatrix rwe_generate(const RweConfig& config);

// n x m matrix, Glorot-uniform in [-sqrt(6/(n+m)), sqrt(6/(n+m))], row-major.
std::vector<float> projection_init(std::size_t n, std::size_t m,
                                   std::uint64_t seed);

// Parameter accounting for an RWE table: the two parameters of the shared
// Gaussian plus n*m for the optional projection. No integer parameters.
SizeReport rwe_size_report(const RweConfig& config);

}  // namespace gpqe
