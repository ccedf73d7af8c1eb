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
#include <optional>

#include "gpqe/embedding.hpp"
#include "gpqe/quantizer.hpp"

namespace gpqe {

struct FidelityReport {
  double rmse = 0.0;
  // Mean over rows of cos(original_w, reconstructed_w). A pair of zero rows
  // counts as 1, a single zero row as 0.
  double mean_cosine = 0.0;
  // Mean over words of |top-k(original) ∩ top-k(reconstructed)| / k, using
  // cosine neighbours, excluding the word itself, ties to the lower row.
  double nn_overlap_at_k = 0.0;
  std::size_t k = 0;
  std::optional<SizeReport> size;
};

// Throws DataError on a shape mismatch or k outside [1, rows).
FidelityReport fidelity(const EmbeddingMatrix& original,
                        const EmbeddingMatrix& reconstructed, std::size_t k);

// Row indices of the k nearest cosine neighbours of `row`, most similar first.
std::vector<std::size_t> cosine_top_k(const EmbeddingMatrix& matrix,
                                      std::size_t row, std::size_t k);

}  // namespace gpqe
