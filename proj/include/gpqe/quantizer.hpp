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
#include <string>
#include <vector>

#include "gpqe/embedding.hpp"
#include "gpqe/kmeans.hpp"

namespace gpqe {

// Bits used to store one floating-point parameter.
inline constexpr std::uint64_t kFloatBits = 32;

enum class PartitionKind : std::uint8_t { kStructured, kUnified };

struct PartitionScheme {
  PartitionKind kind = PartitionKind::kStructured;
  std::size_t groups = 1;

  friend bool operator==(const PartitionScheme&, const PartitionScheme&) = default;
};

// Splits `matrix` into column groups of width n/g. Structured returns the g
// blocks in column order; Unified returns one (g*|V|) x (n/g) matrix with the
// blocks stacked along rows in group order. Throws DataError unless g divides
// n.
std::vector<EmbeddingMatrix> partition(const EmbeddingMatrix& matrix,
                                       const PartitionScheme& scheme);

// Index matrix plus codebook(s) of a product-quantized embedding. When
// `codebook_vars` is present each codebook row is a diagonal Gaussian
// (mean, per-dimension variance).
struct QuantizedEmbedding {
  PartitionScheme scheme;
  std::size_t rows = 0;      // |V|
  std::size_t cols = 0;      // n
  std::size_t clusters = 0;  // c
  // rows x groups, row-major; entries in [0, clusters).
  std::vector<std::uint32_t> index_matrix;
  // Structured: groups blocks of clusters x (cols/groups), in group order.
  // Unified: a single clusters x (cols/groups) block.
  std::vector<float> codebook_means;
  std::optional<std::vector<float>> codebook_vars;
  std::uint64_t seed = 0;
  std::optional<std::vector<std::string>> vocab;

  std::size_t group_width() const { return cols / scheme.groups; }
  std::size_t codebook_blocks() const {
    return scheme.kind == PartitionKind::kStructured ? scheme.groups : 1;
  }
  // Number of distinct clusters (Gaussians, for GPQ) across all codebooks.
  std::size_t total_clusters() const { return clusters * codebook_blocks(); }
  std::size_t codebook_size() const {
    return codebook_blocks() * clusters * group_width();
  }
  std::uint32_t index(std::size_t word, std::size_t group) const {
    return index_matrix[word * scheme.groups + group];
  }

  // Throws DataError if any structural invariant is violated.
  void validate() const;

  friend bool operator==(const QuantizedEmbedding&, const QuantizedEmbedding&) = default;
};

struct CompressOptions {
  std::uint64_t seed = 0;
  std::size_t restarts = 1;
  KMeansOptions kmeans;
};

QuantizedEmbedding pq_compress(const EmbeddingMatrix& matrix,
                               const PartitionScheme& scheme,
                               std::size_t clusters,
                               const CompressOptions& options = {});

// Same clustering as pq_compress; also records each cluster's per-dimension
// variance.
QuantizedEmbedding gpq_compress(const EmbeddingMatrix& matrix,
                                const PartitionScheme& scheme,
                                std::size_t clusters,
                                const CompressOptions& options = {});

enum class ReconstructMode : std::uint8_t { kMean, kSample };

// Mean: look up every sub-vector's centroid. Sample: first draw a codebook
// with each entry ~ Normal(mean, variance) from `seed`, then look up in it.
EmbeddingMatrix reconstruct(const QuantizedEmbedding& q, ReconstructMode mode,
                            std::uint64_t seed = 0);

// The codebook used by Sample-mode reconstruction.
std::vector<float> sample_codebook(const QuantizedEmbedding& q,
                                   std::uint64_t seed);

struct SizeReport {
  double theoretical_bits = 0.0;   // log2(c) bits per index
  std::uint64_t storable_bits = 0;  // ceil(log2 c) bits per index, byte padded
  std::uint64_t float_params = 0;
  std::uint64_t int_params = 0;
  std::uint64_t baseline_bits = 0;  // |V| * n * 32
  double compression_ratio = 0.0;   // baseline_bits / storable_bits

  friend bool operator==(const SizeReport&, const SizeReport&) = default;
};

// Shape-only description of a quantized embedding, enough to account sizes
// without running any clustering.
struct SizeConfig {
  std::size_t rows = 0;
  std::size_t cols = 0;
  PartitionScheme scheme;
  std::size_t clusters = 1;
  bool gaussian = false;
};

// ceil(log2(clusters)); 0 for a single cluster.
unsigned index_bit_width(std::size_t clusters);

SizeReport size_report(const SizeConfig& config);
SizeReport size_report(const QuantizedEmbedding& q);

// Bytes to mebibytes (2^20).
inline double to_mib(double bytes) { return bytes / 1048576.0; }

}  // namespace gpqe
