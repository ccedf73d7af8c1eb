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

#include "gpqe/quantizer.hpp"

#include <cmath>
#include <string>

#include "gpqe/errors.hpp"
#include "gpqe/random.hpp"

namespace gpqe {

namespace {

void check_scheme(std::size_t cols, const PartitionScheme& scheme) {
  if (scheme.groups == 0 || cols % scheme.groups != 0) {
    throw DataError("group count " + std::to_string(scheme.groups) +
                    " does not divide embedding dimension " +
                    std::to_string(cols));
  }
}

QuantizedEmbedding compress(const EmbeddingMatrix& matrix,
                            const PartitionScheme& scheme, std::size_t clusters,
                            const CompressOptions& options, bool gaussian) {
  check_scheme(matrix.cols(), scheme);
  const std::size_t rows = matrix.rows();
  const std::size_t groups = scheme.groups;
  const std::size_t width = matrix.cols() / groups;
  const std::size_t points = scheme.kind == PartitionKind::kStructured
                                 ? rows
                                 : rows * groups;
  if (clusters == 0 || clusters > points) {
    throw DataError("cluster count " + std::to_string(clusters) +
                    " exceeds point count " + std::to_string(points));
  }

  QuantizedEmbedding q;
  q.scheme = scheme;
  q.rows = rows;
  q.cols = matrix.cols();
  q.clusters = clusters;
  q.seed = options.seed;
  q.vocab = matrix.vocab();
  q.index_matrix.assign(rows * groups, 0);
  q.codebook_means.reserve(q.codebook_size());
  if (gaussian) q.codebook_vars.emplace().reserve(q.codebook_size());

  auto append_codebook = [&](const ClusterResult& result) {
    for (double v : result.centroids) q.codebook_means.push_back(static_cast<float>(v));
    if (gaussian) {
      for (double v : result.variances) q.codebook_vars->push_back(static_cast<float>(v));
    }
  };

  const auto blocks = partition(matrix, scheme);
  if (scheme.kind == PartitionKind::kStructured) {
    for (std::size_t g = 0; g < groups; ++g) {
      const auto result =
          kmeans_best_of(blocks[g].values(), width, clusters,
                         derive_seed(options.seed, g), options.restarts,
                         options.kmeans);
      for (std::size_t w = 0; w < rows; ++w) {
        q.index_matrix[w * groups + g] = result.assignments[w];
      }
      append_codebook(result);
    }
  } else {
    const auto result =
        kmeans_best_of(blocks.front().values(), width, clusters,
                       derive_seed(options.seed, 0), options.restarts,
                       options.kmeans);
    for (std::size_t g = 0; g < groups; ++g) {
      for (std::size_t w = 0; w < rows; ++w) {
        q.index_matrix[w * groups + g] = result.assignments[g * rows + w];
      }
    }
    append_codebook(result);
  }
  return q;
}

}  // namespace

std::vector<EmbeddingMatrix> partition(const EmbeddingMatrix& matrix,
                                       const PartitionScheme& scheme) {
  check_scheme(matrix.cols(), scheme);
  const std::size_t rows = matrix.rows();
  const std::size_t groups = scheme.groups;
  const std::size_t width = matrix.cols() / groups;

  std::vector<std::vector<float>> blocks(groups, std::vector<float>());
  for (std::size_t g = 0; g < groups; ++g) {
    blocks[g].reserve(rows * width);
    for (std::size_t w = 0; w < rows; ++w) {
      const auto sub = matrix.row(w).subspan(g * width, width);
      blocks[g].insert(blocks[g].end(), sub.begin(), sub.end());
    }
  }

  std::vector<EmbeddingMatrix> out;
  if (scheme.kind == PartitionKind::kStructured) {
    out.reserve(groups);
    for (auto& block : blocks) out.emplace_back(rows, width, std::move(block));
  } else {
    std::vector<float> stacked;
    stacked.reserve(rows * matrix.cols());
    for (const auto& block : blocks) {
      stacked.insert(stacked.end(), block.begin(), block.end());
    }
    out.emplace_back(rows * groups, width, std::move(stacked));
  }
  return out;
}

void QuantizedEmbedding::validate() const {
  if (rows == 0 || cols == 0) throw DataError("empty quantized embedding");
  check_scheme(cols, scheme);
  if (clusters == 0) throw DataError("cluster count must be at least 1");
  if (index_matrix.size() != rows * scheme.groups) {
    throw DataError("index matrix shape mismatch");
  }
  for (auto idx : index_matrix) {
    if (idx >= clusters) throw DataError("index out of range");
  }
  if (codebook_means.size() != codebook_size()) {
    throw DataError("codebook shape mismatch");
  }
  for (float v : codebook_means) {
    if (!std::isfinite(v)) throw DataError("non-finite codebook mean");
  }
  if (codebook_vars) {
    if (codebook_vars->size() != codebook_size()) {
      throw DataError("variance table shape mismatch");
    }
    for (float v : *codebook_vars) {
      if (!std::isfinite(v) || v < 0.0f) throw DataError("invalid variance");
    }
  }
  if (vocab && vocab->size() != rows) {
    throw DataError("vocabulary size does not match row count");
  }
}

QuantizedEmbedding pq_compress(const EmbeddingMatrix& matrix,
                               const PartitionScheme& scheme,
                               std::size_t clusters,
                               const CompressOptions& options) {
  return compress(matrix, scheme, clusters, options, false);
}

QuantizedEmbedding gpq_compress(const EmbeddingMatrix& matrix,
                                const PartitionScheme& scheme,
                                std::size_t clusters,
                                const CompressOptions& options) {
  return compress(matrix, scheme, clusters, options, true);
}

std::vector<float> sample_codebook(const QuantizedEmbedding& q,
                                   std::uint64_t seed) {
  if (!q.codebook_vars) {
    throw DataError("sampled reconstruction requires codebook variances");
  }
  SplitMix64 rng(seed);
  std::vector<float> sampled(q.codebook_means.size());
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    const double stddev = std::sqrt(static_cast<double>((*q.codebook_vars)[i]));
    // Draw even for zero variance so every entry consumes the same stream.
    const double z = rng.normal();
    sampled[i] = stddev == 0.0
                     ? q.codebook_means[i]
                     : static_cast<float>(q.codebook_means[i] + stddev * z);
  }
  return sampled;
}

EmbeddingMatrix reconstruct(const QuantizedEmbedding& q, ReconstructMode mode,
                            std::uint64_t seed) {
  q.validate();
  std::vector<float> sampled;
  if (mode == ReconstructMode::kSample) sampled = sample_codebook(q, seed);
  const std::vector<float>& codebook =
      mode == ReconstructMode::kSample ? sampled : q.codebook_means;

  const std::size_t groups = q.scheme.groups;
  const std::size_t width = q.group_width();
  const bool structured = q.scheme.kind == PartitionKind::kStructured;
  std::vector<float> values(q.rows * q.cols);
  for (std::size_t w = 0; w < q.rows; ++w) {
    for (std::size_t g = 0; g < groups; ++g) {
      const std::size_t block = structured ? g : 0;
      const std::size_t entry = (block * q.clusters + q.index(w, g)) * width;
      std::copy_n(codebook.begin() + static_cast<std::ptrdiff_t>(entry), width,
                  values.begin() + static_cast<std::ptrdiff_t>(w * q.cols + g * width));
    }
  }
  return EmbeddingMatrix(q.rows, q.cols, std::move(values), q.vocab);
}

unsigned index_bit_width(std::size_t clusters) {
  unsigned bits = 0;
  while (bits < 64 && (std::uint64_t{1} << bits) < clusters) ++bits;
  return bits;
}

SizeReport size_report(const SizeConfig& config) {
  check_scheme(config.cols, config.scheme);
  const std::uint64_t rows = config.rows;
  const std::uint64_t groups = config.scheme.groups;
  const std::uint64_t width = config.cols / groups;
  const std::uint64_t blocks =
      config.scheme.kind == PartitionKind::kStructured ? groups : 1;
  const std::uint64_t means = blocks * config.clusters * width;

  SizeReport r;
  r.float_params = config.gaussian ? 2 * means : means;
  r.int_params = rows * groups;
  const std::uint64_t index_bits =
      static_cast<std::uint64_t>(index_bit_width(config.clusters)) * r.int_params;
  r.theoretical_bits = std::log2(static_cast<double>(config.clusters)) *
                           static_cast<double>(r.int_params) +
                       static_cast<double>(r.float_params * kFloatBits);
  // The index section is padded once, at its end, to a whole byte.
  r.storable_bits = (index_bits + 7) / 8 * 8 + r.float_params * kFloatBits;
  r.baseline_bits = rows * config.cols * kFloatBits;
  r.compression_ratio =
      static_cast<double>(r.baseline_bits) / static_cast<double>(r.storable_bits);
  return r;
}

SizeReport size_report(const QuantizedEmbedding& q) {
  return size_report(SizeConfig{q.rows, q.cols, q.scheme, q.clusters,
                                q.codebook_vars.has_value()});
}

}  // namespace gpqe
