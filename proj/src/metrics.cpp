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

#include "gpqe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gpqe/errors.hpp"

namespace gpqe {

namespace {

std::vector<double> unit_rows(const EmbeddingMatrix& m) {
  std::vector<double> out(m.values().begin(), m.values().end());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double* r = &out[i * m.cols()];
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) norm_sq += r[j] * r[j];
    if (norm_sq == 0.0) continue;
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (std::size_t j = 0; j < m.cols(); ++j) r[j] *= inv;
  }
  return out;
}

std::vector<std::size_t> top_k(const std::vector<double>& unit, std::size_t rows,
                               std::size_t cols, std::size_t query,
                               std::size_t k) {
  std::vector<double> sims(rows);
  const double* q = &unit[query * cols];
  for (std::size_t i = 0; i < rows; ++i) {
    const double* r = &unit[i * cols];
    double dot = 0.0;
    for (std::size_t j = 0; j < cols; ++j) dot += q[j] * r[j];
    sims[i] = dot;
  }
  std::vector<std::size_t> order;
  order.reserve(rows - 1);
  for (std::size_t i = 0; i < rows; ++i) {
    if (i != query) order.push_back(i);
  }
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      return sims[a] > sims[b] || (sims[a] == sims[b] && a < b);
                    });
  order.resize(k);
  return order;
}

}  // namespace

std::vector<std::size_t> cosine_top_k(const EmbeddingMatrix& matrix,
                                      std::size_t row, std::size_t k) {
  if (k == 0 || k >= matrix.rows()) throw DataError("k out of range");
  if (row >= matrix.rows()) throw DataError("row out of range");
  return top_k(unit_rows(matrix), matrix.rows(), matrix.cols(), row, k);
}

FidelityReport fidelity(const EmbeddingMatrix& original,
                        const EmbeddingMatrix& reconstructed, std::size_t k) {
  if (original.rows() != reconstructed.rows() ||
      original.cols() != reconstructed.cols()) {
    throw DataError("shape mismatch");
  }
  const std::size_t rows = original.rows();
  const std::size_t cols = original.cols();
  if (k == 0 || k >= rows) {
    throw DataError("k must lie in [1, " + std::to_string(rows) + ")");
  }

  FidelityReport report;
  report.k = k;

  double sq_err = 0.0;
  double cos_sum = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const auto a = original.row(i);
    const auto b = reconstructed.row(i);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double x = a[j];
      const double y = b[j];
      sq_err += (x - y) * (x - y);
      dot += x * y;
      na += x * x;
      nb += y * y;
    }
    if (na == 0.0 && nb == 0.0) {
      cos_sum += 1.0;
    } else if (na > 0.0 && nb > 0.0) {
      cos_sum += std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
    }
  }
  report.rmse = std::sqrt(sq_err / static_cast<double>(rows * cols));
  report.mean_cosine = cos_sum / static_cast<double>(rows);

  const auto unit_a = unit_rows(original);
  const auto unit_b = unit_rows(reconstructed);
  std::size_t hits = 0;
  for (std::size_t w = 0; w < rows; ++w) {
    auto na = top_k(unit_a, rows, cols, w, k);
    auto nb = top_k(unit_b, rows, cols, w, k);
    std::sort(na.begin(), na.end());
    std::sort(nb.begin(), nb.end());
    std::vector<std::size_t> common;
    std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(),
                          std::back_inserter(common));
    hits += common.size();
  }
  report.nn_overlap_at_k =
      static_cast<double>(hits) / static_cast<double>(rows * k);
  return report;
}

}  // namespace gpqe
