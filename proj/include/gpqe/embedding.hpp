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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gpqe {

// Dense row-major |V| x n embedding matrix with an optional vocabulary.
// Immutable after construction; the constructor enforces the shape, finiteness
// and vocabulary-uniqueness invariants and throws DataError otherwise.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix(std::size_t rows, std::size_t cols, std::vector<float> values,
                  std::optional<std::vector<std::string>> vocab = std::nullopt);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const float> values() const noexcept { return values_; }
  std::span<const float> row(std::size_t i) const noexcept {
    return std::span<const float>(values_).subspan(i * cols_, cols_);
  }
  float at(std::size_t i, std::size_t j) const noexcept {
    return values_[i * cols_ + j];
  }
  const std::optional<std::vector<std::string>>& vocab() const noexcept {
    return vocab_;
  }

  // Bitwise equality of values plus equal vocabularies.
  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<float> values_;
  std::optional<std::vector<std::string>> vocab_;
};

// word2vec text: "<count> <dim>" header, then one "<token> v1 ... vdim" line
// per row. LF and CRLF line endings are accepted.
EmbeddingMatrix load_word2vec_text(std::istream& in);
void save_word2vec_text(std::ostream& out, const EmbeddingMatrix& matrix);

// Headerless little-endian binary32, row-major.
EmbeddingMatrix load_raw(std::istream& in, std::size_t rows, std::size_t cols);
void save_raw(std::ostream& out, const EmbeddingMatrix& matrix);

// Shortest decimal string that parses back to exactly `value`.
std::string format_float(float value);

}  // namespace gpqe
