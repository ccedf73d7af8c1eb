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

#include "gpqe/embedding.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>
#include <unordered_set>

#include "gpqe/errors.hpp"

namespace gpqe {

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t'; }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_blank(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_blank(line[i])) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t cols,
                                 std::vector<float> values,
                                 std::optional<std::vector<std::string>> vocab)
    : rows_(rows), cols_(cols), values_(std::move(values)),
      vocab_(std::move(vocab)) {
  if (rows_ == 0 || cols_ == 0) {
    throw DataError("embedding matrix must have at least one row and column");
  }
  if (values_.size() != rows_ * cols_) {
    throw DataError("value count does not match rows x cols");
  }
  for (float v : values_) {
    if (!std::isfinite(v)) throw DataError("non-finite value");
  }
  if (vocab_) {
    if (vocab_->size() != rows_) {
      throw DataError("vocabulary size does not match row count");
    }
    std::unordered_set<std::string_view> seen;
    seen.reserve(vocab_->size());
    for (const auto& token : *vocab_) {
      if (token.empty()) throw DataError("empty token");
      for (char c : token) {
        if (is_blank(c) || c == '\n' || c == '\r') {
          throw DataError("token contains whitespace: " + token);
        }
      }
      if (!seen.insert(token).second) {
        throw DataError("duplicate token: " + token);
      }
    }
  }
}

bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.vocab_ == b.vocab_ &&
         std::memcmp(a.values_.data(), b.values_.data(),
                     a.values_.size() * sizeof(float)) == 0;
}

EmbeddingMatrix load_word2vec_text(std::istream& in) {
  std::string line;
  if (!read_line(in, line)) throw DataError("malformed header: empty input");
  const auto header = split_fields(line);
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (header.size() != 2 || !parse_number(header[0], rows) ||
      !parse_number(header[1], cols) || rows == 0 || cols == 0) {
    throw DataError("malformed header: expected \"<count> <dim>\"");
  }

  std::vector<float> values;
  values.reserve(rows * cols);
  std::vector<std::string> vocab;
  vocab.reserve(rows);
  std::size_t line_no = 1;
  std::size_t pending_blank = 0;
  while (read_line(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) {
      ++pending_blank;
      continue;
    }
    if (pending_blank > 0) {
      throw DataError("blank line inside data at line " +
                      std::to_string(line_no - 1));
    }
    if (vocab.size() == rows) throw DataError("row count mismatch");
    if (fields.size() != cols + 1) {
      throw DataError("dim mismatch at line " + std::to_string(line_no));
    }
    vocab.emplace_back(fields[0]);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      float v = 0.0f;
      if (!parse_number(fields[j], v)) {
        throw DataError("invalid number at line " + std::to_string(line_no));
      }
      if (!std::isfinite(v)) {
        throw DataError("non-finite value at line " + std::to_string(line_no));
      }
      values.push_back(v);
    }
  }
  if (vocab.size() != rows) throw DataError("row count mismatch");
  return EmbeddingMatrix(rows, cols, std::move(values), std::move(vocab));
}

void save_word2vec_text(std::ostream& out, const EmbeddingMatrix& matrix) {
  if (!matrix.vocab()) {
    throw DataError("word2vec text output requires a vocabulary");
  }
  const auto& vocab = *matrix.vocab();
  std::string line;
  out << matrix.rows() << ' ' << matrix.cols() << '\n';
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    line = vocab[i];
    for (float v : matrix.row(i)) {
      line += ' ';
      line += format_float(v);
    }
    line += '\n';
    out << line;
  }
}

EmbeddingMatrix load_raw(std::istream& in, std::size_t rows, std::size_t cols) {
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (rows == 0 || cols == 0 || bytes.size() != rows * cols * 4) {
    throw DataError("length mismatch: expected " +
                    std::to_string(rows * cols * 4) + " bytes, got " +
                    std::to_string(bytes.size()));
  }
  std::vector<float> values(rows * cols);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t word = 0;
    for (int b = 3; b >= 0; --b) {
      word = (word << 8) | static_cast<unsigned char>(bytes[i * 4 + b]);
    }
    values[i] = std::bit_cast<float>(word);
    if (!std::isfinite(values[i])) throw DataError("non-finite value");
  }
  return EmbeddingMatrix(rows, cols, std::move(values));
}

void save_raw(std::ostream& out, const EmbeddingMatrix& matrix) {
  std::string bytes;
  bytes.resize(matrix.values().size() * 4);
  std::size_t pos = 0;
  for (float v : matrix.values()) {
    std::uint32_t word = std::bit_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) {
      bytes[pos++] = static_cast<char>((word >> (8 * b)) & 0xFF);
    }
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string format_float(float value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace gpqe
