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
#include <cstring>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "gpqe/errors.hpp"
#include "test_support.hpp"

namespace gpqe {
namespace {

EmbeddingMatrix parse_text(const std::string& text) {
  std::istringstream in(text);
  return load_word2vec_text(in);
}

std::string raw_bytes(std::initializer_list<float> values) {
  std::string out;
  for (float v : values) {
    const auto word = std::bit_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((word >> (8 * b)) & 0xFF));
  }
  return out;
}

TEST(Word2VecText, ParsesRowsAndVocab) {
  const auto m = parse_text("2 3\na 1 0 0\nb 0 1 0\n");
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
  ASSERT_TRUE(m.vocab());
  EXPECT_EQ(*m.vocab(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(m.at(0, 0), 1.0f);
  EXPECT_EQ(m.at(1, 1), 1.0f);
  EXPECT_EQ(m.at(1, 2), 0.0f);
}

TEST(Word2VecText, MinimalMatrix) {
  const auto m = parse_text("1 1\nx 0.5\n");
  EXPECT_EQ(m.rows(), 1u);
  EXPECT_EQ(m.at(0, 0), 0.5f);
}

TEST(Word2VecText, AcceptsCrlfAndTrailingSpaces) {
  const auto m = parse_text("2 2\r\na 1 2 \r\nb 3 4\r\n\r\n");
  EXPECT_EQ(m.at(1, 1), 4.0f);
}

TEST(Word2VecText, RejectsMalformedInput) {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      parse_text(text);
      FAIL() << "accepted: " << text;
    } catch (const DataError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_error("3 2\na 1 2\nb 3 4\n", "row count mismatch");
  expect_error("1 2\na 1 2\nb 3 4\n", "row count mismatch");
  expect_error("2 2\na 1 2\nb 3\n", "dim mismatch");
  expect_error("2 2\na 1 2\na 3 4\n", "duplicate token");
  expect_error("1 2\na 1 nan\n", "non-finite");
  expect_error("1 2\na 1 inf\n", "non-finite");
  expect_error("1 2\na 1 x\n", "invalid number");
  expect_error("two 2\na 1 2\n", "malformed header");
  expect_error("2\n", "malformed header");
  expect_error("", "malformed header");
}

TEST(Word2VecText, WriterRequiresVocab) {
  EmbeddingMatrix m(1, 2, {1.0f, 2.0f});
  std::ostringstream out;
  EXPECT_THROW(save_word2vec_text(out, m), DataError);
}

TEST(Word2VecText, ShortestDecimalRoundTrip) {
  EXPECT_EQ(format_float(0.1f), "0.1");
  EmbeddingMatrix m(1, 1, {0.1f}, std::vector<std::string>{"t"});
  std::ostringstream out;
  save_word2vec_text(out, m);
  EXPECT_EQ(out.str(), "1 1\nt 0.1\n");
  EXPECT_EQ(parse_text(out.str()), m);
}

TEST(Word2VecText, RandomRoundTripIsBitExact) {
  std::mt19937 rng(7);
  std::vector<float> values(40 * 6);
  for (auto& v : values) {
    // Random bit patterns cover subnormals and extreme exponents.
    do {
      v = std::bit_cast<float>(static_cast<std::uint32_t>(rng()));
    } while (!std::isfinite(v));
  }
  std::vector<std::string> vocab;
  for (int i = 0; i < 40; ++i) vocab.push_back("tok" + std::to_string(i));
  EmbeddingMatrix m(40, 6, values, vocab);
  std::stringstream buf;
  save_word2vec_text(buf, m);
  EXPECT_EQ(load_word2vec_text(buf), m);
}

TEST(RawFormat, DecodesLittleEndian) {
  std::istringstream in(raw_bytes({1.0f, 2.0f}));
  const auto m = load_raw(in, 1, 2);
  EXPECT_EQ(m.at(0, 0), 1.0f);
  EXPECT_EQ(m.at(0, 1), 2.0f);
  EXPECT_FALSE(m.vocab());
}

TEST(RawFormat, RejectsLengthMismatch) {
  std::istringstream in(raw_bytes({1.0f, 2.0f}).substr(0, 7));
  try {
    load_raw(in, 1, 2);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("length mismatch"), std::string::npos);
  }
}

TEST(RawFormat, RejectsNonFinite) {
  std::istringstream in(raw_bytes({1.0f, std::numeric_limits<float>::infinity()}));
  EXPECT_THROW(load_raw(in, 1, 2), DataError);
}

TEST(RawFormat, IdentityRoundTripBytes) {
  EmbeddingMatrix eye(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  std::stringstream buf;
  save_raw(buf, eye);
  const std::string first = buf.str();
  EXPECT_EQ(first.size(), 36u);
  const auto back = load_raw(buf, 3, 3);
  EXPECT_EQ(back, eye);
  std::ostringstream again;
  save_raw(again, back);
  EXPECT_EQ(again.str(), first);
}

TEST(RawFormat, RandomRoundTrip) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = testing::random_matrix(5, 4, seed);
    std::stringstream buf;
    save_raw(buf, m);
    EXPECT_EQ(load_raw(buf, 5, 4), m);
  }
}

TEST(EmbeddingMatrix, EnforcesInvariants) {
  EXPECT_THROW(EmbeddingMatrix(0, 1, {}), DataError);
  EXPECT_THROW(EmbeddingMatrix(1, 2, {1.0f}), DataError);
  EXPECT_THROW(EmbeddingMatrix(1, 1, {std::nanf("")}), DataError);
  EXPECT_THROW(EmbeddingMatrix(2, 1, {1, 2}, std::vector<std::string>{"a"}), DataError);
  EXPECT_THROW(EmbeddingMatrix(2, 1, {1, 2}, std::vector<std::string>{"a", "a"}),
               DataError);
  EXPECT_THROW(EmbeddingMatrix(1, 1, {1}, std::vector<std::string>{"a b"}), DataError);
}

}  // namespace
}  // namespace gpqe
