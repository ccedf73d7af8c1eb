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
#include <cstring>

#include <gtest/gtest.h>

#include "gpqe/errors.hpp"

namespace gpqe {
namespace {

TEST(Rwe, RowsHaveUnitNorm) {
  const auto e = rwe_generate({300, 17, 5, std::nullopt});
  for (std::size_t i = 0; i < e.rows(); ++i) {
    double s = 0.0;
    for (float v : e.row(i)) s += static_cast<double>(v) * v;
    EXPECT_NEAR(std::sqrt(s), 1.0, 1e-6);
  }
}

TEST(Rwe, SingleColumnRowsAreSigns) {
  const auto e = rwe_generate({50, 1, 3, std::nullopt});
  for (float v : e.values()) EXPECT_EQ(std::fabs(v), 1.0f);
}

TEST(Rwe, DeterministicAndIndependentOfProjection) {
  const auto a = rwe_generate({64, 8, 99, std::nullopt});
  const auto b = rwe_generate({64, 8, 99, 16});
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == rwe_generate({64, 8, 100, std::nullopt}));
}

TEST(Rwe, RejectsEmptyShapes) {
  EXPECT_THROW(rwe_generate({0, 4, 0, std::nullopt}), DataError);
  EXPECT_THROW(rwe_generate({4, 0, 0, std::nullopt}), DataError);
  EXPECT_THROW(rwe_generate({4, 4, 0, std::size_t{0}}), DataError);
}

TEST(Rwe, ParameterAccounting) {
  const auto plain = rwe_size_report({32000, 512, 0, std::nullopt});
  EXPECT_EQ(plain.float_params, 2u);
  EXPECT_EQ(plain.int_params, 0u);
  const auto projected = rwe_size_report({32000, 512, 0, 512});
  EXPECT_EQ(projected.float_params, 2u + 512u * 512u);
  EXPECT_EQ(projected.storable_bits, projected.float_params * 32);
}

TEST(ProjectionInit, SingleEntryWithinGlorotBound) {
  const auto w = projection_init(1, 1, 4);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_LE(std::fabs(w[0]), std::sqrt(3.0f));
}

TEST(ProjectionInit, DeterministicPerSeed) {
  EXPECT_EQ(projection_init(7, 5, 1), projection_init(7, 5, 1));
  EXPECT_NE(projection_init(7, 5, 1), projection_init(7, 5, 2));
}

TEST(ProjectionInit, BoundsAndMean) {
  const auto w = projection_init(512, 512, 123);
  const double bound = std::sqrt(6.0 / 1024.0);
  double sum = 0.0;
  for (float v : w) {
    EXPECT_LE(std::fabs(v), bound);
    sum += v;
  }
  EXPECT_LE(bound, 0.0766);
  EXPECT_NEAR(sum / static_cast<double>(w.size()), 0.0, 0.002);
}

}  // namespace
}  // namespace gpqe
