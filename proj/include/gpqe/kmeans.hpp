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
#include <span>
#include <vector>

namespace gpqe {

struct KMeansOptions {
  std::size_t max_iter = 100;
  // Stop once the relative objective improvement of an iteration drops
  // below this value.
  double rel_tol = 1e-6;
};

struct ClusterResult {
  std::size_t clusters = 0;
  std::size_t dim = 0;
  std::vector<double> centroids;  // clusters x dim, row-major
  std::vector<double> variances;  // clusters x dim, population variance
  std::vector<std::uint32_t> assignments;
  double objective = 0.0;  // sum of squared distances to assigned centroid
  std::size_t iterations = 0;
  // Objective after every Lloyd iteration, in order.
  std::vector<double> objective_trace;
};

// Lloyd's algorithm from a k-means++ initialization.
//
// `points` is an m x dim row-major matrix. The result is a deterministic
// function of (points, clusters, seed, options). Seeding is keyed by the bit
// pattern of each point rather than by its position, so permuting the input
// rows only relabels the output. Nearest-centroid ties go to the lowest
// cluster index; clusters left empty are refilled with the point farthest from
// its centroid.
//
// Throws DataError if clusters is 0 or exceeds m, dim is 0, or a point is not
// finite.
ClusterResult kmeans(std::span<const float> points, std::size_t dim,
                     std::size_t clusters, std::uint64_t seed,
                     const KMeansOptions& options = {});

// Runs kmeans with seeds seed+0 .. seed+restarts-1 and keeps the lowest
// objective; ties go to the earliest restart.
ClusterResult kmeans_best_of(std::span<const float> points, std::size_t dim,
                             std::size_t clusters, std::uint64_t seed,
                             std::size_t restarts,
                             const KMeansOptions& options = {});

}  // namespace gpqe
