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

#include "gpqe/kmeans.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "gpqe/errors.hpp"
#include "gpqe/random.hpp"

namespace gpqe {

namespace {

struct PointSet {
  std::span<const float> values;
  std::size_t dim;
  std::size_t size;

  std::span<const float> point(std::size_t i) const {
    return values.subspan(i * dim, dim);
  }
};

double squared_distance(std::span<const float> p, const double* c) {
  double sum = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double diff = static_cast<double>(p[j]) - c[j];
    sum += diff * diff;
  }
  return sum;
}

// Lexicographic comparison of point contents; used to break ties in seeding
// without looking at row positions.
bool content_less(std::span<const float> a, std::span<const float> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Uniform variate in (0, 1] keyed by (seed, round, point bits).
double content_uniform(std::uint64_t seed, std::uint64_t round,
                       std::span<const float> p) {
  std::uint64_t h = derive_seed(seed, round);
  for (float v : p) h = mix64(h ^ std::bit_cast<std::uint32_t>(v));
  return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
}

// k-means++ by exponential races: every candidate draws -log(u) / weight and
// the smallest key wins, which selects candidate i with probability
// weight_i / sum(weights). Candidates with zero weight are skipped unless all
// weights are zero.
std::vector<double> seed_centroids(const PointSet& pts, std::size_t clusters,
                                   std::uint64_t seed) {
  const std::size_t dim = pts.dim;
  std::vector<double> centroids(clusters * dim);
  std::vector<double> min_dist(pts.size, std::numeric_limits<double>::infinity());

  for (std::size_t r = 0; r < clusters; ++r) {
    bool any_positive = false;
    if (r > 0) {
      const double* last = &centroids[(r - 1) * dim];
      for (std::size_t i = 0; i < pts.size; ++i) {
        min_dist[i] = std::min(min_dist[i], squared_distance(pts.point(i), last));
        any_positive = any_positive || min_dist[i] > 0.0;
      }
    }

    std::size_t best = pts.size;
    double best_key = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size; ++i) {
      double weight = 1.0;
      if (any_positive) {
        if (min_dist[i] <= 0.0) continue;
        weight = min_dist[i];
      }
      const double key = -std::log(content_uniform(seed, r, pts.point(i))) / weight;
      if (best == pts.size || key < best_key ||
          (key == best_key && content_less(pts.point(i), pts.point(best)))) {
        best = i;
        best_key = key;
      }
    }
    const auto chosen = pts.point(best);
    std::copy(chosen.begin(), chosen.end(), centroids.begin() + r * dim);
  }
  return centroids;
}

std::uint32_t nearest(std::span<const float> p, const std::vector<double>& centroids,
                      std::size_t clusters) {
  std::uint32_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < clusters; ++k) {
    const double d = squared_distance(p, &centroids[k * p.size()]);
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<std::uint32_t>(k);
    }
  }
  return best;
}

// Moves the point farthest from its centroid into each empty cluster until
// none is empty. m >= clusters guarantees a donor cluster with two or more
// members exists whenever one is empty.
void repair_empty(const PointSet& pts, std::size_t clusters,
                  std::vector<double>& centroids,
                  std::vector<std::uint32_t>& assignments) {
  std::vector<std::size_t> counts(clusters, 0);
  for (auto a : assignments) ++counts[a];
  for (std::size_t empty = 0; empty < clusters; ++empty) {
    if (counts[empty] != 0) continue;
    std::size_t far = pts.size;
    double far_dist = -1.0;
    for (std::size_t i = 0; i < pts.size; ++i) {
      if (counts[assignments[i]] < 2) continue;
      const double d =
          squared_distance(pts.point(i), &centroids[assignments[i] * pts.dim]);
      if (d > far_dist) {
        far_dist = d;
        far = i;
      }
    }
    --counts[assignments[far]];
    assignments[far] = static_cast<std::uint32_t>(empty);
    counts[empty] = 1;
    const auto p = pts.point(far);
    std::copy(p.begin(), p.end(), centroids.begin() + empty * pts.dim);
  }
}

void update_means(const PointSet& pts, std::size_t clusters,
                  const std::vector<std::uint32_t>& assignments,
                  std::vector<double>& centroids) {
  std::vector<std::size_t> counts(clusters, 0);
  std::fill(centroids.begin(), centroids.end(), 0.0);
  for (std::size_t i = 0; i < pts.size; ++i) {
    const auto p = pts.point(i);
    double* c = &centroids[assignments[i] * pts.dim];
    for (std::size_t j = 0; j < pts.dim; ++j) c[j] += p[j];
    ++counts[assignments[i]];
  }
  for (std::size_t k = 0; k < clusters; ++k) {
    for (std::size_t j = 0; j < pts.dim; ++j) {
      centroids[k * pts.dim + j] /= static_cast<double>(counts[k]);
    }
  }
}

double objective(const PointSet& pts, const std::vector<double>& centroids,
                 const std::vector<std::uint32_t>& assignments) {
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size; ++i) {
    total += squared_distance(pts.point(i), &centroids[assignments[i] * pts.dim]);
  }
  return total;
}

std::vector<double> population_variances(
    const PointSet& pts, std::size_t clusters,
    const std::vector<std::uint32_t>& assignments,
    const std::vector<double>& centroids) {
  std::vector<double> vars(clusters * pts.dim, 0.0);
  std::vector<std::size_t> counts(clusters, 0);
  for (std::size_t i = 0; i < pts.size; ++i) {
    const auto p = pts.point(i);
    const std::size_t k = assignments[i];
    for (std::size_t j = 0; j < pts.dim; ++j) {
      const double diff = static_cast<double>(p[j]) - centroids[k * pts.dim + j];
      vars[k * pts.dim + j] += diff * diff;
    }
    ++counts[k];
  }
  for (std::size_t k = 0; k < clusters; ++k) {
    for (std::size_t j = 0; j < pts.dim; ++j) {
      vars[k * pts.dim + j] /= static_cast<double>(counts[k]);
    }
  }
  return vars;
}

}  // namespace

ClusterResult kmeans(std::span<const float> points, std::size_t dim,
                     std::size_t clusters, std::uint64_t seed,
                     const KMeansOptions& options) {
  if (dim == 0 || points.size() % dim != 0) {
    throw DataError("point matrix size is not a multiple of the dimension");
  }
  const PointSet pts{points, dim, points.size() / dim};
  if (clusters == 0) throw DataError("cluster count must be at least 1");
  if (clusters > pts.size) {
    throw DataError("cluster count " + std::to_string(clusters) +
                    " exceeds point count " + std::to_string(pts.size));
  }
  for (float v : points) {
    if (!std::isfinite(v)) throw DataError("non-finite value");
  }
  const std::size_t max_iter = std::max<std::size_t>(options.max_iter, 1);

  ClusterResult result;
  result.clusters = clusters;
  result.dim = dim;
  result.centroids = seed_centroids(pts, clusters, seed);
  result.assignments.assign(pts.size, 0);

  std::vector<std::uint32_t> previous;
  double prev_obj = std::numeric_limits<double>::infinity();
  while (result.iterations < max_iter) {
    previous = result.assignments;
    for (std::size_t i = 0; i < pts.size; ++i) {
      result.assignments[i] = nearest(pts.point(i), result.centroids, clusters);
    }
    repair_empty(pts, clusters, result.centroids, result.assignments);
    update_means(pts, clusters, result.assignments, result.centroids);
    const double obj = objective(pts, result.centroids, result.assignments);
    result.objective_trace.push_back(obj);
    ++result.iterations;

    const bool changed = result.iterations == 1 || previous != result.assignments;
    if (!changed || obj == 0.0) break;
    if (std::isfinite(prev_obj) && prev_obj - obj < options.rel_tol * prev_obj) {
      break;
    }
    prev_obj = obj;
  }

  result.objective = result.objective_trace.back();
  result.variances =
      population_variances(pts, clusters, result.assignments, result.centroids);
  return result;
}

ClusterResult kmeans_best_of(std::span<const float> points, std::size_t dim,
                             std::size_t clusters, std::uint64_t seed,
                             std::size_t restarts, const KMeansOptions& options) {
  if (restarts == 0) throw DataError("restarts must be at least 1");
  ClusterResult best = kmeans(points, dim, clusters, seed, options);
  for (std::size_t r = 1; r < restarts; ++r) {
    ClusterResult candidate = kmeans(points, dim, clusters, seed + r, options);
    if (candidate.objective < best.objective) best = std::move(candidate);
  }
  return best;
}

}  // namespace gpqe
