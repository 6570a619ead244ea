// Copyright 2026 The Monisum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "monisum/clustering.hpp"
#include "monisum/kernels.hpp"

namespace monisum::clustering {

std::vector<std::size_t> Partition::cluster_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (std::int32_t label : assignment) ++sizes[static_cast<std::size_t>(label)];
  return sizes;
}

Matrix cluster_means(const Matrix& points, std::span<const std::int32_t> labels,
                     std::size_t k) {
  if (labels.size() != points.rows()) throw std::invalid_argument("cluster_means: size mismatch");
  Matrix sums(k, points.cols());
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto j = static_cast<std::size_t>(labels[i]);
    if (j >= k) throw std::invalid_argument("cluster_means: label out of range");
    ++counts[j];
    auto dst = sums.row(j);
    auto src = points.row(i);
    for (std::size_t c = 0; c < points.cols(); ++c) dst[c] += src[c];
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] == 0) continue;
    for (double& v : sums.row(j)) v /= static_cast<double>(counts[j]);
  }
  return sums;
}

double distortion(const Matrix& points, std::span<const std::int32_t> labels,
                  const Matrix& centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    total += kernels::sum_squared_diff(points.row(i),
                                       centroids.row(static_cast<std::size_t>(labels[i])));
  }
  return total;
}

namespace {

void check_points(const Matrix& points, std::size_t k) {
  if (k == 0) throw std::invalid_argument("kmeans: k must be positive");
  if (k > points.rows()) throw std::invalid_argument("kmeans: k exceeds the number of points");
  if (points.cols() == 0) throw std::invalid_argument("kmeans: points have no features");
  for (double v : points.values()) {
    if (!std::isfinite(v)) throw std::invalid_argument("kmeans: non-finite point");
  }
}

std::size_t sample_weighted(std::span<const double> weights, double total, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (!(total > 0.0)) {
    std::uniform_int_distribution<std::size_t> any(0, weights.size() - 1);
    return any(rng);
  }
  const double target = unit(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (target < acc) return i;
  }
  // Rounding left target at the very top; take the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

// Greedy k-means++: each new center is the best of several D^2-weighted
// candidates by resulting potential.
Matrix seed_centers(const Matrix& points, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();
  const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
  Matrix centers(k, dim);
  std::vector<std::int32_t> scratch_labels(n);
  std::vector<double> closest(n);
  std::vector<double> candidate_d2(n);
  std::vector<double> best_d2(n);

  auto distances_to = [&](std::size_t index, std::vector<double>& out) {
    Matrix c(1, dim);
    std::copy(points.row(index).begin(), points.row(index).end(), c.row(0).begin());
    kernels::assign_nearest(points, c, scratch_labels, out);
  };

  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  const std::size_t f = first(rng);
  std::copy(points.row(f).begin(), points.row(f).end(), centers.row(0).begin());
  distances_to(f, closest);
  double potential = 0.0;
  for (double d : closest) potential += d;

  for (std::size_t c = 1; c < k; ++c) {
    std::size_t best_index = 0;
    double best_potential = std::numeric_limits<double>::infinity();
    for (std::size_t trial = 0; trial < trials; ++trial) {
      const std::size_t cand = sample_weighted(closest, potential, rng);
      distances_to(cand, candidate_d2);
      double p = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        candidate_d2[i] = std::min(candidate_d2[i], closest[i]);
        p += candidate_d2[i];
      }
      if (p < best_potential) {
        best_potential = p;
        best_index = cand;
        best_d2.swap(candidate_d2);
      }
    }
    std::copy(points.row(best_index).begin(), points.row(best_index).end(),
              centers.row(c).begin());
    closest.swap(best_d2);
    potential = best_potential;
  }
  return centers;
}

void repair_empty(std::vector<std::int32_t>& labels, std::vector<double>& d2, std::size_t k) {
  std::vector<std::size_t> sizes(k, 0);
  for (std::int32_t l : labels) ++sizes[static_cast<std::size_t>(l)];
  for (std::size_t j = 0; j < k; ++j) {
    if (sizes[j] != 0) continue;
    std::size_t pick = labels.size();
    double far = -1.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (sizes[static_cast<std::size_t>(labels[i])] > 1 && d2[i] > far) {
        far = d2[i];
        pick = i;
      }
    }
    --sizes[static_cast<std::size_t>(labels[pick])];
    labels[pick] = static_cast<std::int32_t>(j);
    d2[pick] = 0.0;
    sizes[j] = 1;
  }
}

}  // namespace

KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options) {
  check_points(points, k);
  const std::size_t n = points.rows();
  std::mt19937_64 rng(seed);
  Matrix centroids = seed_centers(points, k, rng);

  KMeansResult result;
  std::vector<std::int32_t> labels(n);
  std::vector<double> d2(n);
  for (int it = 0; it < std::max(1, options.max_iterations); ++it) {
    kernels::assign_nearest(points, centroids, labels, d2);
    repair_empty(labels, d2, k);
    Matrix next = cluster_means(points, labels, k);
    double shift = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      shift = std::max(shift, std::sqrt(kernels::sum_squared_diff(next.row(j), centroids.row(j))));
    }
    centroids = std::move(next);
    result.iterations = it + 1;
    result.distortion_trace.push_back(distortion(points, labels, centroids));
    if (shift < options.tolerance) break;
  }

  result.partition.k = k;
  result.partition.assignment = std::move(labels);
  result.partition.centroids = std::move(centroids);
  return result;
}

}  // namespace monisum::clustering
