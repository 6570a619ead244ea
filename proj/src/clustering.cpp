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
#include <numeric>
#include <random>
#include <stdexcept>

#include "monisum/clustering.hpp"
#include "monisum/kernels.hpp"

namespace monisum::clustering {

PartitionHistory::PartitionHistory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("PartitionHistory: capacity must be positive");
}

void PartitionHistory::push(Partition p) {
  if (!window_.empty() && p.t <= window_.back().t) {
    throw std::invalid_argument("PartitionHistory: steps must strictly increase");
  }
  if (!window_.empty() && p.assignment.size() != window_.back().assignment.size()) {
    throw std::invalid_argument("PartitionHistory: node count changed");
  }
  if (window_.size() == capacity_) window_.pop_front();
  window_.push_back(std::move(p));
}

const Partition& PartitionHistory::back(std::size_t ago) const {
  if (ago >= window_.size()) throw std::out_of_range("PartitionHistory: lookback too far");
  return window_[window_.size() - 1 - ago];
}

Matrix similarity(std::span<const std::int32_t> raw, std::size_t k,
                  const PartitionHistory& history, std::size_t m, SimilarityMeasure measure) {
  if (history.empty()) throw std::invalid_argument("similarity: empty history");
  if (m == 0) throw std::invalid_argument("similarity: m must be >= 1");
  const std::size_t lookback = std::min(m, history.size());
  for (std::size_t a = 0; a < lookback; ++a) {
    const Partition& past = history.back(a);
    if (past.k != k) throw std::invalid_argument("similarity: cluster count mismatch");
    if (past.assignment.size() != raw.size()) {
      throw std::invalid_argument("similarity: node count mismatch");
    }
  }

  // A node counts toward w(k, j) when it is in fresh cluster k and held label
  // j at every one of the lookback steps.
  Matrix inter(k, k);
  std::vector<double> fresh_size(k, 0.0), stable_size(k, 0.0);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto kk = static_cast<std::size_t>(raw[i]);
    ++fresh_size[kk];
    const std::int32_t j = history.back(0).assignment[i];
    bool stable = true;
    for (std::size_t a = 1; a < lookback && stable; ++a) {
      stable = history.back(a).assignment[i] == j;
    }
    if (!stable) continue;
    ++stable_size[static_cast<std::size_t>(j)];
    inter(kk, static_cast<std::size_t>(j)) += 1.0;
  }
  if (measure == SimilarityMeasure::kIntersection) return inter;

  Matrix jac(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      const double uni = fresh_size[a] + stable_size[b] - inter(a, b);
      jac(a, b) = uni > 0.0 ? inter(a, b) / uni : 0.0;
    }
  }
  return jac;
}

Partition apply_permutation(const Partition& raw, std::span<const std::int32_t> phi) {
  if (phi.size() != raw.k) throw std::invalid_argument("apply_permutation: size mismatch");
  Partition out;
  out.t = raw.t;
  out.k = raw.k;
  out.assignment.resize(raw.assignment.size());
  for (std::size_t i = 0; i < raw.assignment.size(); ++i) {
    out.assignment[i] = phi[static_cast<std::size_t>(raw.assignment[i])];
  }
  out.centroids = Matrix(raw.centroids.rows(), raw.centroids.cols());
  for (std::size_t kk = 0; kk < raw.k; ++kk) {
    const auto src = raw.centroids.row(kk);
    std::copy(src.begin(), src.end(), out.centroids.row(static_cast<std::size_t>(phi[kk])).begin());
  }
  if (!raw.representatives.empty()) {
    out.representatives.resize(raw.k);
    for (std::size_t kk = 0; kk < raw.k; ++kk) {
      out.representatives[static_cast<std::size_t>(phi[kk])] = raw.representatives[kk];
    }
  }
  return out;
}

Partition relabel(const Partition& raw, const PartitionHistory& history, std::size_t m,
                  SimilarityMeasure measure) {
  if (history.empty()) return raw;
  const Matrix w = similarity(raw.assignment, raw.k, history, m, measure);
  return apply_permutation(raw, match_labels(w));
}

Partition dynamic_step(const Matrix& features, PartitionHistory& history,
                       const DynamicOptions& options, std::uint64_t seed, std::int64_t t) {
  KMeansResult raw = kmeans(features, options.k, seed, options.kmeans);
  raw.partition.t = t;
  Partition labeled = relabel(raw.partition, history, options.m, options.measure);
  history.push(labeled);
  return labeled;
}

std::vector<std::int32_t> static_baseline(const TraceDataset& dataset,
                                          std::span<const std::size_t> resources,
                                          std::size_t k, std::uint64_t seed,
                                          const KMeansOptions& options) {
  if (resources.empty()) throw std::invalid_argument("static_baseline: no resources");
  for (std::size_t r : resources) {
    if (r >= dataset.n_resources) throw std::invalid_argument("static_baseline: bad resource");
  }
  Matrix features(dataset.n_nodes, dataset.n_steps * resources.size());
  for (std::size_t i = 0; i < dataset.n_nodes; ++i) {
    auto row = features.row(i);
    std::size_t c = 0;
    for (std::size_t t = 0; t < dataset.n_steps; ++t) {
      for (std::size_t r : resources) row[c++] = dataset.at(t, i, r);
    }
  }
  return kmeans(features, k, seed, options).partition.assignment;
}

Partition min_distance_baseline(const Matrix& features, std::size_t k, std::uint64_t seed) {
  const std::size_t n = features.rows();
  if (k == 0) throw std::invalid_argument("min_distance_baseline: k must be positive");
  if (k > n) throw std::invalid_argument("min_distance_baseline: k exceeds the number of nodes");
  std::mt19937_64 rng(seed);
  std::vector<std::int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t a = 0; a < k; ++a) {
    std::uniform_int_distribution<std::size_t> pick(a, n - 1);
    std::swap(order[a], order[pick(rng)]);
  }
  Partition p;
  p.k = k;
  p.representatives.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  p.centroids = Matrix(k, features.cols());
  for (std::size_t j = 0; j < k; ++j) {
    const auto src = features.row(static_cast<std::size_t>(p.representatives[j]));
    std::copy(src.begin(), src.end(), p.centroids.row(j).begin());
  }
  p.assignment.resize(n);
  std::vector<double> d2(n);
  kernels::assign_nearest(features, p.centroids, p.assignment, d2);
  return p;
}

}  // namespace monisum::clustering
