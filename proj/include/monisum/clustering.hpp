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

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "monisum/matrix.hpp"
#include "monisum/trace.hpp"

namespace monisum::clustering {

/// One step's clustering: a label per node in 0..k-1 and one centroid row
/// per label. For K-means-derived partitions every centroid is the mean of
/// its members; for the minimum-distance baseline centroids are the chosen
/// representatives' values and `representatives` names them.
struct Partition {
  std::int64_t t = 0;
  std::size_t k = 0;
  std::vector<std::int32_t> assignment;
  Matrix centroids;
  std::vector<std::int32_t> representatives;

  std::vector<std::size_t> cluster_sizes() const;
};

/// Bounded window of the most recent partitions, oldest first.
class PartitionHistory {
 public:
  explicit PartitionHistory(std::size_t capacity);

  /// Appends p; its step must exceed the latest one. Evicts the oldest entry
  /// when full.
  void push(Partition p);

  std::size_t size() const { return window_.size(); }
  bool empty() const { return window_.empty(); }
  std::size_t capacity() const { return capacity_; }

  /// ago = 0 is the latest partition, ago = 1 the one before, ...
  const Partition& back(std::size_t ago = 0) const;

 private:
  std::size_t capacity_;
  std::deque<Partition> window_;
};

/// Mean of each cluster's member rows. Empty clusters get a zero row.
Matrix cluster_means(const Matrix& points, std::span<const std::int32_t> labels, std::size_t k);

/// Sum of squared distances from each point to its cluster's centroid.
double distortion(const Matrix& points, std::span<const std::int32_t> labels,
                  const Matrix& centroids);

struct KMeansOptions {
  int max_iterations = 100;
  double tolerance = 1e-6;  // max centroid movement
};

struct KMeansResult {
  Partition partition;
  int iterations = 0;
  std::vector<double> distortion_trace;  // after each Lloyd iteration
};

/// Greedy k-means++ seeding followed by Lloyd iterations. Empty clusters are
/// refilled with the point farthest from its own centroid. Nearest-centroid
/// ties go to the lowest cluster index.
KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options = {});

enum class SimilarityMeasure {
  kIntersection,  // |C'_k ∩ (∩_m C_{j,t-m})|
  kJaccard,       // |A ∩ B| / |A ∪ B| with the same B
};

/// w(k, j) between fresh cluster k and label j's clusters over the
/// min(m, history.size()) most recent partitions.
Matrix similarity(std::span<const std::int32_t> raw, std::size_t k,
                  const PartitionHistory& history, std::size_t m,
                  SimilarityMeasure measure = SimilarityMeasure::kIntersection);

/// Permutation phi (phi[k] = j) maximizing sum_k w(k, phi[k]); among all
/// maximizers the lexicographically smallest is returned.
std::vector<std::int32_t> match_labels(const Matrix& w);

double matching_weight(const Matrix& w, std::span<const std::int32_t> phi);

/// Renames raw's labels through phi, moving centroid rows along.
Partition apply_permutation(const Partition& raw, std::span<const std::int32_t> phi);

/// Relabels raw against history (identity when history is empty).
Partition relabel(const Partition& raw, const PartitionHistory& history, std::size_t m,
                  SimilarityMeasure measure);

struct DynamicOptions {
  std::size_t k = 3;
  std::size_t m = 1;
  SimilarityMeasure measure = SimilarityMeasure::kIntersection;
  KMeansOptions kmeans;
};

/// K-means on this step's features, relabeled for continuity with history,
/// then appended to history.
Partition dynamic_step(const Matrix& features, PartitionHistory& history,
                       const DynamicOptions& options, std::uint64_t seed, std::int64_t t);

/// Offline baseline: K-means over each node's whole series of the given
/// resources; the returned assignment holds for every step.
std::vector<std::int32_t> static_baseline(const TraceDataset& dataset,
                                          std::span<const std::size_t> resources,
                                          std::size_t k, std::uint64_t seed,
                                          const KMeansOptions& options = {});

/// Picks k distinct nodes at random as representatives and assigns every
/// node to the nearest one. Cluster j is represented by the j-th pick.
Partition min_distance_baseline(const Matrix& features, std::size_t k, std::uint64_t seed);

}  // namespace monisum::clustering
