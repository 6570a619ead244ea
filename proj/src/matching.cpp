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

// Maximum-weight perfect matching on a square weight matrix.
//
// The Hungarian method (potentials form, O(K^3)) gives an optimal matching
// together with dual potentials u, v. Any perfect matching that uses only
// tight edges (w(k,j) == u_k + v_j) is optimal too, so the lexicographically
// smallest optimum is found by fixing rows in order to the smallest tight
// column that still admits a perfect completion.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "monisum/clustering.hpp"

namespace monisum::clustering {

namespace {

struct Duals {
  std::vector<double> u, v;       // row and column potentials, cost form
  std::vector<int> row_to_col;
};

// Min-cost assignment on cost = -w.
Duals hungarian(const Matrix& w) {
  const std::size_t n = w.rows();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -w(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Duals d;
  d.u.assign(u.begin() + 1, u.end());
  d.v.assign(v.begin() + 1, v.end());
  d.row_to_col.assign(n, -1);
  for (std::size_t j = 1; j <= n; ++j) d.row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  return d;
}

class TightGraph {
 public:
  TightGraph(const Matrix& w, const Duals& duals) : n_(w.rows()), tight_(n_ * n_, 0) {
    double scale = 1.0;
    for (double x : w.values()) scale = std::max(scale, std::abs(x));
    const double eps = 1e-9 * scale;
    for (std::size_t k = 0; k < n_; ++k) {
      for (std::size_t j = 0; j < n_; ++j) {
        const double slack = -w(k, j) - duals.u[k] - duals.v[j];
        tight_[k * n_ + j] = std::abs(slack) <= eps;
      }
    }
  }
  bool tight(std::size_t k, std::size_t j) const { return tight_[k * n_ + j] != 0; }

 private:
  std::size_t n_;
  std::vector<char> tight_;
};

}  // namespace

std::vector<std::int32_t> match_labels(const Matrix& w) {
  if (w.rows() != w.cols()) throw std::invalid_argument("match_labels: matrix must be square");
  const std::size_t n = w.rows();
  if (n == 0) return {};
  for (double x : w.values()) {
    if (!std::isfinite(x)) throw std::invalid_argument("match_labels: non-finite weight");
  }

  const Duals duals = hungarian(w);
  const TightGraph graph(w, duals);
  std::vector<int> row_to_col = duals.row_to_col;
  std::vector<int> col_to_row(n);
  for (std::size_t k = 0; k < n; ++k) col_to_row[static_cast<std::size_t>(row_to_col[k])] = static_cast<int>(k);

  std::vector<char> fixed_col(n, 0);
  std::vector<char> visited(n);

  for (std::size_t k = 0; k < n; ++k) {
    const auto current = static_cast<std::size_t>(row_to_col[k]);
    for (std::size_t j = 0; j < current; ++j) {
      if (fixed_col[j] || !graph.tight(k, j)) continue;
      // Move k onto j. The row that held j must reach `current` (now free)
      // along an alternating path of tight edges among unfixed rows > k.
      const auto displaced = static_cast<std::size_t>(col_to_row[j]);
      std::vector<int> saved_r2c = row_to_col, saved_c2r = col_to_row;
      row_to_col[k] = static_cast<int>(j);
      col_to_row[j] = static_cast<int>(k);
      row_to_col[displaced] = -1;
      col_to_row[current] = -1;
      std::fill(visited.begin(), visited.end(), 0);
      auto augment = [&](auto&& self, std::size_t r) -> bool {
        for (std::size_t c = 0; c < n; ++c) {
          if (visited[c] || fixed_col[c] || c == j || !graph.tight(r, c)) continue;
          visited[c] = 1;
          const int owner = col_to_row[c];
          if (owner < 0 || self(self, static_cast<std::size_t>(owner))) {
            row_to_col[r] = static_cast<int>(c);
            col_to_row[c] = static_cast<int>(r);
            return true;
          }
        }
        return false;
      };
      if (augment(augment, displaced)) break;
      row_to_col = std::move(saved_r2c);
      col_to_row = std::move(saved_c2r);
    }
    fixed_col[static_cast<std::size_t>(row_to_col[k])] = 1;
  }

  std::vector<std::int32_t> phi(n);
  for (std::size_t k = 0; k < n; ++k) phi[k] = row_to_col[k];
  return phi;
}

double matching_weight(const Matrix& w, std::span<const std::int32_t> phi) {
  double total = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) total += w(k, static_cast<std::size_t>(phi[k]));
  return total;
}

}  // namespace monisum::clustering
