// Copyright 2026 The mfmsbm Authors
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

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mfmsbm/graph.hpp"
#include "mfmsbm/numeric.hpp"
#include "mfmsbm/random.hpp"

namespace mfmsbm {

namespace detail {

inline void check_labels_fit(int n, const Labeling& z, int k) {
  if (z.size() != n) throw std::invalid_argument("labeling length does not match node count");
  if (z.num_clusters() > k) {
    throw std::invalid_argument("label exceeds edge probability matrix dimension");
  }
}

// a*log(p) with the 0*log(0) = 0 convention.
inline double xlog(double a, double p) { return a == 0.0 ? 0.0 : a * std::log(p); }

}  // namespace detail

// Each pair i<j is drawn Bernoulli(Q[z_i][z_j]) in row-major pair order, one
// uniform per pair.
inline AdjacencyMatrix generate_sbm(int n, const Labeling& z, const EdgeProbMatrix& q,
                                    Rng& rng) {
  detail::check_labels_fit(n, z, q.k());
  AdjacencyMatrix a(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform() < q(z[i], z[j])) a.set_edge(i, j);
    }
  }
  return a;
}

// Degree-corrected variant: theta_ij = w_i w_j Q[z_i][z_j]. Uses the same
// draw sequence as generate_sbm, so unit weights reproduce it exactly.
inline AdjacencyMatrix generate_dcsbm(int n, const Labeling& z, const EdgeProbMatrix& q,
                                      const DegreeWeights& w, Rng& rng) {
  detail::check_labels_fit(n, z, q.k());
  if (w.size() != n) throw std::invalid_argument("weight vector length does not match node count");
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double theta = w[i] * w[j] * q(z[i], z[j]);
      if (!(theta >= 0.0 && theta <= 1.0)) {
        throw std::invalid_argument("degree-corrected edge probability outside [0,1]");
      }
    }
  }
  AdjacencyMatrix a(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform() < w[i] * w[j] * q(z[i], z[j])) a.set_edge(i, j);
    }
  }
  return a;
}

// Unordered-pair tallies per block pair r <= s: the number of node pairs
// (i<j) with {z_i, z_j} = {r, s} and how many of them carry an edge.
class BlockCounts {
 public:
  explicit BlockCounts(int k)
      : k_(k), pairs_(static_cast<std::size_t>(k) * k, 0), edges_(pairs_) {}

  int k() const { return k_; }
  long long pairs(int r, int s) const { return pairs_[at(r, s)]; }
  long long edges(int r, int s) const { return edges_[at(r, s)]; }

  void add(int r, int s, long long pairs, long long edges) {
    pairs_[at(r, s)] += pairs;
    edges_[at(r, s)] += edges;
    if (r != s) {
      pairs_[at(s, r)] += pairs;
      edges_[at(s, r)] += edges;
    }
  }

  long long total_pairs() const { return upper_sum(pairs_); }
  long long total_edges() const { return upper_sum(edges_); }

  bool operator==(const BlockCounts&) const = default;

 private:
  std::size_t at(int r, int s) const { return static_cast<std::size_t>(r) * k_ + s; }
  long long upper_sum(const std::vector<long long>& v) const {
    long long t = 0;
    for (int r = 0; r < k_; ++r) {
      for (int s = r; s < k_; ++s) t += v[at(r, s)];
    }
    return t;
  }

  int k_;
  std::vector<long long> pairs_;
  std::vector<long long> edges_;
};

inline BlockCounts block_counts(const AdjacencyMatrix& a, const Labeling& z) {
  const int n = a.size();
  if (z.size() != n) throw std::invalid_argument("labeling length does not match node count");
  const int k = z.num_clusters();
  BlockCounts counts(k);
  const std::vector<int> sizes = z.cluster_sizes();
  for (int r = 0; r < k; ++r) {
    counts.add(r, r, static_cast<long long>(sizes[r]) * (sizes[r] - 1) / 2, 0);
    for (int s = r + 1; s < k; ++s) {
      counts.add(r, s, static_cast<long long>(sizes[r]) * sizes[s], 0);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (a.has_edge(i, j)) counts.add(z[i], z[j], 0, 1);
    }
  }
  return counts;
}

// Bernoulli log-likelihood of the graph under (z, Q), summed blockwise.
// Returns -inf when a probability-zero or probability-one block contradicts
// the data.
inline double log_likelihood(const AdjacencyMatrix& a, const Labeling& z,
                             const EdgeProbMatrix& q) {
  detail::check_labels_fit(a.size(), z, q.k());
  const BlockCounts c = block_counts(a, z);
  double ll = 0.0;
  for (int r = 0; r < c.k(); ++r) {
    for (int s = r; s < c.k(); ++s) {
      const double e = static_cast<double>(c.edges(r, s));
      const double m = static_cast<double>(c.pairs(r, s));
      const double p = q(r, s);
      if ((p == 0.0 && e > 0.0) || (p == 1.0 && m - e > 0.0)) return kNegInf;
      ll += detail::xlog(e, p) + detail::xlog(m - e, 1.0 - p);
    }
  }
  return ll;
}

}  // namespace mfmsbm
