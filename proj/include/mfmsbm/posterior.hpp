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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "mfmsbm/assignment.hpp"
#include "mfmsbm/gibbs.hpp"
#include "mfmsbm/graph.hpp"
#include "mfmsbm/numeric.hpp"
#include "mfmsbm/partition.hpp"
#include "mfmsbm/sbm.hpp"

namespace mfmsbm {

// ---------------------------------------------------------------------------
// Clustering agreement

// Fraction of the C(n,2) node pairs on which the two partitions agree (both
// together or both apart). Computed from the contingency table.
inline double rand_index(std::span<const int> z1, std::span<const int> z2) {
  if (z1.size() != z2.size()) throw std::invalid_argument("rand index needs equal-length labelings");
  const long long n = static_cast<long long>(z1.size());
  if (n < 2) return 1.0;
  const Labeling a = Labeling::canonical(z1);
  const Labeling b = Labeling::canonical(z2);
  const int ka = a.num_clusters();
  const int kb = b.num_clusters();
  std::vector<long long> table(static_cast<std::size_t>(ka) * kb, 0);
  for (long long i = 0; i < n; ++i) ++table[static_cast<std::size_t>(a[i]) * kb + b[i]];
  auto c2 = [](long long x) { return x * (x - 1) / 2; };
  long long together_both = 0;
  for (long long v : table) together_both += c2(v);
  long long together_a = 0;
  for (int s : a.cluster_sizes()) together_a += c2(s);
  long long together_b = 0;
  for (int s : b.cluster_sizes()) together_b += c2(s);
  const long long total = c2(n);
  const long long agree = total - together_a - together_b + 2 * together_both;
  return static_cast<double>(agree) / static_cast<double>(total);
}

inline double rand_index(const Labeling& z1, const Labeling& z2) { return rand_index(z1.labels(), z2.labels()); }

// min over label permutations delta of #{i : delta(z1_i) != z2_i}, labels in
// [0, k). Solved as a maximum-agreement assignment on the k x k confusion
// matrix.
inline long long perm_hamming(std::span<const int> z1, std::span<const int> z2, int k) {
  if (z1.size() != z2.size()) throw std::invalid_argument("hamming distance needs equal-length labelings");
  if (k < 1) throw std::invalid_argument("label space size must be positive");
  std::vector<std::vector<long long>> confusion(static_cast<std::size_t>(k), std::vector<long long>(k, 0));
  for (std::size_t i = 0; i < z1.size(); ++i) {
    if (z1[i] < 0 || z1[i] >= k || z2[i] < 0 || z2[i] >= k) {
      throw std::invalid_argument("label outside [0, k)");
    }
    ++confusion[z1[i]][z2[i]];
  }
  const std::vector<int> col = max_weight_assignment(confusion);
  long long agree = 0;
  for (int r = 0; r < k; ++r) agree += confusion[r][col[r]];
  return static_cast<long long>(z1.size()) - agree;
}

inline long long perm_hamming(const Labeling& z1, const Labeling& z2, int k) {
  return perm_hamming(z1.labels(), z2.labels(), k);
}

// ---------------------------------------------------------------------------
// Posterior summaries

// pi_ij = fraction of samples with z_i = z_j. Dense, row-major.
class CoClusterMatrix {
 public:
  explicit CoClusterMatrix(std::span<const Labeling> samples) {
    if (samples.empty()) throw std::invalid_argument("co-clustering needs at least one sample");
    n_ = samples.front().size();
    v_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
    std::vector<long long> counts(v_.size(), 0);
    for (const Labeling& z : samples) {
      if (z.size() != n_) throw std::invalid_argument("samples have different lengths");
      for (int i = 0; i < n_; ++i) {
        for (int j = i; j < n_; ++j) {
          if (z[i] == z[j]) ++counts[static_cast<std::size_t>(i) * n_ + j];
        }
      }
    }
    const double m = static_cast<double>(samples.size());
    for (int i = 0; i < n_; ++i) {
      for (int j = i; j < n_; ++j) {
        const double p = static_cast<double>(counts[static_cast<std::size_t>(i) * n_ + j]) / m;
        v_[static_cast<std::size_t>(i) * n_ + j] = p;
        v_[static_cast<std::size_t>(j) * n_ + i] = p;
      }
    }
  }

  int size() const { return n_; }
  double operator()(int i, int j) const { return v_[static_cast<std::size_t>(i) * n_ + j]; }

  // sum_{i<j} (1(z_i = z_j) - pi_ij)^2
  double squared_loss(const Labeling& z) const {
    double loss = 0.0;
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) {
        const double d = (z[i] == z[j] ? 1.0 : 0.0) - (*this)(i, j);
        loss += d * d;
      }
    }
    return loss;
  }

 private:
  int n_ = 0;
  std::vector<double> v_;
};

struct DahlEstimate {
  Labeling z;
  std::size_t index = 0;  // position within the candidate samples
  double loss = 0.0;
};

// Sample minimizing squared distance to the co-clustering matrix; ties go to
// the earliest sample.
inline DahlEstimate dahl_estimate(std::span<const Labeling> samples) {
  if (samples.empty()) throw std::invalid_argument("Dahl estimate needs at least one sample");
  const CoClusterMatrix pi(samples);
  DahlEstimate best{samples.front(), 0, pi.squared_loss(samples.front())};
  for (std::size_t s = 1; s < samples.size(); ++s) {
    const double loss = pi.squared_loss(samples[s]);
    if (loss < best.loss) best = {samples[s], s, loss};
  }
  return best;
}

inline DahlEstimate dahl_estimate(const PosteriorSample& sample) { return dahl_estimate(sample.z); }

struct FitSummary {
  int modal_t = 0;
  Labeling z_hat;
  std::map<int, long long> t_histogram;  // pooled over all chains
  std::vector<int> per_chain_modes;
  bool vote_tie = false;  // several t values shared the top vote
};

// Mode of a t trace; ties go to the smaller t.
inline int modal_value(std::span<const int> t) {
  if (t.empty()) throw std::invalid_argument("mode of an empty trace");
  std::map<int, long long> h;
  for (int v : t) ++h[v];
  int best = h.begin()->first;
  long long best_count = h.begin()->second;
  for (auto [v, c] : h) {
    if (c > best_count) {
      best = v;
      best_count = c;
    }
  }
  return best;
}

// Per-chain modal |z|, then a majority vote across chains (ties to the
// smaller t). The point estimate is the Dahl estimate over the pooled draws of
// the chains whose mode agrees with the vote.
inline FitSummary summarize_chains(std::span<const PosteriorSample> chains) {
  FitSummary out;
  std::map<int, int> votes;
  for (const PosteriorSample& c : chains) {
    if (c.empty()) continue;
    const int m = modal_value(c.t);
    out.per_chain_modes.push_back(m);
    ++votes[m];
    for (int v : c.t) ++out.t_histogram[v];
  }
  if (votes.empty()) throw std::invalid_argument("no recorded samples to summarize");
  int best = votes.begin()->first;
  int best_votes = votes.begin()->second;
  for (auto [v, c] : votes) {
    if (c > best_votes) {
      best = v;
      best_votes = c;
    }
  }
  int at_top = 0;
  for (auto [v, c] : votes) at_top += c == best_votes ? 1 : 0;
  out.vote_tie = at_top > 1;
  out.modal_t = best;

  std::vector<Labeling> pool;
  for (const PosteriorSample& c : chains) {
    if (c.empty() || modal_value(c.t) != best) continue;
    pool.insert(pool.end(), c.z.begin(), c.z.end());
  }
  out.z_hat = dahl_estimate(pool).z;
  return out;
}

inline FitSummary summarize_chains(const PosteriorSample& single) {
  return summarize_chains(std::span<const PosteriorSample>(&single, 1));
}

// ---------------------------------------------------------------------------
// Exact posterior over partitions (enumeration oracle)

inline constexpr int kMaxExactPosteriorSize = 8;

// log of prod_{r<=s} B(E_rs + a, N_rs - E_rs + b) / B(a, b): the likelihood
// with every block probability integrated against Beta(a, b).
inline double log_integrated_likelihood(const AdjacencyMatrix& g, const Labeling& z, double a, double b) {
  const BlockCounts c = block_counts(g, z);
  const double lb0 = log_beta_fn(a, b);
  double ll = 0.0;
  for (int r = 0; r < c.k(); ++r) {
    for (int s = r; s < c.k(); ++s) {
      const double e = static_cast<double>(c.edges(r, s));
      const double m = static_cast<double>(c.pairs(r, s));
      ll += log_beta_fn(e + a, m - e + b) - lb0;
    }
  }
  return ll;
}

// Normalized posterior over all set partitions, indexed by restricted
// growth string.
class ExactPosterior {
 public:
  ExactPosterior(const AdjacencyMatrix& g, double a, double b, const PartitionPrior& prior) {
    const int n = g.size();
    if (n > kMaxExactPosteriorSize) throw std::invalid_argument("exact posterior is limited to n <= 8");
    std::vector<double> logp;
    for_each_partition(n, [&](const std::vector<int>& rgs) {
      const Labeling z(rgs);
      const double lp = prior.log_partition_prior(z.cluster_sizes()) + log_integrated_likelihood(g, z, a, b);
      index_.emplace(rgs, partitions_.size());
      partitions_.push_back(rgs);
      logp.push_back(lp);
    });
    prob_ = normalize_log_weights(logp);
  }

  std::size_t size() const { return partitions_.size(); }
  const std::vector<std::vector<int>>& partitions() const { return partitions_; }
  const std::vector<double>& probabilities() const { return prob_; }

  double probability(std::span<const int> labels) const {
    const Labeling c = Labeling::canonical(labels);
    const auto it = index_.find(c.labels());
    return it == index_.end() ? 0.0 : prob_[it->second];
  }

  // Most probable partition (first in enumeration order on ties).
  const std::vector<int>& mode() const {
    return partitions_[static_cast<std::size_t>(std::max_element(prob_.begin(), prob_.end()) - prob_.begin())];
  }

  // Total variation between this distribution and the empirical partition
  // frequencies of `samples`.
  double total_variation(std::span<const Labeling> samples) const {
    if (samples.empty()) throw std::invalid_argument("total variation needs at least one sample");
    std::vector<double> freq(prob_.size(), 0.0);
    for (const Labeling& z : samples) {
      const auto it = index_.find(z.canonicalized().labels());
      if (it == index_.end()) throw std::invalid_argument("sample is not a partition of the oracle's node set");
      freq[it->second] += 1.0;
    }
    double tv = 0.0;
    const double m = static_cast<double>(samples.size());
    for (std::size_t k = 0; k < prob_.size(); ++k) tv += std::abs(freq[k] / m - prob_[k]);
    return 0.5 * tv;
  }

 private:
  std::vector<std::vector<int>> partitions_;
  std::vector<double> prob_;
  std::map<std::vector<int>, std::size_t> index_;
};

}  // namespace mfmsbm
