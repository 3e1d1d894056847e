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

// Deterministic quantities behind the clustering-consistency analysis of the
// homogeneous block model (p within, q between, uniform priors on both).
//
// Notation: "up" pairs share a block, "down" pairs do not. For two labelings
// z and z0, n[x][y] counts pairs that are x under z and y under z0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "mfmsbm/graph.hpp"
#include "mfmsbm/numeric.hpp"
#include "mfmsbm/posterior.hpp"
#include "mfmsbm/random.hpp"
#include "mfmsbm/sbm.hpp"

namespace mfmsbm {

enum Spin : int { kUp = 0, kDown = 1 };

struct HomogeneousCounts {
  long long n_up = 0;
  long long n_down = 0;
  long long a_up = 0;
  long long a_down = 0;
};

inline HomogeneousCounts homogeneous_counts(const AdjacencyMatrix& g, std::span<const int> z) {
  const int n = g.size();
  if (static_cast<int>(z.size()) != n) throw std::invalid_argument("labeling length does not match node count");
  HomogeneousCounts c;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool e = g.has_edge(i, j);
      if (z[i] == z[j]) {
        ++c.n_up;
        c.a_up += e;
      } else {
        ++c.n_down;
        c.a_down += e;
      }
    }
  }
  return c;
}

inline HomogeneousCounts homogeneous_counts(const AdjacencyMatrix& g, const Labeling& z) {
  return homogeneous_counts(g, std::span<const int>(z.labels()));
}

// log of [(n_up + 1) C(n_up, A_up)]^-1 [(n_down + 1) C(n_down, A_down)]^-1,
// the likelihood with p and q integrated against U(0,1).
inline double log_marginal_homogeneous(const HomogeneousCounts& c) {
  auto part = [](double n, double a) { return -std::log(n + 1.0) - log_choose(n, a); };
  return part(static_cast<double>(c.n_up), static_cast<double>(c.a_up)) +
         part(static_cast<double>(c.n_down), static_cast<double>(c.a_down));
}

// Negative binary entropy x log x + (1-x) log(1-x), extended by continuity
// to 0 at both endpoints.
inline double neg_binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return x * std::log(x) + (1.0 - x) * std::log1p(-x);
}

// n_up H(A_up/n_up) + n_down H(A_down/n_down); an empty pair set contributes 0.
inline double entropy_approx(const HomogeneousCounts& c) {
  auto part = [](long long n, long long a) {
    return n == 0 ? 0.0 : static_cast<double>(n) * neg_binary_entropy(static_cast<double>(a) / static_cast<double>(n));
  };
  return part(c.n_up, c.a_up) + part(c.n_down, c.a_down);
}

// (p0 - q0)^2 / (max(p0,q0) (1 - min(p0,q0))).
inline double divergence_bar_d(double p0, double q0) {
  if (!(p0 > 0.0 && p0 < 1.0 && q0 > 0.0 && q0 < 1.0)) {
    throw std::invalid_argument("signal divergence needs p0, q0 in (0,1)");
  }
  const double d = p0 - q0;
  return d * d / (std::max(p0, q0) * (1.0 - std::min(p0, q0)));
}

// Four-way split of the node pairs by (z, z0) co-membership.
struct PairDecomposition {
  std::array<std::array<long long, 2>, 2> n{};  // n[x][y]: x under z, y under z0
  std::array<std::array<long long, 2>, 2> a{};  // edges among those pairs

  long long n_z(int x) const { return n[x][kUp] + n[x][kDown]; }
  long long n_z0(int y) const { return n[kUp][y] + n[kDown][y]; }
  long long a_z(int x) const { return a[x][kUp] + a[x][kDown]; }
  long long a_z0(int y) const { return a[kUp][y] + a[kDown][y]; }

  // Ratios with a zero denominator are reported as 0.
  static double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

  double omega(int x, int y) const { return ratio(static_cast<double>(n[x][y]), static_cast<double>(n_z(x))); }
  double omega_tilde(int x, int y) const {
    return ratio(static_cast<double>(n[x][y]), static_cast<double>(n_z0(y)));
  }
  double w(int x, int y) const { return ratio(static_cast<double>(a[x][y]), static_cast<double>(n[x][y])); }
  double x_rate(int x) const { return ratio(static_cast<double>(a_z(x)), static_cast<double>(n_z(x))); }
  double y_rate(int y) const { return ratio(static_cast<double>(a_z0(y)), static_cast<double>(n_z0(y))); }

  // L_x = sum_y omega(x,y) Y_y - X_x.
  double l_stat(int x) const {
    return omega(x, kUp) * y_rate(kUp) + omega(x, kDown) * y_rate(kDown) - x_rate(x);
  }
};

inline PairDecomposition pair_decomposition(std::span<const int> z, std::span<const int> z0,
                                            const AdjacencyMatrix* g = nullptr) {
  if (z.size() != z0.size()) throw std::invalid_argument("pair decomposition needs equal-length labelings");
  if (g && g->size() != static_cast<int>(z.size())) {
    throw std::invalid_argument("labeling length does not match node count");
  }
  PairDecomposition d;
  const int n = static_cast<int>(z.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int x = z[i] == z[j] ? kUp : kDown;
      const int y = z0[i] == z0[j] ? kUp : kDown;
      ++d.n[x][y];
      if (g && g->has_edge(i, j)) ++d.a[x][y];
    }
  }
  return d;
}

inline PairDecomposition pair_decomposition(const AdjacencyMatrix& g, std::span<const int> z,
                                            std::span<const int> z0) {
  return pair_decomposition(z, z0, &g);
}

struct CombinatorialFunctionals {
  double n_bold = 0.0;   // n_uu n_du / n_u(z0) + n_ud n_dd / n_d(z0)
  double n_tilde = 0.0;  // n_uu n_ud / n_u(z)  + n_du n_dd / n_d(z)
};

inline CombinatorialFunctionals combinatorial_functionals(const PairDecomposition& d) {
  using R = PairDecomposition;
  auto f = [](long long v) { return static_cast<double>(v); };
  CombinatorialFunctionals c;
  c.n_bold = R::ratio(f(d.n[kUp][kUp]) * f(d.n[kDown][kUp]), f(d.n_z0(kUp))) +
             R::ratio(f(d.n[kUp][kDown]) * f(d.n[kDown][kDown]), f(d.n_z0(kDown)));
  c.n_tilde = R::ratio(f(d.n[kUp][kUp]) * f(d.n[kUp][kDown]), f(d.n_z(kUp))) +
              R::ratio(f(d.n[kDown][kUp]) * f(d.n[kDown][kDown]), f(d.n_z(kDown)));
  return c;
}

inline CombinatorialFunctionals combinatorial_functionals(std::span<const int> z, std::span<const int> z0) {
  return combinatorial_functionals(pair_decomposition(z, z0));
}

// Balanced truth: K contiguous blocks whose sizes differ by at most one (the
// larger ones last).
inline std::vector<int> balanced_truth(int n, int k) {
  if (k < 1 || k > n) throw std::invalid_argument("need 1 <= K <= n");
  std::vector<int> z;
  z.reserve(static_cast<std::size_t>(n));
  const int base = n / k;
  const int extra = n % k;
  for (int b = 0; b < k; ++b) {
    const int size = base + (b >= k - extra ? 1 : 0);
    z.insert(z.end(), static_cast<std::size_t>(size), b);
  }
  return z;
}

// Visits every labeling in {0..k-1}^n (odometer order).
template <class Fn>
void for_each_labeling(int n, int k, Fn&& fn) {
  std::vector<int> z(static_cast<std::size_t>(n), 0);
  for (;;) {
    fn(std::span<const int>(z));
    int pos = n - 1;
    while (pos >= 0 && ++z[pos] == k) z[pos--] = 0;
    if (pos < 0) return;
  }
}

// Entropy-gap diagnostic report.
struct GapReport {
  int n = 0;
  int k = 0;
  double p0 = 0.0;
  double q0 = 0.0;
  int n_draws = 0;
  std::uint64_t seed = 0;
  bool exhaustive = true;
  double bar_d = 0.0;
  double bar_d_n_over_k = 0.0;
  long long pairs_checked = 0;     // (graph, z) pairs with d(z, z0) >= 1
  long long negative_gaps = 0;     // of those, gap < 0
  double violation_fraction = 0.0;
  double mean_gap = 0.0;
  double min_gap_ratio = std::numeric_limits<double>::infinity();  // min gap / d
  std::map<int, double> min_gap_by_r;                              // r -> min gap
  std::map<int, long long> count_by_r;
};

inline constexpr long long kMaxExhaustiveLabelings = 5'000'000;

// For n_draws graphs from the homogeneous truth (balanced K blocks), computes
// l~(z0) - l~(z) for every labeling z in [K]^n (exhaustive mode) or for
// `sampled_z` uniform labelings per graph, grouped by r = d(z, z0).
inline GapReport marglik_gap_experiment(int n, int k, double p0, double q0, int n_draws, std::uint64_t seed,
                                        long long sampled_z = 0) {
  if (k < 2) throw std::invalid_argument("gap experiment needs K >= 2");
  if (n < k || n_draws < 1) throw std::invalid_argument("gap experiment needs n >= K and at least one graph");
  GapReport rep;
  rep.n = n;
  rep.k = k;
  rep.p0 = p0;
  rep.q0 = q0;
  rep.n_draws = n_draws;
  rep.seed = seed;
  rep.bar_d = divergence_bar_d(p0, q0);
  rep.bar_d_n_over_k = rep.bar_d * n / k;
  const double space = std::pow(static_cast<double>(k), n);
  rep.exhaustive = sampled_z <= 0;
  if (rep.exhaustive && (n > 14 || space > static_cast<double>(kMaxExhaustiveLabelings))) {
    throw std::invalid_argument("exhaustive sweep infeasible for this (n, K); pass a sampled-z count");
  }
  const std::vector<int> z0 = balanced_truth(n, k);
  const Labeling truth(z0);
  const EdgeProbMatrix q = EdgeProbMatrix::homogeneous(k, p0, q0);
  Rng rng(seed);
  double gap_sum = 0.0;
  auto visit = [&](const AdjacencyMatrix& g, double l0, std::span<const int> z) {
    const long long r = perm_hamming(z, z0, k);
    if (r == 0) return;
    const double gap = l0 - entropy_approx(homogeneous_counts(g, z));
    ++rep.pairs_checked;
    gap_sum += gap;
    if (gap < 0.0) ++rep.negative_gaps;
    rep.min_gap_ratio = std::min(rep.min_gap_ratio, gap / static_cast<double>(r));
    auto [it, inserted] = rep.min_gap_by_r.emplace(static_cast<int>(r), gap);
    if (!inserted) it->second = std::min(it->second, gap);
    ++rep.count_by_r[static_cast<int>(r)];
  };
  for (int d = 0; d < n_draws; ++d) {
    const AdjacencyMatrix g = generate_sbm(n, truth, q, rng);
    const double l0 = entropy_approx(homogeneous_counts(g, std::span<const int>(z0)));
    if (rep.exhaustive) {
      for_each_labeling(n, k, [&](std::span<const int> z) { visit(g, l0, z); });
    } else {
      std::vector<int> z(static_cast<std::size_t>(n));
      for (long long s = 0; s < sampled_z; ++s) {
        for (int& v : z) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
        visit(g, l0, z);
      }
    }
  }
  if (rep.pairs_checked > 0) {
    const double m = static_cast<double>(rep.pairs_checked);
    rep.violation_fraction = static_cast<double>(rep.negative_gaps) / m;
    rep.mean_gap = gap_sum / m;
  }
  return rep;
}

}  // namespace mfmsbm
