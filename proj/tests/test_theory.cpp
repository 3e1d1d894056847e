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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "mfmsbm/sbm.hpp"
#include "mfmsbm/theory.hpp"
#include "oracles.hpp"

namespace mfmsbm {
namespace {

AdjacencyMatrix complete(int n) {
  AdjacencyMatrix a(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) a.set_edge(i, j);
  }
  return a;
}

std::vector<int> random_labels(int n, int k, Rng& rng) {
  std::vector<int> z(static_cast<std::size_t>(n));
  for (int& v : z) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  return z;
}

AdjacencyMatrix homogeneous_graph(const std::vector<int>& z0, double p, double q, Rng& rng) {
  const Labeling truth = Labeling::canonical(z0);
  return generate_sbm(static_cast<int>(z0.size()), truth, EdgeProbMatrix::homogeneous(truth.num_clusters(), p, q), rng);
}

TEST(Counts, Examples) {
  const HomogeneousCounts one = homogeneous_counts(complete(5), std::vector<int>(5, 0));
  EXPECT_EQ(one.n_up, 10);
  EXPECT_EQ(one.n_down, 0);
  const HomogeneousCounts c = homogeneous_counts(complete(4), std::vector<int>{0, 0, 1, 1});
  EXPECT_EQ(c.n_up, 2);
  EXPECT_EQ(c.a_up, 2);
  EXPECT_EQ(c.n_down, 4);
  EXPECT_EQ(c.a_down, 4);
}

TEST(Counts, MatchBlockTallies) {
  Rng rng(1);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(20));
    const Labeling z = Labeling::canonical(random_labels(n, 4, rng));
    const AdjacencyMatrix g = homogeneous_graph(z.labels(), 0.6, 0.2, rng);
    const BlockCounts b = block_counts(g, z);
    long long nu = 0, au = 0;
    for (int r = 0; r < b.k(); ++r) {
      nu += b.pairs(r, r);
      au += b.edges(r, r);
    }
    const HomogeneousCounts c = homogeneous_counts(g, z);
    EXPECT_EQ(c.n_up, nu);
    EXPECT_EQ(c.a_up, au);
    EXPECT_EQ(c.n_up + c.n_down, n * (n - 1) / 2);
    EXPECT_EQ(c.a_up + c.a_down, static_cast<long long>(g.edge_count()));
  }
}

TEST(Marginal, HandValues) {
  EXPECT_NEAR(log_marginal_homogeneous({0, 1, 0, 0}), -std::log(2.0), 1e-15);
  EXPECT_NEAR(log_marginal_homogeneous({2, 0, 1, 0}), -std::log(6.0), 1e-15);
}

TEST(Marginal, MatchesDoubleQuadrature) {
  Rng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(5));
    const auto z = random_labels(n, 2, rng);
    const AdjacencyMatrix g = homogeneous_graph(z, rng.uniform(), rng.uniform(), rng);
    const HomogeneousCounts c = homogeneous_counts(g, z);
    const double ref = std::log(oracle::homogeneous_double_integral(c.n_up, c.a_up, c.n_down, c.a_down));
    EXPECT_NEAR(log_marginal_homogeneous(c), ref, 1e-9);
  }
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(entropy_approx({4, 6, 2, 3}), -10.0 * std::log(2.0), 1e-12);
  EXPECT_EQ(entropy_approx({4, 6, 4, 0}), 0.0);
  EXPECT_EQ(entropy_approx({0, 6, 0, 3}), 6.0 * neg_binary_entropy(0.5));
  EXPECT_EQ(neg_binary_entropy(0.0), 0.0);
  EXPECT_EQ(neg_binary_entropy(1.0), 0.0);
}

// |l~ - log L| <= C log n with C fitted over random interior-density graphs.
TEST(Entropy, RemainderIsLogarithmic) {
  Rng rng(3);
  double c_fit = 0.0;
  for (int rep = 0; rep < 500; ++rep) {
    const int n = 4 + static_cast<int>(rng.below(37));
    const auto z0 = balanced_truth(n, 2 + static_cast<int>(rng.below(2)));
    const AdjacencyMatrix g = homogeneous_graph(z0, 0.05 + 0.9 * rng.uniform(), 0.05 + 0.9 * rng.uniform(), rng);
    const auto z = rep % 2 == 0 ? z0 : random_labels(n, 3, rng);
    const HomogeneousCounts c = homogeneous_counts(g, z);
    c_fit = std::max(c_fit, std::abs(entropy_approx(c) - log_marginal_homogeneous(c)) / std::log(n));
  }
  EXPECT_GT(c_fit, 0.0);
  EXPECT_LE(c_fit, 3.0);
}

TEST(Divergence, Values) {
  EXPECT_EQ(divergence_bar_d(0.3, 0.3), 0.0);
  EXPECT_NEAR(divergence_bar_d(0.5, 0.1), 0.16 / 0.45, 1e-15);
  EXPECT_EQ(divergence_bar_d(0.2, 0.7), divergence_bar_d(0.7, 0.2));
  EXPECT_THROW(divergence_bar_d(0.0, 0.5), std::invalid_argument);
  EXPECT_THROW(divergence_bar_d(0.5, 1.0), std::invalid_argument);
}

TEST(PairDecompositionTest, HandExample) {
  const std::vector<int> z{0, 0, 1, 1};
  const std::vector<int> z0{0, 1, 0, 1};
  const PairDecomposition d = pair_decomposition(z, z0);
  EXPECT_EQ(d.n[kUp][kUp], 0);
  EXPECT_EQ(d.n[kUp][kDown], 2);
  EXPECT_EQ(d.n[kDown][kUp], 2);
  EXPECT_EQ(d.n[kDown][kDown], 2);
  const PairDecomposition same = pair_decomposition(z0, z0);
  EXPECT_EQ(same.n[kUp][kDown], 0);
  EXPECT_EQ(same.n[kDown][kUp], 0);
}

TEST(PairDecompositionTest, Identities) {
  Rng rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 3 + static_cast<int>(rng.below(25));
    const auto z0 = random_labels(n, 3, rng);
    const auto z = random_labels(n, 3, rng);
    const AdjacencyMatrix g = homogeneous_graph(z0, 0.7, 0.2, rng);
    const PairDecomposition d = pair_decomposition(g, z, z0);
    const HomogeneousCounts cz = homogeneous_counts(g, z);
    const HomogeneousCounts c0 = homogeneous_counts(g, z0);
    EXPECT_EQ(d.n_z(kUp), cz.n_up);
    EXPECT_EQ(d.a_z(kDown), cz.a_down);
    EXPECT_EQ(d.n_z0(kDown), c0.n_down);
    EXPECT_EQ(d.a_z0(kUp), c0.a_up);
    for (int x : {kUp, kDown}) {
      if (d.n_z(x) > 0) {
        EXPECT_NEAR(d.omega(x, kUp) + d.omega(x, kDown), 1.0, 1e-15);
      }
      if (d.n_z0(x) > 0) {
        EXPECT_NEAR(d.omega_tilde(kUp, x) + d.omega_tilde(kDown, x), 1.0, 1e-15);
      }
      EXPECT_NEAR(d.x_rate(x), d.omega(x, kUp) * d.w(x, kUp) + d.omega(x, kDown) * d.w(x, kDown), 1e-12);
      EXPECT_NEAR(d.y_rate(x), d.omega_tilde(kUp, x) * d.w(kUp, x) + d.omega_tilde(kDown, x) * d.w(kDown, x), 1e-12);
    }
  }
}

TEST(Functionals, ZeroAtTruthAndPermutationSymmetric) {
  Rng rng(5);
  const auto z0 = balanced_truth(9, 3);
  const CombinatorialFunctionals f = combinatorial_functionals(z0, z0);
  EXPECT_EQ(f.n_bold, 0.0);
  EXPECT_EQ(f.n_tilde, 0.0);
  for (int rep = 0; rep < 50; ++rep) {
    const auto z = random_labels(9, 3, rng);
    std::vector<int> perm(9);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<int> zp(9), z0p(9);
    for (int i = 0; i < 9; ++i) {
      zp[perm[i]] = z[i];
      z0p[perm[i]] = z0[i];
    }
    const CombinatorialFunctionals a = combinatorial_functionals(z, z0);
    const CombinatorialFunctionals b = combinatorial_functionals(zp, z0p);
    EXPECT_EQ(a.n_tilde, b.n_tilde);
    EXPECT_EQ(a.n_bold, b.n_bold);
  }
}

TEST(Functionals, BoundShapesOnExhaustiveSweep) {
  const int n = 6, k = 2;
  const auto z0 = balanced_truth(n, k);
  double c_low = std::numeric_limits<double>::infinity();
  double c_high = 0.0;
  for_each_labeling(n, k, [&](std::span<const int> z) {
    const long long r = perm_hamming(z, z0, k);
    if (r == 0) return;
    const CombinatorialFunctionals f = combinatorial_functionals(z, z0);
    const double rd = static_cast<double>(r);
    c_low = std::min(c_low, f.n_tilde / std::min(rd * n / k, 1.0 * n * n / (k * k)));
    c_high = std::max(c_high, f.n_bold / (n * rd / k + rd * rd));
  });
  EXPECT_GT(c_low, 0.0);
  EXPECT_GT(c_high, 0.0);
  EXPECT_TRUE(std::isfinite(c_high));
}

TEST(Gap, StrongSignalRarelyNegative) {
  const GapReport r = marglik_gap_experiment(10, 2, 0.9, 0.1, 5, 42);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_EQ(r.pairs_checked, 5 * (1024 - 2));
  EXPECT_LT(r.violation_fraction, 0.01);
  EXPECT_NEAR(r.bar_d_n_over_k, divergence_bar_d(0.9, 0.1) * 5.0, 1e-12);
  EXPECT_FALSE(r.min_gap_by_r.empty());
  EXPECT_GT(r.mean_gap, 0.0);
}

TEST(Gap, NoSignalIsCenteredNearZero) {
  const GapReport strong = marglik_gap_experiment(10, 2, 0.9, 0.1, 5, 7);
  const GapReport none = marglik_gap_experiment(10, 2, 0.4, 0.4, 5, 7);
  EXPECT_EQ(none.bar_d, 0.0);
  EXPECT_LT(std::abs(none.mean_gap), 0.1 * strong.mean_gap);
  EXPECT_GT(none.violation_fraction, 0.05);
}

TEST(Gap, SampledModeAndGuards) {
  const GapReport r = marglik_gap_experiment(40, 3, 0.8, 0.1, 2, 1, 500);
  EXPECT_FALSE(r.exhaustive);
  EXPECT_LE(r.pairs_checked, 1000);
  EXPECT_THROW(marglik_gap_experiment(20, 2, 0.8, 0.1, 1, 1), std::invalid_argument);
  EXPECT_THROW(marglik_gap_experiment(10, 1, 0.8, 0.1, 1, 1), std::invalid_argument);
  EXPECT_THROW(marglik_gap_experiment(10, 2, 0.8, 0.1, 0, 1), std::invalid_argument);
}

}  // namespace
}  // namespace mfmsbm
