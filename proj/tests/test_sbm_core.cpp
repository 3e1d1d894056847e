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

#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "mfmsbm/graph.hpp"
#include "mfmsbm/io.hpp"
#include "mfmsbm/random.hpp"
#include "mfmsbm/sbm.hpp"
#include "mfmsbm/study.hpp"

namespace mfmsbm {
namespace {

AdjacencyMatrix complete(int n) {
  AdjacencyMatrix a(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) a.set_edge(i, j);
  }
  return a;
}

Labeling random_labeling(int n, int k, Rng& rng) {
  std::vector<int> z(static_cast<std::size_t>(n));
  for (int& v : z) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  return Labeling::canonical(z);
}

TEST(Graph, RejectsBadShapes) {
  EXPECT_THROW(AdjacencyMatrix(1), std::invalid_argument);
  AdjacencyMatrix a(3);
  EXPECT_THROW(a.set_edge(1, 1), std::invalid_argument);
  a.set_edge(2, 0);
  EXPECT_TRUE(a.has_edge(0, 2));
  EXPECT_TRUE(a.has_edge(2, 0));
  EXPECT_FALSE(a.has_edge(0, 0));
  EXPECT_EQ(a.edge_count(), 1u);
}

TEST(Graph, LabelingContiguity) {
  EXPECT_THROW(Labeling(std::vector<int>{0, 2}), std::invalid_argument);
  const Labeling z = Labeling::canonical(std::vector<int>{7, 3, 7, 9});
  EXPECT_EQ(z.labels(), (std::vector<int>{0, 1, 0, 2}));
  EXPECT_EQ(z.num_clusters(), 3);
  EXPECT_EQ(z.one_based(), (std::vector<int>{1, 2, 1, 3}));
}

TEST(Graph, EdgeProbMatrixSymmetry) {
  EXPECT_THROW(EdgeProbMatrix::from_rows({{0.1, 0.2}, {0.3, 0.1}}), std::invalid_argument);
  EdgeProbMatrix q(2, 0.5);
  q.set(0, 1, 0.25);
  EXPECT_EQ(q(1, 0), 0.25);
  EXPECT_THROW(q.set(0, 0, 1.5), std::invalid_argument);
}

TEST(Generate, ProbabilityOneAndZero) {
  Rng rng(3);
  const AdjacencyMatrix a = generate_sbm(2, Labeling({0, 0}), EdgeProbMatrix(1, 1.0), rng);
  EXPECT_TRUE(a.has_edge(0, 1));
  const AdjacencyMatrix b = generate_sbm(3, Labeling({0, 0, 1}), EdgeProbMatrix::homogeneous(2, 0.0, 0.0), rng);
  EXPECT_EQ(b.edge_count(), 0u);
}

TEST(Generate, LabelOutOfRange) {
  Rng rng(1);
  EXPECT_THROW(generate_sbm(3, Labeling({0, 1, 2}), EdgeProbMatrix(2, 0.5), rng), std::invalid_argument);
}

TEST(Generate, WithinBlockDensity) {
  const Labeling z = truth_labeling(community_sizes(100, 3));
  Rng rng(2024);
  const AdjacencyMatrix a = generate_sbm(100, z, EdgeProbMatrix::homogeneous(3, 0.5, 0.1), rng);
  const BlockCounts c = block_counts(a, z);
  long long pairs = 0;
  long long edges = 0;
  for (int r = 0; r < 3; ++r) {
    pairs += c.pairs(r, r);
    edges += c.edges(r, r);
  }
  EXPECT_EQ(pairs, 1617);
  const double density = static_cast<double>(edges) / pairs;
  EXPECT_GE(density, 0.45);
  EXPECT_LE(density, 0.55);
}

TEST(Generate, SeededDeterminism) {
  const Labeling z = truth_labeling(community_sizes(40, 2));
  const EdgeProbMatrix q = EdgeProbMatrix::homogeneous(2, 0.4, 0.1);
  Rng r1(77), r2(77), r3(78);
  const AdjacencyMatrix a = generate_sbm(40, z, q, r1);
  EXPECT_EQ(a, generate_sbm(40, z, q, r2));
  EXPECT_FALSE(a == generate_sbm(40, z, q, r3));
}

TEST(Generate, UnitWeightsReproduceSbm) {
  const Labeling z = truth_labeling(community_sizes(30, 3));
  const EdgeProbMatrix q = EdgeProbMatrix::homogeneous(3, 0.6, 0.2);
  Rng r1(9), r2(9);
  EXPECT_EQ(generate_sbm(30, z, q, r1), generate_dcsbm(30, z, q, DegreeWeights::ones(30), r2));
}

TEST(Generate, DegreeCorrectedProbability) {
  // theta_12 = 0.5 * 0.5 * 0.8 = 0.2: empirical frequency over many draws.
  const DegreeWeights w({0.5, 0.5, 1.0, 1.0});
  const Labeling z({0, 0, 0, 0});
  const EdgeProbMatrix q(1, 0.8);
  Rng rng(5);
  int hits = 0;
  const int draws = 40000;
  for (int d = 0; d < draws; ++d) hits += generate_dcsbm(4, z, q, w, rng).has_edge(0, 1);
  const double se = std::sqrt(0.2 * 0.8 / draws);
  EXPECT_NEAR(static_cast<double>(hits) / draws, 0.2, 4 * se);
  EXPECT_THROW(DegreeWeights({0.0, 1.0}), std::invalid_argument);
}

TEST(Generate, DegreeWeightsFraction) {
  Rng rng(11);
  const DegreeWeights w = degree_weights(100, 0.3, 0.8, rng);
  int low = 0;
  for (double v : w.values()) low += v == 0.8;
  EXPECT_EQ(low, 30);
}

TEST(Likelihood, SmallCases) {
  const AdjacencyMatrix empty(3);
  EXPECT_NEAR(log_likelihood(empty, Labeling({0, 0, 0}), EdgeProbMatrix(1, 0.5)), 3 * std::log(0.5), 1e-15);
  AdjacencyMatrix one(2);
  one.set_edge(0, 1);
  EXPECT_NEAR(log_likelihood(one, Labeling({0, 0}), EdgeProbMatrix(1, 0.3)), std::log(0.3), 1e-15);
  EXPECT_EQ(log_likelihood(one, Labeling({0, 0}), EdgeProbMatrix(1, 0.0)), kNegInf);
  EXPECT_EQ(log_likelihood(empty, Labeling({0, 0, 0}), EdgeProbMatrix(1, 0.0)), 0.0);
  EXPECT_THROW(log_likelihood(empty, Labeling({0, 0}), EdgeProbMatrix(1, 0.5)), std::invalid_argument);
}

TEST(Likelihood, MatchesPerEdgeSum) {
  Rng rng(123);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 5 + static_cast<int>(rng.below(16));
    const int k = 1 + static_cast<int>(rng.below(4));
    const Labeling z = random_labeling(n, k, rng);
    EdgeProbMatrix q(z.num_clusters());
    for (int r = 0; r < q.k(); ++r) {
      for (int s = r; s < q.k(); ++s) q.set(r, s, 0.05 + 0.9 * rng.uniform());
    }
    const AdjacencyMatrix a = generate_sbm(n, z, q, rng);
    double brute = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double p = q(z[i], z[j]);
        brute += std::log(a.has_edge(i, j) ? p : 1.0 - p);
      }
    }
    EXPECT_NEAR(log_likelihood(a, z, q), brute, 1e-12 * std::max(1.0, std::abs(brute)));
  }
}

TEST(BlockCounts, CompleteGraphTwoBlocks) {
  const BlockCounts c = block_counts(complete(4), Labeling({0, 0, 1, 1}));
  EXPECT_EQ(c.pairs(0, 0), 1);
  EXPECT_EQ(c.edges(0, 0), 1);
  EXPECT_EQ(c.pairs(1, 1), 1);
  EXPECT_EQ(c.pairs(0, 1), 4);
  EXPECT_EQ(c.edges(1, 0), 4);
}

TEST(BlockCounts, TotalsReconcile) {
  Rng rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(12));
    const Labeling z = random_labeling(n, 1 + static_cast<int>(rng.below(4)), rng);
    const AdjacencyMatrix a = generate_sbm(n, z, EdgeProbMatrix(z.num_clusters(), 0.4), rng);
    const BlockCounts c = block_counts(a, z);
    EXPECT_EQ(c.total_pairs(), n * (n - 1) / 2);
    EXPECT_EQ(c.total_edges(), static_cast<long long>(a.edge_count()));
  }
  const BlockCounts one = block_counts(complete(7), Labeling(std::vector<int>(7, 0)));
  EXPECT_EQ(one.pairs(0, 0), 21);
}

TEST(Io, EdgeListRoundTrip) {
  const Labeling z = truth_labeling(community_sizes(25, 2));
  Rng rng(4);
  const AdjacencyMatrix a = generate_sbm(25, z, EdgeProbMatrix::homogeneous(2, 0.3, 0.05), rng);
  std::stringstream ss;
  write_edge_list(ss, a);
  EXPECT_EQ(read_edge_list(ss), a);
}

TEST(Io, IsolatedTrailingNodesSurviveRoundTrip) {
  AdjacencyMatrix a(5);
  a.set_edge(0, 1);
  std::stringstream ss;
  write_edge_list(ss, a);
  const AdjacencyMatrix b = read_edge_list(ss);
  EXPECT_EQ(b.size(), 5);
  EXPECT_EQ(b, a);
}

TEST(Io, EdgeListErrorsCarryLineNumbers) {
  std::istringstream dup("1 2\n2 1\n");
  try {
    read_edge_list(dup, "g.txt");
    FAIL() << "duplicate edge accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  std::istringstream loop("# comment\n3 3\n");
  try {
    read_edge_list(loop, "g.txt");
    FAIL() << "self-loop accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  std::istringstream junk("1 x\n");
  EXPECT_THROW(read_edge_list(junk), ParseError);
  std::istringstream zero("0 1\n");
  EXPECT_THROW(read_edge_list(zero), ParseError);
}

TEST(Io, AdjacencyCsv) {
  std::istringstream in("0,1,0\n1,0,1\n0,1,0\n");
  const AdjacencyMatrix a = read_adjacency_csv(in);
  EXPECT_TRUE(a.has_edge(0, 1));
  EXPECT_TRUE(a.has_edge(1, 2));
  EXPECT_FALSE(a.has_edge(0, 2));
  std::stringstream out;
  write_adjacency_csv(out, a);
  EXPECT_EQ(read_adjacency_csv(out), a);
  std::istringstream asym("0,1\n0,0\n");
  EXPECT_THROW(read_adjacency_csv(asym), ParseError);
}

TEST(Io, LabelingIsOneBased) {
  std::istringstream in("1\n2\n1\n");
  const Labeling z = read_labeling(in);
  EXPECT_EQ(z.labels(), (std::vector<int>{0, 1, 0}));
  std::stringstream out;
  write_labeling(out, z);
  EXPECT_EQ(out.str(), "1\n2\n1\n");
  std::istringstream gap("1\n3\n");
  EXPECT_THROW(read_labeling(gap), std::invalid_argument);
}

}  // namespace
}  // namespace mfmsbm
