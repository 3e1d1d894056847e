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
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mfmsbm {

// Undirected simple graph on n >= 2 nodes, stored as a bit-packed strict
// upper triangle. Node ids are 0-based.
class AdjacencyMatrix {
 public:
  explicit AdjacencyMatrix(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("graph needs at least 2 nodes");
    const std::size_t pairs = pair_count();
    bits_.assign((pairs + 63) / 64, 0);
  }

  int size() const { return n_; }
  std::size_t pair_count() const {
    return static_cast<std::size_t>(n_) * (n_ - 1) / 2;
  }

  bool has_edge(int i, int j) const {
    if (i == j) return false;
    const std::size_t k = index(i, j);
    return (bits_[k >> 6] >> (k & 63)) & 1u;
  }

  void set_edge(int i, int j, bool on = true) {
    if (i == j) throw std::invalid_argument("self-loops are not allowed");
    check_node(i);
    check_node(j);
    const std::size_t k = index(i, j);
    const std::uint64_t mask = std::uint64_t{1} << (k & 63);
    if (on) {
      bits_[k >> 6] |= mask;
    } else {
      bits_[k >> 6] &= ~mask;
    }
  }

  std::size_t edge_count() const {
    std::size_t c = 0;
    for (std::uint64_t w : bits_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }

  // Neighbour lists, ascending.
  std::vector<std::vector<int>> adjacency_lists() const {
    std::vector<std::vector<int>> adj(n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) {
        if (has_edge(i, j)) {
          adj[i].push_back(j);
          adj[j].push_back(i);
        }
      }
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());
    return adj;
  }

  bool operator==(const AdjacencyMatrix&) const = default;

 private:
  void check_node(int i) const {
    if (i < 0 || i >= n_) {
      throw std::out_of_range("node id " + std::to_string(i) + " out of range");
    }
  }
  std::size_t index(int i, int j) const {
    if (i > j) std::swap(i, j);
    const auto ii = static_cast<std::size_t>(i);
    return ii * n_ - ii * (ii + 1) / 2 + static_cast<std::size_t>(j - i - 1);
  }

  int n_;
  std::vector<std::uint64_t> bits_;
};

// Community assignment with contiguous 0-based labels 0..t-1; every label in
// that range is used at least once.
class Labeling {
 public:
  Labeling() = default;

  explicit Labeling(std::vector<int> labels) : labels_(std::move(labels)) {
    int max_label = -1;
    for (int v : labels_) {
      if (v < 0) throw std::invalid_argument("labels must be non-negative");
      max_label = std::max(max_label, v);
    }
    std::vector<char> seen(static_cast<std::size_t>(max_label + 1), 0);
    for (int v : labels_) seen[v] = 1;
    for (char s : seen) {
      if (!s) throw std::invalid_argument("labels are not contiguous");
    }
    num_clusters_ = max_label + 1;
  }

  // Relabels arbitrary integer labels into contiguous labels by order of
  // first appearance.
  static Labeling canonical(std::span<const int> raw) {
    std::unordered_map<int, int> remap;
    std::vector<int> out;
    out.reserve(raw.size());
    for (int v : raw) {
      auto [it, inserted] = remap.emplace(v, static_cast<int>(remap.size()));
      out.push_back(it->second);
    }
    return Labeling(std::move(out));
  }

  // 1-based labels from files. Contiguity is required, not repaired.
  static Labeling from_one_based(std::span<const int> raw) {
    std::vector<int> out;
    out.reserve(raw.size());
    for (int v : raw) {
      if (v < 1) throw std::invalid_argument("1-based labels must be >= 1");
      out.push_back(v - 1);
    }
    return Labeling(std::move(out));
  }

  int size() const { return static_cast<int>(labels_.size()); }
  int num_clusters() const { return num_clusters_; }
  int operator[](int i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }

  std::vector<int> cluster_sizes() const {
    std::vector<int> s(num_clusters_, 0);
    for (int v : labels_) ++s[v];
    return s;
  }

  std::vector<int> one_based() const {
    std::vector<int> out(labels_);
    for (int& v : out) ++v;
    return out;
  }

  // Same partition, labels renumbered by first appearance.
  Labeling canonicalized() const { return canonical(labels_); }

  bool operator==(const Labeling&) const = default;

 private:
  std::vector<int> labels_;
  int num_clusters_ = 0;
};

// Symmetric K x K matrix of block edge probabilities.
class EdgeProbMatrix {
 public:
  EdgeProbMatrix() = default;

  explicit EdgeProbMatrix(int k, double fill = 0.0)
      : k_(k), q_(static_cast<std::size_t>(k) * k, fill) {
    if (k < 1) throw std::invalid_argument("edge probability matrix needs k >= 1");
    check_prob(fill);
  }

  // Homogeneous block model: p on the diagonal, q elsewhere.
  static EdgeProbMatrix homogeneous(int k, double p, double q) {
    EdgeProbMatrix m(k, q);
    for (int r = 0; r < k; ++r) m.set(r, r, p);
    return m;
  }

  static EdgeProbMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    const int k = static_cast<int>(rows.size());
    EdgeProbMatrix m(k);
    for (int r = 0; r < k; ++r) {
      if (static_cast<int>(rows[r].size()) != k) {
        throw std::invalid_argument("edge probability matrix must be square");
      }
      for (int s = 0; s < k; ++s) {
        if (rows[r][s] != rows[s][r]) {
          throw std::invalid_argument("edge probability matrix must be symmetric");
        }
        m.set(r, s, rows[r][s]);
      }
    }
    return m;
  }

  int k() const { return k_; }
  double operator()(int r, int s) const { return q_[static_cast<std::size_t>(r) * k_ + s]; }

  void set(int r, int s, double v) {
    check_prob(v);
    q_[static_cast<std::size_t>(r) * k_ + s] = v;
    q_[static_cast<std::size_t>(s) * k_ + r] = v;
  }

  bool operator==(const EdgeProbMatrix&) const = default;

 private:
  static void check_prob(double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("edge probability outside [0,1]");
    }
  }

  int k_ = 0;
  std::vector<double> q_;
};

// Per-node degree-correction weights in (0, 1].
class DegreeWeights {
 public:
  explicit DegreeWeights(std::vector<double> w) : w_(std::move(w)) {
    for (double v : w_) {
      if (!(v > 0.0 && v <= 1.0)) {
        throw std::invalid_argument("degree weights must lie in (0,1]");
      }
    }
  }

  static DegreeWeights ones(int n) { return DegreeWeights(std::vector<double>(n, 1.0)); }

  int size() const { return static_cast<int>(w_.size()); }
  double operator[](int i) const { return w_[i]; }
  const std::vector<double>& values() const { return w_; }

 private:
  std::vector<double> w_;
};

}  // namespace mfmsbm
