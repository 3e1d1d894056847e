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
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mfmsbm/graph.hpp"

namespace mfmsbm {

// A set partition of {0..n-1}. Blocks are kept sorted internally and ordered
// by their smallest element, so two SetPartitions compare equal exactly when
// they describe the same partition.
class SetPartition {
 public:
  SetPartition() = default;

  SetPartition(int n, std::vector<std::vector<int>> blocks) : n_(n), blocks_(std::move(blocks)) {
    std::vector<char> seen(static_cast<std::size_t>(std::max(n, 0)), 0);
    int covered = 0;
    for (auto& b : blocks_) {
      if (b.empty()) throw std::invalid_argument("partition blocks must be nonempty");
      std::sort(b.begin(), b.end());
      for (int v : b) {
        if (v < 0 || v >= n) throw std::invalid_argument("partition element out of range");
        if (seen[v]) throw std::invalid_argument("partition blocks overlap");
        seen[v] = 1;
        ++covered;
      }
    }
    if (covered != n) throw std::invalid_argument("partition does not cover every element");
    std::sort(blocks_.begin(), blocks_.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
  }

  static SetPartition from_labels(std::span<const int> labels) {
    const Labeling z = Labeling::canonical(labels);
    std::vector<std::vector<int>> blocks(z.num_clusters());
    for (int i = 0; i < z.size(); ++i) blocks[z[i]].push_back(i);
    return SetPartition(z.size(), std::move(blocks));
  }

  static SetPartition from_labeling(const Labeling& z) { return from_labels(z.labels()); }

  int size() const { return n_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }

  std::vector<int> block_sizes() const {
    std::vector<int> s;
    s.reserve(blocks_.size());
    for (const auto& b : blocks_) s.push_back(static_cast<int>(b.size()));
    return s;
  }

  // Labels by block order, i.e. the restricted growth string.
  Labeling to_labeling() const {
    std::vector<int> z(static_cast<std::size_t>(n_), 0);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      for (int v : blocks_[b]) z[v] = static_cast<int>(b);
    }
    return Labeling(std::move(z));
  }

  bool operator==(const SetPartition&) const = default;
  auto operator<=>(const SetPartition&) const = default;

 private:
  int n_ = 0;
  std::vector<std::vector<int>> blocks_;
};

inline constexpr int kMaxEnumerationSize = 12;

// Streams the set partitions of {0..n-1} as restricted growth strings
// a_0 = 0, a_i <= 1 + max(a_0..a_{i-1}), in lexicographic order.
class PartitionEnumerator {
 public:
  explicit PartitionEnumerator(int n) : rgs_(checked_size(n), 0), max_(rgs_.size(), 0) {}

  // Current restricted growth string; valid until next() returns false.
  const std::vector<int>& labels() const { return rgs_; }
  Labeling labeling() const { return Labeling(rgs_); }
  SetPartition partition() const { return SetPartition::from_labels(rgs_); }
  int num_blocks() const { return max_.back() + 1; }

  bool next() {
    const int n = static_cast<int>(rgs_.size());
    for (int i = n - 1; i >= 1; --i) {
      if (rgs_[i] <= max_[i - 1]) {
        ++rgs_[i];
        max_[i] = std::max(max_[i - 1], rgs_[i]);
        for (int j = i + 1; j < n; ++j) {
          rgs_[j] = 0;
          max_[j] = max_[i];
        }
        return true;
      }
    }
    return false;
  }

 private:
  static std::size_t checked_size(int n) {
    if (n < 1) throw std::invalid_argument("partition enumeration needs n >= 1");
    if (n > kMaxEnumerationSize) {
      throw std::invalid_argument("refusing to enumerate partitions for n > 12");
    }
    return static_cast<std::size_t>(n);
  }

  std::vector<int> rgs_;
  std::vector<int> max_;  // running maximum of rgs_[0..i]
};

template <class Fn>
void for_each_partition(int n, Fn&& fn) {
  PartitionEnumerator e(n);
  do {
    fn(e.labels());
  } while (e.next());
}

inline std::vector<SetPartition> enumerate_partitions(int n) {
  std::vector<SetPartition> out;
  for_each_partition(n, [&](const std::vector<int>& z) { out.push_back(SetPartition::from_labels(z)); });
  return out;
}

}  // namespace mfmsbm
