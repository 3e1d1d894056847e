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

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mfmsbm {

// Hungarian algorithm (shortest augmenting paths with potentials), O(k^3).
// Maximizes sum_r weight[r][col[r]] over permutations `col` of a square
// integer matrix. Returns the column assigned to each row.
inline std::vector<int> max_weight_assignment(const std::vector<std::vector<long long>>& weight) {
  const int k = static_cast<int>(weight.size());
  for (const auto& row : weight) {
    if (static_cast<int>(row.size()) != k) throw std::invalid_argument("assignment matrix must be square");
  }
  if (k == 0) return {};
  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  // 1-based arrays; cost = -weight.
  std::vector<long long> u(k + 1, 0), v(k + 1, 0);
  std::vector<int> match_col(k + 1, 0), way(k + 1, 0);
  for (int r = 1; r <= k; ++r) {
    match_col[0] = r;
    int j0 = 0;
    std::vector<long long> minv(k + 1, kInf);
    std::vector<char> used(k + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match_col[j0];
      long long delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const long long cur = -weight[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_col[j0] != 0);
    do {
      const int j1 = way[j0];
      match_col[j0] = match_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col(static_cast<std::size_t>(k), -1);
  for (int j = 1; j <= k; ++j) col[match_col[j] - 1] = j - 1;
  return col;
}

}  // namespace mfmsbm
