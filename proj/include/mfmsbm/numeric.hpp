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
#include <limits>
#include <span>
#include <vector>

#include "mfmsbm/random.hpp"

namespace mfmsbm {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum_i exp(x_i)). Returns -inf for an empty range or all -inf inputs.
inline double log_sum_exp(std::span<const double> x) {
  if (x.empty()) return kNegInf;
  const double m = *std::max_element(x.begin(), x.end());
  if (m == kNegInf) return kNegInf;
  if (m == std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

inline double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

inline double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// log x^(m) = log x(x+1)...(x+m-1), x > 0.
inline double log_rising(double x, double m) {
  return std::lgamma(x + m) - std::lgamma(x);
}

// log k_(t) = log k(k-1)...(k-t+1); -inf when t > k.
inline double log_falling(double k, double t) {
  if (t > k) return kNegInf;
  return std::lgamma(k + 1.0) - std::lgamma(k - t + 1.0);
}

inline double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline double choose2(double n) { return 0.5 * n * (n - 1.0); }

// Normalizes log weights into probabilities (max-shifted). Entries at -inf
// get probability exactly zero.
inline std::vector<double> normalize_log_weights(std::span<const double> logw) {
  std::vector<double> p(logw.size(), 0.0);
  const double lse = log_sum_exp(logw);
  if (lse == kNegInf) return p;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    p[i] = logw[i] == kNegInf ? 0.0 : std::exp(logw[i] - lse);
  }
  return p;
}

// Inverse-CDF draw from unnormalized log weights. At least one weight must be
// finite.
inline std::size_t sample_log_categorical(std::span<const double> logw,
                                          Rng& rng) {
  const std::vector<double> p = normalize_log_weights(logw);
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    acc += p[i];
    last = i;
    if (u < acc) return i;
  }
  return last;  // u landed in the rounding slack above acc
}

}  // namespace mfmsbm
