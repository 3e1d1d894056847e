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

// Partition priors for the number of communities.
//
// Mixture of finite mixtures (MFM): k ~ p(k), weights ~ Dirichlet(gamma),
// which induces an exchangeable partition law
//
//   P(C) = V_n(t) * prod_{c in C} gamma^(|c|),
//   V_n(t) = sum_{k >= t} k_(t) / (gamma k)^(n) * p(k),
//
// with x^(m) the rising and k_(t) the falling factorial. The sequential urn
// places a new element in an existing block c with weight |c| + gamma and in
// a new block with weight gamma * V_n(t+1) / V_n(t); telescoping those
// conditionals gives the closed form above.
//
// The Chinese restaurant process (CRP) is kept as a baseline:
//   P(C) = alpha^t prod_c (|c| - 1)! / alpha^(n).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfmsbm/numeric.hpp"
#include "mfmsbm/partition.hpp"

namespace mfmsbm {

// Prior on the number of mixture components, a pmf on {1, 2, ...}.
class ComponentPmf {
 public:
  enum class Kind { kTruncatedPoisson, kPointMass, kGeometric };

  // Poisson(rate) conditioned on k >= 1.
  static ComponentPmf truncated_poisson(double rate = 1.0) {
    if (!(rate > 0.0)) throw std::invalid_argument("Poisson rate must be positive");
    return ComponentPmf(Kind::kTruncatedPoisson, rate);
  }
  static ComponentPmf point_mass(int k) {
    if (k < 1) throw std::invalid_argument("point mass must sit on k >= 1");
    return ComponentPmf(Kind::kPointMass, k);
  }
  // p(k) = (1 - r)^(k-1) r.
  static ComponentPmf geometric(double r) {
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("geometric parameter must lie in (0,1]");
    return ComponentPmf(Kind::kGeometric, r);
  }

  // Parses "truncated-poisson:<rate>", "point-mass:<k>", "geometric:<r>".
  static ComponentPmf parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    double value = 1.0;
    if (colon != std::string::npos) {
      std::istringstream vs(text.substr(colon + 1));
      if (!(vs >> value)) throw std::invalid_argument("bad pmf parameter in '" + text + "'");
    }
    if (name == "truncated-poisson") return truncated_poisson(value);
    if (name == "point-mass") {
      if (value != std::floor(value)) throw std::invalid_argument("point mass needs an integer k");
      return point_mass(static_cast<int>(value));
    }
    if (name == "geometric") return geometric(value);
    throw std::invalid_argument("unknown component pmf '" + text + "'");
  }

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }

  std::string descriptor() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
      case Kind::kTruncatedPoisson: os << "truncated-poisson:" << param_; break;
      case Kind::kPointMass: os << "point-mass:" << static_cast<int>(param_); break;
      case Kind::kGeometric: os << "geometric:" << param_; break;
    }
    return os.str();
  }

  double log_pmf(long long k) const {
    if (k < 1) return kNegInf;
    const double kd = static_cast<double>(k);
    switch (kind_) {
      case Kind::kTruncatedPoisson:
        return kd * std::log(param_) - param_ - std::lgamma(kd + 1.0) -
               std::log(-std::expm1(-param_));
      case Kind::kPointMass:
        return kd == param_ ? 0.0 : kNegInf;
      case Kind::kGeometric:
        return param_ == 1.0 ? (k == 1 ? 0.0 : kNegInf)
                             : (kd - 1.0) * std::log1p(-param_) + std::log(param_);
    }
    return kNegInf;
  }

  double pmf(long long k) const { return std::exp(log_pmf(k)); }

  // Largest k with p(k) > 0, or -1 when the support is unbounded.
  long long support_max() const { return kind_ == Kind::kPointMass ? static_cast<long long>(param_) : -1; }

  bool operator==(const ComponentPmf&) const = default;

 private:
  ComponentPmf(Kind kind, double param) : kind_(kind), param_(param) {}

  Kind kind_;
  double param_;
};

// Precomputed log V_n(t), t = 1..t_max, for a fixed sample size n.
class MfmPriorTable {
 public:
  MfmPriorTable(int n, double gamma, ComponentPmf pmf, std::vector<double> log_v)
      : n_(n), gamma_(gamma), pmf_(pmf), log_v_(std::move(log_v)) {}

  int n() const { return n_; }
  int t_max() const { return static_cast<int>(log_v_.size()); }
  double gamma() const { return gamma_; }
  const ComponentPmf& pmf() const { return pmf_; }
  const std::vector<double>& log_v_values() const { return log_v_; }

  // log V_n(t). -inf flags a t beyond the pmf's support.
  double log_v(int t) const {
    if (t < 1 || t > t_max()) {
      throw std::out_of_range("V_n(t) requested for t = " + std::to_string(t) +
                              " outside table range 1.." + std::to_string(t_max()));
    }
    return log_v_[static_cast<std::size_t>(t - 1)];
  }

  // log of the MFM new-block factor gamma * V_n(t+1) / V_n(t); -inf when the
  // pmf cannot support t+1 blocks.
  double log_new_block_weight(int t) const {
    const double next = log_v(t + 1);
    const double cur = log_v(t);
    if (next == kNegInf || cur == kNegInf) return kNegInf;
    return std::log(gamma_) + next - cur;
  }

 private:
  int n_;
  double gamma_;
  ComponentPmf pmf_;
  std::vector<double> log_v_;
};

namespace detail {

inline constexpr double kVRelativeTolerance = 1e-16;
inline constexpr int kVPatience = 50;

inline double log_v_single(int n, int t, double gamma, const ComponentPmf& pmf) {
  const long long cap = std::max<long long>(500, static_cast<long long>(n) + 100);
  const double log_tol = std::log(kVRelativeTolerance);
  double sum = kNegInf;
  int quiet = 0;
  const long long support = pmf.support_max();
  for (long long k = t; k <= cap; ++k) {
    if (support >= 0 && k > support) break;
    const double lp = pmf.log_pmf(k);
    if (lp != kNegInf) {
      const double kd = static_cast<double>(k);
      const double term = log_falling(kd, t) - log_rising(gamma * kd, n) + lp;
      if (sum != kNegInf && term < sum + log_tol) {
        ++quiet;
      } else {
        quiet = 0;
      }
      sum = log_add_exp(sum, term);
    } else if (sum != kNegInf) {
      ++quiet;
    }
    if (quiet >= kVPatience) break;
  }
  return sum;
}

}  // namespace detail

inline MfmPriorTable compute_log_v(int n, int t_max, double gamma, const ComponentPmf& pmf) {
  if (n < 1) throw std::invalid_argument("V_n(t) needs n >= 1");
  if (t_max < 1 || t_max > n) throw std::invalid_argument("t_max must lie in 1..n");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  std::vector<double> log_v(static_cast<std::size_t>(t_max));
  for (int t = 1; t <= t_max; ++t) log_v[t - 1] = detail::log_v_single(n, t, gamma, pmf);
  return MfmPriorTable(n, gamma, pmf, std::move(log_v));
}

inline MfmPriorTable compute_log_v(int n, double gamma, const ComponentPmf& pmf) {
  return compute_log_v(n, n, gamma, pmf);
}

// Unnormalized urn weights for seating one more element next to an existing
// partition. `existing[c]` is the weight of block c (in the block order of
// the partition), `new_block` the weight of opening a block.
struct UrnWeights {
  std::vector<double> existing;
  double new_block = 0.0;
};

// MFM urn. The table's n must be one more than the number of already seated
// elements.
inline UrnWeights urn_weights(const MfmPriorTable& table, const std::vector<int>& block_sizes) {
  int seated = 0;
  for (int s : block_sizes) seated += s;
  if (seated + 1 != table.n()) {
    throw std::invalid_argument("urn table is for n = " + std::to_string(table.n()) +
                                " but " + std::to_string(seated) + " elements are seated");
  }
  UrnWeights w;
  const int t = static_cast<int>(block_sizes.size());
  if (t == 0) {
    w.new_block = 1.0;
    return w;
  }
  for (int s : block_sizes) w.existing.push_back(s + table.gamma());
  if (t + 1 > table.t_max()) {
    throw std::out_of_range("urn needs V_n(" + std::to_string(t + 1) +
                            ") beyond the table range");
  }
  const double lw = table.log_new_block_weight(t);
  w.new_block = lw == kNegInf ? 0.0 : std::exp(lw);
  return w;
}

inline UrnWeights urn_weights(const MfmPriorTable& table, const SetPartition& current) {
  return urn_weights(table, current.block_sizes());
}

inline UrnWeights crp_urn_weights(double alpha, const std::vector<int>& block_sizes) {
  if (!(alpha > 0.0)) throw std::invalid_argument("CRP concentration must be positive");
  UrnWeights w;
  for (int s : block_sizes) w.existing.push_back(s);
  w.new_block = alpha;
  return w;
}

inline double log_partition_prior(const MfmPriorTable& table, const std::vector<int>& block_sizes) {
  int n = 0;
  for (int s : block_sizes) n += s;
  if (n != table.n()) throw std::invalid_argument("partition size does not match the V_n table");
  const int t = static_cast<int>(block_sizes.size());
  double lp = table.log_v(t);
  if (lp == kNegInf) return kNegInf;
  for (int s : block_sizes) lp += log_rising(table.gamma(), s);
  return lp;
}

inline double log_partition_prior(const MfmPriorTable& table, const SetPartition& p) {
  return log_partition_prior(table, p.block_sizes());
}

inline double log_crp_partition_prior(double alpha, const std::vector<int>& block_sizes) {
  if (!(alpha > 0.0)) throw std::invalid_argument("CRP concentration must be positive");
  int n = 0;
  for (int s : block_sizes) n += s;
  double lp = static_cast<double>(block_sizes.size()) * std::log(alpha) - log_rising(alpha, n);
  for (int s : block_sizes) lp += std::lgamma(static_cast<double>(s));
  return lp;
}

inline double log_crp_partition_prior(double alpha, const SetPartition& p) {
  return log_crp_partition_prior(alpha, p.block_sizes());
}

}  // namespace mfmsbm
