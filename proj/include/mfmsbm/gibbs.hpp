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

// Collapsed Gibbs sampler for the MFM stochastic block model.
//
// Each iteration redraws every block probability from its conjugate Beta
// conditional given z, then sweeps the nodes. Node i is removed from its
// block (dropping the block if it empties) and reseated with weight
//
//   existing block c:  (|c| + gamma) * prod_s Q_cs^e_s (1 - Q_cs)^(m_s - e_s)
//   new block:         gamma * V_n(t+1)/V_n(t) * m(A_i)
//
// where e_s counts i's edges into block s, m_s = |s|, and m(A_i) integrates
// the new block's row of Q against its Beta(a, b) prior. A newly opened block
// immediately draws its Q row from the Beta posterior given node i's edges.
//
// Blocks are visited in order of their smallest member whenever randomness is
// consumed, so the kernel commutes with relabeling.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfmsbm/graph.hpp"
#include "mfmsbm/numeric.hpp"
#include "mfmsbm/parallel.hpp"
#include "mfmsbm/prior.hpp"
#include "mfmsbm/random.hpp"
#include "mfmsbm/sbm.hpp"

namespace mfmsbm {

struct PriorMode {
  enum class Kind { kMfm, kCrp };
  Kind kind = Kind::kMfm;
  double alpha = 1.0;  // CRP concentration

  static PriorMode mfm() { return {}; }
  static PriorMode crp(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("CRP concentration must be positive");
    return {Kind::kCrp, alpha};
  }

  // "mfm" or "crp:<alpha>".
  static PriorMode parse(const std::string& text) {
    if (text == "mfm") return mfm();
    if (text.rfind("crp:", 0) == 0) {
      std::istringstream is(text.substr(4));
      double alpha = 0.0;
      if (!(is >> alpha)) throw std::invalid_argument("bad CRP concentration in '" + text + "'");
      return crp(alpha);
    }
    throw std::invalid_argument("prior must be 'mfm' or 'crp:<alpha>', got '" + text + "'");
  }

  std::string str() const {
    if (kind == Kind::kMfm) return "mfm";
    std::ostringstream os;
    os << "crp:" << alpha;
    return os.str();
  }
};

struct SamplerConfig {
  double gamma = 1.0;
  double beta_a = 1.0;
  double beta_b = 1.0;
  int iterations = 250;
  int burn_in = 100;
  int init_clusters = 9;
  std::uint64_t seed = 1;
  PriorMode prior;
  int thin = 1;
  bool random_sweep = false;
  bool record_q = false;

  void validate(int n) const {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (!(beta_a > 0.0 && beta_b > 0.0)) throw std::invalid_argument("Beta prior shapes must be positive");
    if (iterations < 0 || burn_in < 0) throw std::invalid_argument("iterations and burn-in must be non-negative");
    if (burn_in > iterations) throw std::invalid_argument("burn-in exceeds the number of iterations");
    if (init_clusters < 1 || init_clusters > n) {
      throw std::invalid_argument("init_clusters must lie in [1, n]");
    }
    if (thin < 1) throw std::invalid_argument("thinning interval must be >= 1");
  }
};

// Urn weights shared by the MFM and CRP modes.
class PartitionPrior {
 public:
  static PartitionPrior mfm(MfmPriorTable table) {
    PartitionPrior p;
    p.table_ = std::make_shared<const MfmPriorTable>(std::move(table));
    p.log_gamma_ = std::log(p.table_->gamma());
    return p;
  }
  static PartitionPrior crp(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("CRP concentration must be positive");
    PartitionPrior p;
    p.alpha_ = alpha;
    p.log_alpha_ = std::log(alpha);
    return p;
  }

  bool is_mfm() const { return table_ != nullptr; }
  const MfmPriorTable& table() const { return *table_; }
  double alpha() const { return alpha_; }

  // log weight for joining a block that currently holds `size` elements.
  double log_existing(int size) const {
    return is_mfm() ? std::log(size + table_->gamma()) : std::log(static_cast<double>(size));
  }

  // log weight for opening block t+1 next to t occupied blocks.
  double log_new(int t) const {
    if (!is_mfm()) return log_alpha_;
    if (t + 1 > table_->t_max()) {
      throw std::out_of_range("new block would need V_n(" + std::to_string(t + 1) +
                              ") beyond the table range");
    }
    return table_->log_new_block_weight(t);
  }

  double log_partition_prior(const std::vector<int>& block_sizes) const {
    return is_mfm() ? mfmsbm::log_partition_prior(*table_, block_sizes)
                    : log_crp_partition_prior(alpha_, block_sizes);
  }

 private:
  PartitionPrior() = default;

  std::shared_ptr<const MfmPriorTable> table_;
  double alpha_ = 0.0;
  double log_alpha_ = 0.0;
  double log_gamma_ = 0.0;
};

// Convenience: the prior described by a sampler configuration for n nodes.
inline PartitionPrior make_partition_prior(const SamplerConfig& cfg, int n,
                                           const ComponentPmf& pmf = ComponentPmf::truncated_poisson(1.0)) {
  if (cfg.prior.kind == PriorMode::Kind::kCrp) return PartitionPrior::crp(cfg.prior.alpha);
  return PartitionPrior::mfm(compute_log_v(n, n, cfg.gamma, pmf));
}

namespace detail {

// Square table whose dimension grows and shrinks with the number of blocks.
template <class T>
class BlockTable {
 public:
  int size() const { return k_; }
  T& operator()(int r, int s) { return v_[static_cast<std::size_t>(r) * cap_ + s]; }
  const T& operator()(int r, int s) const { return v_[static_cast<std::size_t>(r) * cap_ + s]; }

  void resize(int k) {
    if (k > cap_) {
      const int cap = std::max(k, std::max(4, 2 * cap_));
      std::vector<T> v(static_cast<std::size_t>(cap) * cap, T{});
      for (int r = 0; r < k_; ++r) {
        for (int s = 0; s < k_; ++s) v[static_cast<std::size_t>(r) * cap + s] = (*this)(r, s);
      }
      v_ = std::move(v);
      cap_ = cap;
    }
    k_ = k;
  }

  // Moves the last row/column into `slot` and shrinks by one.
  void move_last_into(int slot) {
    const int last = k_ - 1;
    if (slot != last) {
      for (int s = 0; s < k_; ++s) {
        (*this)(slot, s) = (*this)(last, s);
        (*this)(s, slot) = (*this)(s, last);
      }
      (*this)(slot, slot) = (*this)(last, last);
    }
    k_ = last;
  }

 private:
  int k_ = 0;
  int cap_ = 0;
  std::vector<T> v_;
};

// count * log_p with count == 0 contributing exactly zero.
inline double weighted_log(double count, double log_p) { return count == 0.0 ? 0.0 : count * log_p; }

}  // namespace detail

// log m(A_i): product over existing blocks s of
// B(e_s + a, m_s - e_s + b) / B(a, b), where e_s is node i's edge count into
// block s and m_s its size. Empty input gives 0 (the empty product).
inline double log_new_cluster_marginal(std::span<const long long> edges_into,
                                       std::span<const int> block_sizes, double a, double b) {
  const double lb0 = log_beta_fn(a, b);
  double lm = 0.0;
  for (std::size_t s = 0; s < edges_into.size(); ++s) {
    const double e = static_cast<double>(edges_into[s]);
    const double m = static_cast<double>(block_sizes[s]);
    lm += log_beta_fn(e + a, m - e + b) - lb0;
  }
  return lm;
}

// Same quantity from a graph and a labeling of the other n-1 nodes. The
// entry labels[i] is ignored; the remaining labels must be contiguous.
inline double log_m_new_cluster(const AdjacencyMatrix& a, int i, std::span<const int> labels,
                                double beta_a, double beta_b) {
  if (static_cast<int>(labels.size()) != a.size()) {
    throw std::invalid_argument("labeling length does not match node count");
  }
  std::vector<int> rest;
  for (int j = 0; j < a.size(); ++j) {
    if (j != i) rest.push_back(labels[j]);
  }
  if (rest.empty()) return 0.0;
  const Labeling z_rest(rest);  // validates contiguity
  std::vector<long long> e(static_cast<std::size_t>(z_rest.num_clusters()), 0);
  std::vector<int> m(e.size(), 0);
  for (int j = 0; j < a.size(); ++j) {
    if (j == i) continue;
    ++m[labels[j]];
    if (a.has_edge(i, j)) ++e[labels[j]];
  }
  return log_new_cluster_marginal(e, m, beta_a, beta_b);
}

// Sampler state for one chain: labels, block sizes, block edge tallies and
// log Q / log(1 - Q), plus the chain's random stream.
struct ChainState {
  explicit ChainState(std::uint64_t seed) : rng(seed) {}

  std::vector<int> z;
  std::vector<int> sizes;
  detail::BlockTable<long long> edges;  // edges(r, r): within-block edge count
  detail::BlockTable<double> log_q;
  detail::BlockTable<double> log_1mq;
  long long iteration = 0;
  Rng rng;

  int num_clusters() const { return static_cast<int>(sizes.size()); }
  Labeling labeling() const { return Labeling(z); }

  EdgeProbMatrix q() const {
    EdgeProbMatrix m(num_clusters());
    for (int r = 0; r < num_clusters(); ++r) {
      for (int s = r; s < num_clusters(); ++s) m.set(r, s, std::exp(log_q(r, s)));
    }
    return m;
  }

  long long pairs(int r, int s) const {
    return r == s ? static_cast<long long>(sizes[r]) * (sizes[r] - 1) / 2
                  : static_cast<long long>(sizes[r]) * sizes[s];
  }
};

class CollapsedGibbsSampler {
 public:
  CollapsedGibbsSampler(const AdjacencyMatrix& a, SamplerConfig cfg, PartitionPrior prior)
      : n_(a.size()), cfg_(std::move(cfg)), prior_(std::move(prior)), adj_(a.adjacency_lists()) {
    cfg_.validate(n_);
    if (prior_.is_mfm()) {
      if (prior_.table().n() != n_) {
        throw std::invalid_argument("V_n table was built for n = " + std::to_string(prior_.table().n()) +
                                    " but the graph has " + std::to_string(n_) + " nodes");
      }
      if (prior_.table().gamma() != cfg_.gamma) {
        throw std::invalid_argument("V_n table gamma differs from the sampler gamma");
      }
    }
    scratch_e_.resize(static_cast<std::size_t>(n_));
  }

  int size() const { return n_; }
  const SamplerConfig& config() const { return cfg_; }
  const PartitionPrior& prior() const { return prior_; }

  // Uniform random assignment to cfg.init_clusters labels (empty labels are
  // dropped), Q from its prior.
  ChainState initial_state(std::uint64_t seed) const {
    ChainState st(seed);
    std::vector<int> raw(static_cast<std::size_t>(n_));
    for (int& v : raw) v = static_cast<int>(st.rng.below(static_cast<std::uint64_t>(cfg_.init_clusters)));
    const Labeling z = Labeling::canonical(raw);
    set_labels(st, z);
    const std::vector<int> order = block_order(st, -1);
    for (std::size_t ai = 0; ai < order.size(); ++ai) {
      for (std::size_t bi = ai; bi < order.size(); ++bi) {
        draw_q(st, order[ai], order[bi], cfg_.beta_a, cfg_.beta_b);
      }
    }
    return st;
  }

  // State with the given labels and block probabilities.
  ChainState make_state(const Labeling& z, const EdgeProbMatrix& q, std::uint64_t seed) const {
    if (z.size() != n_) throw std::invalid_argument("labeling length does not match node count");
    if (q.k() != z.num_clusters()) throw std::invalid_argument("Q dimension must equal the number of blocks");
    ChainState st(seed);
    set_labels(st, z);
    for (int r = 0; r < q.k(); ++r) {
      for (int s = 0; s < q.k(); ++s) {
        st.log_q(r, s) = std::log(q(r, s));
        st.log_1mq(r, s) = std::log1p(-q(r, s));
      }
    }
    return st;
  }

  // Conjugate refresh: Q_rs ~ Beta(edges_rs + a, pairs_rs - edges_rs + b).
  void update_q(ChainState& st) const {
    const std::vector<int> order = block_order(st, -1);
    for (std::size_t ai = 0; ai < order.size(); ++ai) {
      for (std::size_t bi = ai; bi < order.size(); ++bi) {
        const int r = order[ai];
        const int s = order[bi];
        const double e = static_cast<double>(st.edges(r, s));
        const double m = static_cast<double>(st.pairs(r, s));
        draw_q(st, r, s, e + cfg_.beta_a, m - e + cfg_.beta_b);
      }
    }
  }

  // Reseats node i from its full conditional.
  void update_z(ChainState& st, int i) const {
    auto& e = scratch_e_;
    remove_node(st, i, e);
    const int t = st.num_clusters();
    const std::vector<int> order = block_order(st, i);
    std::vector<double> logw(static_cast<std::size_t>(t) + 1);
    fill_log_weights(st, order, e, logw);
    const std::size_t pick = sample_log_categorical(logw, st.rng);
    if (pick < static_cast<std::size_t>(t)) {
      join_block(st, i, order[pick], e);
    } else {
      open_block(st, i, order, e);
    }
  }

  // One iteration: Q refresh, then z_i for every node (index order unless
  // cfg.random_sweep).
  void sweep(ChainState& st) const {
    update_q(st);
    if (cfg_.random_sweep) {
      std::vector<int> nodes(static_cast<std::size_t>(n_));
      std::iota(nodes.begin(), nodes.end(), 0);
      st.rng.shuffle(nodes);
      for (int i : nodes) update_z(st, i);
    } else {
      for (int i = 0; i < n_; ++i) update_z(st, i);
    }
    ++st.iteration;
#ifndef NDEBUG
    check_consistency(st);
#endif
  }

  // Normalized full conditional of z_i without changing `st`. Entry c < t'
  // is block c of the state after i is removed (labels compacted), the final
  // entry is a new block.
  std::vector<double> assignment_probabilities(const ChainState& st, int i) const {
    ChainState copy = st;
    std::vector<long long> e(static_cast<std::size_t>(n_));
    remove_node(copy, i, e);
    const int t = copy.num_clusters();
    std::vector<int> order(static_cast<std::size_t>(t));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> logw(static_cast<std::size_t>(t) + 1);
    fill_log_weights(copy, order, e, logw);
    return normalize_log_weights(logw);
  }

  double log_likelihood(const ChainState& st) const {
    double ll = 0.0;
    for (int r = 0; r < st.num_clusters(); ++r) {
      for (int s = r; s < st.num_clusters(); ++s) {
        const double e = static_cast<double>(st.edges(r, s));
        const double m = static_cast<double>(st.pairs(r, s));
        ll += detail::weighted_log(e, st.log_q(r, s)) + detail::weighted_log(m - e, st.log_1mq(r, s));
      }
    }
    return ll;
  }

  // Throws std::logic_error if cached tallies disagree with a recount.
  void check_consistency(const ChainState& st) const {
    if (static_cast<int>(st.z.size()) != n_) throw std::logic_error("label vector has wrong length");
    const int t = st.num_clusters();
    if (st.edges.size() != t || st.log_q.size() != t || st.log_1mq.size() != t) {
      throw std::logic_error("Q dimension differs from the number of blocks");
    }
    std::vector<int> sizes(static_cast<std::size_t>(t), 0);
    for (int v : st.z) {
      if (v < 0 || v >= t) throw std::logic_error("label out of range");
      ++sizes[v];
    }
    if (sizes != st.sizes) throw std::logic_error("cached block sizes are stale");
    for (int s : sizes) {
      if (s == 0) throw std::logic_error("labels are not contiguous");
    }
    for (int r = 0; r < t; ++r) {
      for (int s = 0; s < t; ++s) {
        if (st.edges(r, s) != st.edges(s, r)) throw std::logic_error("edge tallies are not symmetric");
      }
    }
    const BlockCounts counts = block_counts(rebuild_graph(), Labeling(st.z));
    for (int r = 0; r < t; ++r) {
      for (int s = r; s < t; ++s) {
        if (counts.edges(r, s) != st.edges(r, s)) throw std::logic_error("cached edge tallies are stale");
      }
    }
  }

 private:
  AdjacencyMatrix rebuild_graph() const {
    AdjacencyMatrix a(n_);
    for (int i = 0; i < n_; ++i) {
      for (int j : adj_[i]) {
        if (j > i) a.set_edge(i, j);
      }
    }
    return a;
  }

  void set_labels(ChainState& st, const Labeling& z) const {
    const int t = z.num_clusters();
    st.z = z.labels();
    st.sizes = z.cluster_sizes();
    st.edges.resize(t);
    st.log_q.resize(t);
    st.log_1mq.resize(t);
    for (int r = 0; r < t; ++r) {
      for (int s = 0; s < t; ++s) st.edges(r, s) = 0;
    }
    for (int i = 0; i < n_; ++i) {
      for (int j : adj_[i]) {
        if (j <= i) continue;
        const int r = st.z[i];
        const int s = st.z[j];
        ++st.edges(r, s);
        if (r != s) ++st.edges(s, r);
      }
    }
  }

  void draw_q(ChainState& st, int r, int s, double shape_a, double shape_b) const {
    const auto [lq, l1mq] = st.rng.log_beta_variate(shape_a, shape_b);
    st.log_q(r, s) = st.log_q(s, r) = lq;
    st.log_1mq(r, s) = st.log_1mq(s, r) = l1mq;
  }

  // Block indices sorted by smallest member, ignoring node `skip`.
  std::vector<int> block_order(const ChainState& st, int skip) const {
    const int t = st.num_clusters();
    std::vector<int> first(static_cast<std::size_t>(t), n_);
    int found = 0;
    for (int j = 0; j < n_ && found < t; ++j) {
      if (j == skip) continue;
      int& f = first[st.z[j]];
      if (f == n_) {
        f = j;
        ++found;
      }
    }
    std::vector<int> order(static_cast<std::size_t>(t));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return first[x] < first[y]; });
    return order;
  }

  // Takes node i out of its block, filling e[s] with i's edge count into
  // each remaining block. An emptied block is dropped by moving the last
  // block into its slot.
  void remove_node(ChainState& st, int i, std::vector<long long>& e) const {
    const int t = st.num_clusters();
    std::fill(e.begin(), e.begin() + t, 0);
    for (int j : adj_[i]) ++e[st.z[j]];
    const int old = st.z[i];
    --st.sizes[old];
    for (int s = 0; s < t; ++s) {
      if (s == old) {
        st.edges(old, old) -= e[old];
      } else {
        st.edges(old, s) -= e[s];
        st.edges(s, old) -= e[s];
      }
    }
    st.z[i] = -1;
    if (st.sizes[old] == 0) {
      const int last = t - 1;
      if (old != last) {
        for (int& v : st.z) {
          if (v == last) v = old;
        }
        st.sizes[old] = st.sizes[last];
        e[old] = e[last];
      }
      st.sizes.pop_back();
      st.edges.move_last_into(old);
      st.log_q.move_last_into(old);
      st.log_1mq.move_last_into(old);
    }
  }

  void fill_log_weights(const ChainState& st, const std::vector<int>& order,
                        const std::vector<long long>& e, std::vector<double>& logw) const {
    const int t = st.num_clusters();
    for (int idx = 0; idx < t; ++idx) {
      const int c = order[idx];
      double lw = prior_.log_existing(st.sizes[c]);
      for (int s : order) {
        const double es = static_cast<double>(e[s]);
        const double miss = static_cast<double>(st.sizes[s]) - es;
        lw += detail::weighted_log(es, st.log_q(c, s)) + detail::weighted_log(miss, st.log_1mq(c, s));
      }
      logw[idx] = lw;
    }
    const double lnew = prior_.log_new(t);
    if (lnew == kNegInf) {
      logw[t] = kNegInf;
    } else {
      std::vector<long long> eo;
      std::vector<int> mo;
      eo.reserve(order.size());
      mo.reserve(order.size());
      for (int s : order) {
        eo.push_back(e[s]);
        mo.push_back(st.sizes[s]);
      }
      logw[t] = lnew + log_new_cluster_marginal(eo, mo, cfg_.beta_a, cfg_.beta_b);
    }
  }

  void join_block(ChainState& st, int i, int c, const std::vector<long long>& e) const {
    st.z[i] = c;
    ++st.sizes[c];
    for (int s = 0; s < st.num_clusters(); ++s) {
      if (s == c) {
        st.edges(c, c) += e[c];
      } else {
        st.edges(c, s) += e[s];
        st.edges(s, c) += e[s];
      }
    }
  }

  void open_block(ChainState& st, int i, const std::vector<int>& order, const std::vector<long long>& e) const {
    const int c = st.num_clusters();
    st.edges.resize(c + 1);
    st.log_q.resize(c + 1);
    st.log_1mq.resize(c + 1);
    for (int s = 0; s < c; ++s) st.edges(c, s) = st.edges(s, c) = e[s];
    st.edges(c, c) = 0;
    for (int s : order) {
      const double es = static_cast<double>(e[s]);
      draw_q(st, c, s, es + cfg_.beta_a, static_cast<double>(st.sizes[s]) - es + cfg_.beta_b);
    }
    draw_q(st, c, c, cfg_.beta_a, cfg_.beta_b);
    st.sizes.push_back(1);
    st.z[i] = c;
  }

  int n_;
  SamplerConfig cfg_;
  PartitionPrior prior_;
  std::vector<std::vector<int>> adj_;
  mutable std::vector<long long> scratch_e_;
};

// Kept draws of one chain, one entry per recorded iteration.
struct PosteriorSample {
  std::vector<long long> iterations;
  std::vector<Labeling> z;
  std::vector<int> t;
  std::vector<double> log_likelihood;
  std::vector<EdgeProbMatrix> q;  // filled only with cfg.record_q

  std::size_t size() const { return z.size(); }
  bool empty() const { return z.empty(); }
};

// Called after every iteration with (iteration number, state).
using ChainObserver = std::function<void(long long, const ChainState&)>;

// Algorithm loop: M iterations from a random start; records every
// post-burn-in iteration (subject to thinning). Deterministic in cfg.seed.
inline PosteriorSample run_chain(const AdjacencyMatrix& a, const SamplerConfig& cfg,
                                 const PartitionPrior& prior, const ChainObserver& observer = {}) {
  const CollapsedGibbsSampler sampler(a, cfg, prior);
  ChainState st = sampler.initial_state(cfg.seed);
  PosteriorSample out;
  for (long long it = 1; it <= cfg.iterations; ++it) {
    sampler.sweep(st);
    if (observer) observer(it, st);
    if (it > cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) {
      out.iterations.push_back(it);
      out.z.push_back(st.labeling());
      out.t.push_back(st.num_clusters());
      out.log_likelihood.push_back(sampler.log_likelihood(st));
      if (cfg.record_q) out.q.push_back(st.q());
    }
  }
  return out;
}

// Independent chains; chain j uses seed cfg.seed + j. Results are indexed by
// chain regardless of scheduling.
inline std::vector<PosteriorSample> run_parallel_chains(const AdjacencyMatrix& a, const SamplerConfig& cfg,
                                                        const PartitionPrior& prior, int n_chains,
                                                        int threads = default_thread_count()) {
  if (n_chains < 1) throw std::invalid_argument("need at least one chain");
  cfg.validate(a.size());
  std::vector<PosteriorSample> out(static_cast<std::size_t>(n_chains));
  parallel_for(n_chains, threads, [&](int j) {
    SamplerConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(j);
    out[j] = run_chain(a, c, prior);
  });
  return out;
}

}  // namespace mfmsbm
