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

// Simulation studies: synthetic homogeneous (optionally degree-corrected)
// block models, replicate recovery studies and convergence traces.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfmsbm/gibbs.hpp"
#include "mfmsbm/graph.hpp"
#include "mfmsbm/parallel.hpp"
#include "mfmsbm/posterior.hpp"
#include "mfmsbm/prior.hpp"
#include "mfmsbm/random.hpp"
#include "mfmsbm/sbm.hpp"

namespace mfmsbm {

// Graph draws use their own stream so they never share variates with the
// sampler seeded from the same replicate seed.
inline constexpr std::uint64_t kGraphStream = 0x6772617068ULL;

inline constexpr std::uint64_t kReplicateStride = 1'000'000ULL;

inline std::uint64_t replicate_seed(std::uint64_t master, int replicate) {
  return master * kReplicateStride + static_cast<std::uint64_t>(replicate);
}

// Balanced: floor(n/K) each, the remainder spread over the last blocks.
// Unbalanced: proportions 2 : 3 : ... : K+1, floored, the last block absorbing
// the remainder.
inline std::vector<int> community_sizes(int n, int k, bool unbalanced = false) {
  if (k < 1 || n < k) throw std::invalid_argument("community sizes need 1 <= K <= n");
  std::vector<int> sizes(static_cast<std::size_t>(k));
  if (!unbalanced) {
    for (int b = 0; b < k; ++b) sizes[b] = n / k + (b >= k - n % k ? 1 : 0);
    return sizes;
  }
  const int total = (k + 1) * (k + 2) / 2 - 1;  // 2 + 3 + ... + (K+1)
  int used = 0;
  for (int b = 0; b + 1 < k; ++b) {
    sizes[b] = n * (b + 2) / total;
    used += sizes[b];
  }
  sizes[k - 1] = n - used;
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("unbalanced design leaves an empty community");
  }
  return sizes;
}

// Contiguous blocks: the first sizes[0] nodes in block 0, and so on.
inline Labeling truth_labeling(const std::vector<int>& sizes) {
  std::vector<int> z;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    if (sizes[b] < 1) throw std::invalid_argument("community sizes must be positive");
    z.insert(z.end(), static_cast<std::size_t>(sizes[b]), static_cast<int>(b));
  }
  return Labeling(std::move(z));
}

// round(fraction * n) nodes chosen uniformly without replacement get
// `weight`, the rest 1.
inline DegreeWeights degree_weights(int n, double fraction, double weight, Rng& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("degree fraction must lie in [0,1]");
  if (!(weight > 0.0 && weight <= 1.0)) throw std::invalid_argument("degree weight must lie in (0,1]");
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(idx);
  const int m = static_cast<int>(std::lround(fraction * n));
  std::vector<double> w(static_cast<std::size_t>(n), 1.0);
  for (int i = 0; i < m; ++i) w[idx[i]] = weight;
  return DegreeWeights(std::move(w));
}

struct StudySpec {
  int n = 100;
  int k = 3;
  std::vector<int> sizes;  // explicit sizes; empty means use `unbalanced`
  bool unbalanced = false;
  double p = 0.5;
  double q = 0.10;
  int replicates = 20;
  bool degree_corrected = false;
  double dc_fraction = 0.3;
  double dc_weight = 0.8;
  int chains = 10;
  std::uint64_t master_seed = 1;
  SamplerConfig sampler;

  std::vector<int> resolved_sizes() const {
    if (sizes.empty()) return community_sizes(n, k, unbalanced);
    if (static_cast<int>(sizes.size()) != k) throw std::invalid_argument("explicit sizes must list K entries");
    if (std::accumulate(sizes.begin(), sizes.end(), 0) != n) {
      throw std::invalid_argument("community sizes must sum to n");
    }
    return sizes;
  }

  void validate() const {
    if (n < 2) throw std::invalid_argument("study needs n >= 2");
    if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) throw std::invalid_argument("p and q must lie in (0,1)");
    if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    if (chains < 1) throw std::invalid_argument("chains must be >= 1");
    resolved_sizes();
    sampler.validate(n);
    if (sampler.iterations <= sampler.burn_in) {
      throw std::invalid_argument("no post-burn-in iterations to summarize");
    }
  }
};

struct SyntheticInstance {
  std::uint64_t seed = 0;
  Labeling truth;
  DegreeWeights weights = DegreeWeights::ones(2);
  AdjacencyMatrix graph{2};
};

inline SyntheticInstance generate_instance(const StudySpec& spec, std::uint64_t seed) {
  SyntheticInstance out;
  out.seed = seed;
  out.truth = truth_labeling(spec.resolved_sizes());
  const EdgeProbMatrix q = EdgeProbMatrix::homogeneous(spec.k, spec.p, spec.q);
  Rng rng(seed, kGraphStream);
  if (spec.degree_corrected) {
    out.weights = degree_weights(spec.n, spec.dc_fraction, spec.dc_weight, rng);
    out.graph = generate_dcsbm(spec.n, out.truth, q, out.weights, rng);
  } else {
    out.weights = DegreeWeights::ones(spec.n);
    out.graph = generate_sbm(spec.n, out.truth, q, rng);
  }
  return out;
}

inline SyntheticInstance generate_replicate(const StudySpec& spec, int replicate) {
  return generate_instance(spec, replicate_seed(spec.master_seed, replicate));
}

struct ReplicateResult {
  int replicate = 0;
  std::uint64_t seed = 0;
  int modal_t = 0;
  double rand_index = 0.0;
  bool correct = false;
  bool vote_tie = false;
};

struct StudyReport {
  StudySpec spec;
  std::vector<ReplicateResult> results;
  double proportion_correct = 0.0;
  double mean_ri_correct = 0.0;  // NaN when no replicate recovered K

  // "0.99 (1.00)" style cell.
  std::string cell() const {
    char buf[64];
    if (std::isnan(mean_ri_correct)) {
      std::snprintf(buf, sizeof buf, "%.2f (NA)", proportion_correct);
    } else {
      std::snprintf(buf, sizeof buf, "%.2f (%.2f)", proportion_correct, mean_ri_correct);
    }
    return buf;
  }
};

// Chains run sequentially here; callers parallelize across replicates.
inline FitSummary fit_chains(const AdjacencyMatrix& g, const SamplerConfig& cfg, const PartitionPrior& prior,
                             int chains, int threads = 1) {
  const std::vector<PosteriorSample> draws = run_parallel_chains(g, cfg, prior, chains, threads);
  return summarize_chains(draws);
}

inline ReplicateResult run_replicate(const StudySpec& spec, int replicate, const PartitionPrior& prior) {
  const SyntheticInstance inst = generate_replicate(spec, replicate);
  SamplerConfig cfg = spec.sampler;
  cfg.seed = inst.seed;
  const FitSummary fit = fit_chains(inst.graph, cfg, prior, spec.chains);
  ReplicateResult r;
  r.replicate = replicate;
  r.seed = inst.seed;
  r.modal_t = fit.modal_t;
  r.rand_index = rand_index(fit.z_hat, inst.truth);
  r.correct = fit.modal_t == spec.k;
  r.vote_tie = fit.vote_tie;
  return r;
}

// Deterministic in spec.master_seed regardless of the thread count.
inline StudyReport run_replicate_study(const StudySpec& spec, int threads = default_thread_count()) {
  spec.validate();
  const PartitionPrior prior = make_partition_prior(spec.sampler, spec.n);
  StudyReport rep;
  rep.spec = spec;
  rep.results.resize(static_cast<std::size_t>(spec.replicates));
  parallel_for(spec.replicates, threads, [&](int j) { rep.results[j] = run_replicate(spec, j, prior); });
  int hits = 0;
  double ri = 0.0;
  for (const ReplicateResult& r : rep.results) {
    if (!r.correct) continue;
    ++hits;
    ri += r.rand_index;
  }
  rep.proportion_correct = static_cast<double>(hits) / spec.replicates;
  rep.mean_ri_correct = hits == 0 ? std::nan("") : ri / hits;
  return rep;
}

// RI(z_iter, truth) for iterations 1..iterations from `starts` random
// initializations; start s uses seed cfg.seed + s.
inline std::vector<std::vector<double>> convergence_traces(const AdjacencyMatrix& g, const Labeling& truth,
                                                           const SamplerConfig& cfg, const PartitionPrior& prior,
                                                           int starts, int threads = default_thread_count()) {
  if (starts < 1) throw std::invalid_argument("need at least one start");
  if (cfg.iterations < 1) throw std::invalid_argument("need at least one iteration");
  if (truth.size() != g.size()) throw std::invalid_argument("truth length does not match node count");
  cfg.validate(g.size());
  std::vector<std::vector<double>> out(static_cast<std::size_t>(starts));
  parallel_for(starts, threads, [&](int s) {
    SamplerConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(s);
    c.burn_in = c.iterations;  // nothing recorded; the observer does the work
    std::vector<double>& trace = out[s];
    trace.reserve(static_cast<std::size_t>(c.iterations));
    run_chain(g, c, prior, [&](long long, const ChainState& st) {
      trace.push_back(rand_index(std::span<const int>(st.z), std::span<const int>(truth.labels())));
    });
  });
  return out;
}

// Posterior mass on t = k pooled over chains.
inline double mass_on(const std::vector<PosteriorSample>& chains, int k) {
  long long hit = 0;
  long long total = 0;
  for (const PosteriorSample& c : chains) {
    for (int t : c.t) {
      hit += t == k;
      ++total;
    }
  }
  if (total == 0) throw std::invalid_argument("no recorded samples");
  return static_cast<double>(hit) / static_cast<double>(total);
}

// Sampler-vs-enumeration comparison on a small graph.
struct OracleReport {
  int n = 0;
  long long samples = 0;
  double total_variation = 0.0;
  std::vector<std::vector<int>> partitions;  // canonical labels
  std::vector<double> exact;
  std::vector<double> empirical;
};

inline OracleReport oracle_check(const AdjacencyMatrix& g, const SamplerConfig& cfg, const PartitionPrior& prior) {
  if (g.size() > kMaxExactPosteriorSize) throw std::invalid_argument("oracle is limited to n <= 8");
  if (cfg.iterations < 1) throw std::invalid_argument("oracle needs at least one iteration");
  if (cfg.iterations <= cfg.burn_in) {
    throw std::invalid_argument("oracle needs post-burn-in draws; a prior-only empirical set is not compared");
  }
  cfg.validate(g.size());
  const ExactPosterior exact(g, cfg.beta_a, cfg.beta_b, prior);
  const PosteriorSample draws = run_chain(g, cfg, prior);
  OracleReport rep;
  rep.n = g.size();
  rep.samples = static_cast<long long>(draws.size());
  rep.total_variation = exact.total_variation(draws.z);
  rep.partitions = exact.partitions();
  rep.exact = exact.probabilities();
  std::map<std::vector<int>, long long> freq;
  for (const Labeling& z : draws.z) ++freq[z.canonicalized().labels()];
  rep.empirical.reserve(rep.partitions.size());
  for (const auto& p : rep.partitions) {
    const auto it = freq.find(p);
    rep.empirical.push_back(it == freq.end() ? 0.0 : static_cast<double>(it->second) / rep.samples);
  }
  return rep;
}

}  // namespace mfmsbm
