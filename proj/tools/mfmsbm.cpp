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

// mfmsbm: generate, fit, replicate, oracle, convergence, gap, vtable.
//
// Exit codes: 0 success, 2 invalid input, 3 runtime failure.

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mfmsbm/gibbs.hpp"
#include "mfmsbm/io.hpp"
#include "mfmsbm/parallel.hpp"
#include "mfmsbm/posterior.hpp"
#include "mfmsbm/report.hpp"
#include "mfmsbm/study.hpp"
#include "mfmsbm/theory.hpp"

namespace fs = std::filesystem;
using namespace mfmsbm;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitRuntime = 3;

struct Globals {
  SamplerConfig cfg;
  std::string prior = "mfm";
  std::string pmf = "truncated-poisson:1";
  std::string vcache;
  int chains = 10;
  int threads = default_thread_count();
  std::string out = ".";
  bool init_explicit = false;
};

struct DesignFlags {
  int n = 100;
  int k = 3;
  std::vector<int> sizes;
  bool unbalanced = false;
  double p = 0.5;
  double q = 0.10;
  int replicates = 20;
  bool degree_corrected = false;
  double dc_fraction = 0.3;
  double dc_weight = 0.8;
};

void add_design(CLI::App* app, DesignFlags& d) {
  app->add_option("--n", d.n, "number of nodes")->capture_default_str();
  app->add_option("--k", d.k, "number of communities")->capture_default_str();
  app->add_option("--sizes", d.sizes, "explicit community sizes")->delimiter(',');
  app->add_flag("--unbalanced", d.unbalanced, "sizes in ratio 2:3:...:K+1");
  app->add_option("--p", d.p, "within-community edge probability")->capture_default_str();
  app->add_option("--q", d.q, "between-community edge probability")->capture_default_str();
  app->add_option("--replicates", d.replicates)->capture_default_str();
  app->add_flag("--degree-corrected", d.degree_corrected);
  app->add_option("--dc-fraction", d.dc_fraction, "fraction of down-weighted nodes")->capture_default_str();
  app->add_option("--dc-weight", d.dc_weight)->capture_default_str();
}

// The default random start of 9 clusters is clamped to n on tiny graphs; an
// explicit --init-clusters is validated as given.
SamplerConfig resolve_config(const Globals& g, int n = 0) {
  SamplerConfig c = g.cfg;
  c.prior = PriorMode::parse(g.prior);
  if (!g.init_explicit && n > 0) c.init_clusters = std::min(c.init_clusters, n);
  return c;
}

StudySpec make_spec(const DesignFlags& d, const Globals& g) {
  StudySpec s;
  s.n = d.n;
  s.k = d.k;
  s.sizes = d.sizes;
  s.unbalanced = d.unbalanced;
  s.p = d.p;
  s.q = d.q;
  s.replicates = d.replicates;
  s.degree_corrected = d.degree_corrected;
  s.dc_fraction = d.dc_fraction;
  s.dc_weight = d.dc_weight;
  s.chains = g.chains;
  s.master_seed = g.cfg.seed;
  s.sampler = resolve_config(g, d.n);
  return s;
}

PartitionPrior build_prior(const Globals& g, const SamplerConfig& cfg, int n) {
  const ComponentPmf pmf = ComponentPmf::parse(g.pmf);
  if (cfg.prior.kind == PriorMode::Kind::kCrp) return PartitionPrior::crp(cfg.prior.alpha);
  if (!g.vcache.empty()) return PartitionPrior::mfm(cached_log_v(g.vcache, n, n, cfg.gamma, pmf));
  return make_partition_prior(cfg, n, pmf);
}

std::string out_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out);
  return (fs::path(g.out) / name).string();
}

// "1x3,2x2,1x1": run-length encoding of the 1-based labels.
std::string rle(const std::vector<int>& z) {
  std::ostringstream os;
  for (std::size_t i = 0; i < z.size();) {
    std::size_t j = i;
    while (j < z.size() && z[j] == z[i]) ++j;
    if (i) os << ',';
    os << z[i] + 1 << 'x' << j - i;
    i = j;
  }
  return os.str();
}

std::string rep_name(int j, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "rep_%03d.%s", j + 1, ext);
  return buf;
}

// ---------------------------------------------------------------------------

void cmd_generate(const DesignFlags& d, const Globals& g) {
  StudySpec spec = make_spec(d, g);
  // Sampler settings are irrelevant here; only the design is validated.
  spec.sampler = SamplerConfig{};
  spec.sampler.init_clusters = 1;
  spec.sampler.iterations = 1;
  spec.sampler.burn_in = 0;
  spec.validate();
  Json files = Json::array();
  for (int j = 0; j < spec.replicates; ++j) {
    const SyntheticInstance inst = generate_replicate(spec, j);
    write_edge_list_file(out_path(g, rep_name(j, "edges")), inst.graph);
    write_labeling_file(out_path(g, rep_name(j, "labels")), inst.truth);
    Json entry{{"replicate", j + 1},
               {"seed", inst.seed},
               {"edges", rep_name(j, "edges")},
               {"labels", rep_name(j, "labels")},
               {"edge_count", inst.graph.edge_count()}};
    if (spec.degree_corrected) entry["weights"] = inst.weights.values();
    files.push_back(entry);
  }
  Json spec_json = to_json(spec);
  spec_json.erase("sampler");
  spec_json.erase("chains");
  write_json_file(out_path(g, "manifest.json"),
                  Json{{"kind", "manifest"}, {"version", kReportVersion}, {"spec", spec_json}, {"files", files}});
  std::cout << "wrote " << spec.replicates << " replicate(s) to " << g.out << '\n';
}

void cmd_fit(const std::string& graph_path, bool trace, const Globals& g) {
  const AdjacencyMatrix a = read_graph_file(graph_path);
  const SamplerConfig cfg = resolve_config(g, a.size());
  if (g.chains < 1) throw std::invalid_argument("--chains must be >= 1");
  cfg.validate(a.size());
  if (cfg.iterations == cfg.burn_in) throw std::invalid_argument("no post-burn-in iterations to summarize");
  const PartitionPrior prior = build_prior(g, cfg, a.size());

  std::vector<PosteriorSample> draws(static_cast<std::size_t>(g.chains));
  std::vector<std::string> traces(static_cast<std::size_t>(g.chains));
  parallel_for(g.chains, g.threads, [&](int c) {
    SamplerConfig cc = cfg;
    cc.seed = cfg.seed + static_cast<std::uint64_t>(c);
    if (!trace) {
      draws[c] = run_chain(a, cc, prior);
      return;
    }
    const CollapsedGibbsSampler sampler(a, cc, prior);
    std::ostringstream os;
    os.precision(17);
    os << "iter\tt\tz_rle\tloglik\n";
    draws[c] = run_chain(a, cc, prior, [&](long long it, const ChainState& st) {
      os << it << '\t' << st.num_clusters() << '\t' << rle(st.z) << '\t' << sampler.log_likelihood(st) << '\n';
    });
    traces[c] = os.str();
  });

  const FitSummary fit = summarize_chains(draws);
  write_json_file(out_path(g, "fit.json"), fit_report_json(fit, cfg, a.size(), g.chains));
  write_labeling_file(out_path(g, "z_hat.labels"), fit.z_hat);
  std::vector<Labeling> pooled;
  for (const PosteriorSample& s : draws) pooled.insert(pooled.end(), s.z.begin(), s.z.end());
  {
    auto os = detail::open_out(out_path(g, "cocluster.csv"));
    write_co_cluster_csv(os, CoClusterMatrix(pooled));
  }
  if (trace) {
    for (int c = 0; c < g.chains; ++c) {
      auto os = detail::open_out(out_path(g, "trace_" + std::to_string(c + 1) + ".tsv"));
      os << traces[c];
    }
  }
  std::cout << "modal_t " << fit.modal_t << (fit.vote_tie ? " (tie)" : "") << "\nper-chain modes";
  for (int m : fit.per_chain_modes) std::cout << ' ' << m;
  std::cout << '\n';
}

void cmd_replicate(const DesignFlags& d, const Globals& g) {
  const StudySpec spec = make_spec(d, g);
  const StudyReport rep = run_replicate_study(spec, g.threads);
  write_json_file(out_path(g, "replicate.json"), to_json(rep));
  std::cout << std::left << std::setw(10) << "replicate" << std::setw(8) << "t_hat" << std::setw(10) << "RI"
            << "correct\n";
  for (const ReplicateResult& r : rep.results) {
    std::cout << std::setw(10) << r.replicate + 1 << std::setw(8) << r.modal_t << std::setw(10) << std::fixed
              << std::setprecision(4) << r.rand_index << (r.correct ? "yes" : "no") << (r.vote_tie ? " (tie)" : "")
              << '\n';
  }
  std::cout << "K=" << spec.k << " p=" << std::setprecision(2) << spec.p << "  " << rep.cell() << '\n';
}

void cmd_oracle(const std::string& graph_path, const std::string& shape, const DesignFlags& d, const Globals& g) {
  AdjacencyMatrix a(2);
  if (!graph_path.empty()) {
    a = read_graph_file(graph_path);
  } else {
    if (d.n < 2 || d.n > kMaxExactPosteriorSize) throw std::invalid_argument("oracle is limited to 2 <= n <= 8");
    if (shape == "empty") {
      a = AdjacencyMatrix(d.n);
    } else if (shape == "complete") {
      a = AdjacencyMatrix(d.n);
      for (int i = 0; i < d.n; ++i) {
        for (int j = i + 1; j < d.n; ++j) a.set_edge(i, j);
      }
    } else {
      StudySpec s = make_spec(d, g);
      a = generate_instance(s, g.cfg.seed).graph;
    }
  }
  if (a.size() > kMaxExactPosteriorSize) throw std::invalid_argument("oracle is limited to n <= 8");
  const SamplerConfig cfg = resolve_config(g, a.size());
  const OracleReport rep = oracle_check(a, cfg, build_prior(g, cfg, a.size()));
  write_json_file(out_path(g, "oracle.json"), to_json(rep, cfg));
  std::cout << "n " << rep.n << "  partitions " << rep.partitions.size() << "  samples " << rep.samples
            << "\nTV " << std::setprecision(6) << rep.total_variation << '\n';
}

void cmd_convergence(const std::string& graph_path, const std::string& truth_path, int starts, const DesignFlags& d,
                     const Globals& g) {
  AdjacencyMatrix a(2);
  Labeling truth;
  if (!graph_path.empty() || !truth_path.empty()) {
    if (graph_path.empty() || truth_path.empty()) throw std::invalid_argument("--graph and --truth go together");
    a = read_graph_file(graph_path);
    truth = read_labeling_file(truth_path);
  } else {
    const StudySpec s = make_spec(d, g);
    s.resolved_sizes();
    const SyntheticInstance inst = generate_replicate(s, 0);
    a = inst.graph;
    truth = inst.truth;
  }
  SamplerConfig cfg = resolve_config(g, a.size());
  cfg.burn_in = 0;  // traces start at iteration 1
  const auto traces = convergence_traces(a, truth, cfg, build_prior(g, cfg, a.size()), starts, g.threads);
  auto os = detail::open_out(out_path(g, "convergence.csv"));
  write_convergence_csv(os, traces);
  for (std::size_t s = 0; s < traces.size(); ++s) {
    std::cout << "start " << s + 1 << "  final RI " << std::fixed << std::setprecision(4) << traces[s].back() << '\n';
  }
}

void cmd_gap(int n, int k, double p0, double q0, int draws, long long sampled, const Globals& g) {
  const GapReport rep = marglik_gap_experiment(n, k, p0, q0, draws, g.cfg.seed, sampled);
  write_json_file(out_path(g, "gap.json"), to_json(rep));
  auto os = detail::open_out(out_path(g, "gap.csv"));
  write_gap_csv(os, rep);
  std::cout << "pairs " << rep.pairs_checked << "  negative " << rep.negative_gaps << "  fraction "
            << rep.violation_fraction << "  Dbar*n/K " << rep.bar_d_n_over_k << '\n';
}

void cmd_vtable(int n, int t_max, const Globals& g) {
  const SamplerConfig cfg = resolve_config(g);
  if (n < 1) throw std::invalid_argument("--n must be >= 1");
  if (t_max < 1 || t_max > n) t_max = n;
  const ComponentPmf pmf = ComponentPmf::parse(g.pmf);
  const MfmPriorTable t =
      g.vcache.empty() ? compute_log_v(n, t_max, cfg.gamma, pmf) : cached_log_v(g.vcache, n, t_max, cfg.gamma, pmf);
  write_json_file(out_path(g, "vtable.json"), to_json(t));
  std::cout << "t\tlog_V\n" << std::setprecision(17);
  for (int i = 1; i <= std::min(t_max, t.t_max()); ++i) std::cout << i << '\t' << t.log_v(i) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian community detection with a mixture-of-finite-mixtures block model"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "file of key = value defaults; flags override");

  Globals g;
  app.add_option("--seed", g.cfg.seed, "master seed")->capture_default_str();
  app.add_option("--gamma", g.cfg.gamma, "Dirichlet weight parameter")->capture_default_str();
  app.add_option("--beta-a", g.cfg.beta_a, "Beta prior shape a for Q")->capture_default_str();
  app.add_option("--beta-b", g.cfg.beta_b, "Beta prior shape b for Q")->capture_default_str();
  app.add_option("--iters", g.cfg.iterations, "iterations per chain")->capture_default_str();
  app.add_option("--burnin", g.cfg.burn_in, "burn-in iterations")->capture_default_str();
  app.add_option("--thin", g.cfg.thin)->capture_default_str();
  app.add_option("--chains", g.chains, "chains per fit")->capture_default_str();
  app.add_option("--init-clusters", g.cfg.init_clusters, "clusters in the random start")->capture_default_str();
  app.add_option("--prior", g.prior, "mfm or crp:<alpha>")->capture_default_str();
  app.add_option("--pmf", g.pmf, "component-count prior for mfm")->capture_default_str();
  app.add_option("--vcache", g.vcache, "V_n(t) table cache file");
  app.add_option("--threads", g.threads, "worker threads (MFM_SBM_THREADS)")->capture_default_str();
  app.add_option("--out", g.out, "output directory")->capture_default_str();

  DesignFlags design;
  std::string graph_path, truth_path, shape = "sbm";
  bool trace = false;
  int starts = 5, vt_n = 100, vt_t = 0, gap_n = 12, gap_k = 2, gap_draws = 50;
  long long gap_sampled = 0;
  double p0 = 0.9, q0 = 0.1;

  auto* gen = app.add_subcommand("generate", "write synthetic graphs, truths and a manifest");
  add_design(gen, design);

  auto* fit = app.add_subcommand("fit", "run chains on a graph and summarize");
  fit->add_option("graph", graph_path, "edge list, or .csv adjacency matrix")->required();
  fit->add_flag("--trace", trace, "write per-chain iteration traces");

  auto* rep = app.add_subcommand("replicate", "replicate recovery study");
  add_design(rep, design);

  auto* orc = app.add_subcommand("oracle", "compare the sampler with the exact posterior (n <= 8)");
  add_design(orc, design);
  orc->add_option("--graph", graph_path);
  orc->add_option("--shape", shape, "generated graph: sbm, empty or complete")
      ->check(CLI::IsMember({"sbm", "empty", "complete"}));

  auto* conv = app.add_subcommand("convergence", "Rand index traces from several random starts");
  add_design(conv, design);
  conv->add_option("--graph", graph_path);
  conv->add_option("--truth", truth_path, "1-based true labels");
  conv->add_option("--starts", starts)->capture_default_str();

  auto* gap = app.add_subcommand("gap", "entropy-approximation gap diagnostic");
  gap->add_option("--n", gap_n)->capture_default_str();
  gap->add_option("--k", gap_k)->capture_default_str();
  gap->add_option("--p0", p0)->capture_default_str();
  gap->add_option("--q0", q0)->capture_default_str();
  gap->add_option("--draws", gap_draws)->capture_default_str();
  gap->add_option("--sampled", gap_sampled, "labelings per graph (0 = exhaustive)")->capture_default_str();

  auto* vt = app.add_subcommand("vtable", "dump log V_n(t)");
  vt->add_option("--n", vt_n)->capture_default_str();
  vt->add_option("--t-max", vt_t, "largest t (default n)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  }
  g.init_explicit = app.count("--init-clusters") > 0;

  try {
    if (g.threads < 1) throw std::invalid_argument("--threads must be >= 1");
    if (*gen) cmd_generate(design, g);
    if (*fit) cmd_fit(graph_path, trace, g);
    if (*rep) cmd_replicate(design, g);
    if (*orc) cmd_oracle(graph_path, shape, design, g);
    if (*conv) cmd_convergence(graph_path, truth_path, starts, design, g);
    if (*gap) cmd_gap(gap_n, gap_k, p0, q0, gap_draws, gap_sampled, g);
    if (*vt) cmd_vtable(vt_n, vt_t, g);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
