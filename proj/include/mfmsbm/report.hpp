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

// JSON and CSV output. Labels are written 1-based; NaN and -inf become null.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mfmsbm/gibbs.hpp"
#include "mfmsbm/io.hpp"
#include "mfmsbm/posterior.hpp"
#include "mfmsbm/prior.hpp"
#include "mfmsbm/study.hpp"
#include "mfmsbm/theory.hpp"

namespace mfmsbm {

using Json = nlohmann::ordered_json;

inline constexpr int kReportVersion = 1;

namespace detail {

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace detail

inline Json to_json(const SamplerConfig& c) {
  return Json{{"prior", c.prior.str()},   {"gamma", c.gamma},         {"beta_a", c.beta_a},
              {"beta_b", c.beta_b},       {"iterations", c.iterations}, {"burn_in", c.burn_in},
              {"init_clusters", c.init_clusters}, {"thin", c.thin},   {"seed", c.seed}};
}

inline Json to_json(const StudySpec& s) {
  return Json{{"n", s.n},
              {"k", s.k},
              {"sizes", s.resolved_sizes()},
              {"p", s.p},
              {"q", s.q},
              {"replicates", s.replicates},
              {"degree_corrected", s.degree_corrected},
              {"dc_fraction", s.dc_fraction},
              {"dc_weight", s.dc_weight},
              {"chains", s.chains},
              {"master_seed", s.master_seed},
              {"sampler", to_json(s.sampler)}};
}

inline Json to_json(const FitSummary& f) {
  Json hist = Json::object();
  for (auto [t, c] : f.t_histogram) hist[std::to_string(t)] = c;
  return Json{{"modal_t", f.modal_t},
              {"t_histogram", hist},
              {"z_hat", f.z_hat.one_based()},
              {"per_chain_modes", f.per_chain_modes},
              {"vote_tie", f.vote_tie}};
}

inline Json fit_report_json(const FitSummary& f, const SamplerConfig& cfg, int n, int chains) {
  Json j{{"kind", "fit"}, {"version", kReportVersion}, {"n", n}, {"chains", chains}, {"config", to_json(cfg)}};
  j.update(to_json(f));
  return j;
}

inline Json to_json(const StudyReport& r) {
  Json reps = Json::array();
  for (const ReplicateResult& x : r.results) {
    reps.push_back(Json{{"replicate", x.replicate},
                        {"seed", x.seed},
                        {"modal_t", x.modal_t},
                        {"rand_index", x.rand_index},
                        {"correct", x.correct},
                        {"vote_tie", x.vote_tie}});
  }
  return Json{{"kind", "replicate"},
              {"version", kReportVersion},
              {"spec", to_json(r.spec)},
              {"proportion_correct", r.proportion_correct},
              {"mean_ri_correct", detail::finite_or_null(r.mean_ri_correct)},
              {"cell", r.cell()},
              {"replicates", reps}};
}

inline Json to_json(const GapReport& r) {
  Json by_r = Json::array();
  for (auto [d, g] : r.min_gap_by_r) by_r.push_back(Json{{"r", d}, {"min_gap", g}, {"count", r.count_by_r.at(d)}});
  return Json{{"kind", "gap"},
              {"version", kReportVersion},
              {"n", r.n},
              {"k", r.k},
              {"p0", r.p0},
              {"q0", r.q0},
              {"n_draws", r.n_draws},
              {"seed", r.seed},
              {"exhaustive", r.exhaustive},
              {"bar_d", r.bar_d},
              {"bar_d_n_over_k", r.bar_d_n_over_k},
              {"pairs_checked", r.pairs_checked},
              {"negative_gaps", r.negative_gaps},
              {"violation_fraction", r.violation_fraction},
              {"mean_gap", r.mean_gap},
              {"min_gap_ratio", detail::finite_or_null(r.min_gap_ratio)},
              {"by_r", by_r}};
}

inline Json to_json(const OracleReport& r, const SamplerConfig& cfg) {
  Json table = Json::array();
  for (std::size_t i = 0; i < r.partitions.size(); ++i) {
    std::vector<int> z = r.partitions[i];
    for (int& v : z) ++v;
    table.push_back(Json{{"z", z}, {"exact", r.exact[i]}, {"empirical", r.empirical[i]}});
  }
  return Json{{"kind", "oracle"},
              {"version", kReportVersion},
              {"n", r.n},
              {"config", to_json(cfg)},
              {"samples", r.samples},
              {"total_variation", r.total_variation},
              {"partitions", table}};
}

// ---------------------------------------------------------------------------
// V_n(t) table cache

inline Json to_json(const MfmPriorTable& t) {
  Json lv = Json::array();
  for (double v : t.log_v_values()) lv.push_back(detail::finite_or_null(v));
  return Json{{"kind", "vtable"}, {"version", kReportVersion}, {"n", t.n()},
              {"gamma", t.gamma()}, {"pmf", t.pmf().descriptor()}, {"log_v", lv}};
}

inline MfmPriorTable v_table_from_json(const Json& j) {
  if (j.value("kind", "") != "vtable" || j.value("version", 0) != kReportVersion) {
    throw std::invalid_argument("not a version-1 V table");
  }
  std::vector<double> lv;
  for (const Json& v : j.at("log_v")) lv.push_back(v.is_null() ? kNegInf : v.get<double>());
  return MfmPriorTable(j.at("n").get<int>(), j.at("gamma").get<double>(),
                       ComponentPmf::parse(j.at("pmf").get<std::string>()), std::move(lv));
}

// Loads the table from `path` when it records the same (n, gamma, pmf) and
// covers t_max; otherwise recomputes and rewrites the cache.
inline MfmPriorTable cached_log_v(const std::string& path, int n, int t_max, double gamma, const ComponentPmf& pmf) {
  if (std::filesystem::exists(path)) {
    try {
      std::ifstream in(path);
      const MfmPriorTable t = v_table_from_json(Json::parse(in));
      if (t.n() == n && t.gamma() == gamma && t.pmf() == pmf && t.t_max() >= t_max) return t;
    } catch (const std::exception&) {
      // stale or corrupt cache: fall through and rebuild
    }
  }
  MfmPriorTable t = compute_log_v(n, t_max, gamma, pmf);
  auto out = detail::open_out(path);
  out << to_json(t).dump(1) << '\n';
  return t;
}

// ---------------------------------------------------------------------------
// Files

inline void write_json_file(const std::string& path, const Json& j) {
  auto out = detail::open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_co_cluster_csv(std::ostream& out, const CoClusterMatrix& pi) {
  out << "node";
  for (int j = 0; j < pi.size(); ++j) out << ',' << j + 1;
  out << '\n';
  for (int i = 0; i < pi.size(); ++i) {
    out << i + 1;
    for (int j = 0; j < pi.size(); ++j) out << ',' << pi(i, j);
    out << '\n';
  }
}

inline void write_gap_csv(std::ostream& out, const GapReport& r) {
  out << "r,min_gap,count\n";
  out.precision(17);
  for (auto [d, g] : r.min_gap_by_r) out << d << ',' << g << ',' << r.count_by_r.at(d) << '\n';
}

// Long format: one row per (start, iteration).
inline void write_convergence_csv(std::ostream& out, const std::vector<std::vector<double>>& traces) {
  out << "start,iteration,rand_index\n";
  out.precision(17);
  for (std::size_t s = 0; s < traces.size(); ++s) {
    for (std::size_t it = 0; it < traces[s].size(); ++it) out << s + 1 << ',' << it + 1 << ',' << traces[s][it] << '\n';
  }
}

}  // namespace mfmsbm
