// Copyright 2026 The sirstat Authors
//
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

// The full reproduction suite: every table and figure input as CSV text,
// plus a manifest of content hashes. Output bytes depend only on the seed
// and the replication counts, never on the worker count.

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sirstat/bayes.hpp"
#include "sirstat/csv.hpp"
#include "sirstat/epiestim.hpp"
#include "sirstat/hetero.hpp"
#include "sirstat/mechanistic.hpp"
#include "sirstat/montecarlo.hpp"
#include "sirstat/reproduction.hpp"
#include "sirstat/rng.hpp"
#include "sirstat/sir.hpp"

namespace sirstat {

struct ReproConfig {
  std::uint64_t seed = default_seed;
  unsigned threads = 1;
  std::int64_t table_reps = 10'000;
  std::int64_t histogram_reps = 10'000;
  std::int64_t histogram_bins = 50;
  std::int64_t rzero_replications = 100;  // S
  std::int64_t comparison_days = 200;
  std::int64_t ar_reps = 100;
};

struct ReproFile {
  std::string name;
  std::string content;
};

/// Outbreak used for the single-path outputs: 3 million people, 50 seeds.
inline ModelParams long_run_params() { return ModelParams(0.1, 0.07, 3'000'000); }
inline constexpr Count long_run_i0 = 50;
inline constexpr std::int64_t long_run_days = 700;

inline std::vector<ReproFile> run_repro_suite(const ReproConfig& cfg) {
  std::vector<ReproFile> files;
  auto add = [&](std::string name, const csv::Table& t) { files.push_back({std::move(name), csv::to_string(t)}); };
  const RngStream root{cfg.seed, 0};

  // Long-run path, reproduction ratios at three horizons, mechanistic limit.
  const auto params = long_run_params();
  const auto path = simulate(params, initial_state(params.n, long_run_i0), long_run_days, root.substream("path"));
  add("fig1_path.csv", csv::path_table(path));
  for (std::int64_t H : {100, 60, 30}) {
    RzeroConfig rc;
    rc.horizon = H;
    rc.replications = cfg.rzero_replications;
    rc.rng = root.substream("rzero");
    rc.threads = cfg.threads;
    add("fig3_rzero_H" + std::to_string(H) + ".csv", csv::rzero_table(rzero_path(path, params, rc)));
  }
  const double y0 = static_cast<double>(long_run_i0) / static_cast<double>(params.n);
  add("mechanistic_trajectory.csv", csv::trajectory_table(trajectory(params, {1.0 - y0, y0, 0.0}, long_run_days)));

  // Summary tables.
  for (int number : {3, 4, 5}) {
    const auto table = summary_table(number);
    std::vector<csv::SummaryRow> rows;
    for (auto row : table.rows) {
      row.design.reps = cfg.table_reps;
      row.design.seed = cfg.seed;
      row.design.threads = cfg.threads;
      rows.push_back(csv::summary_row(row.design, run_design(row.design, Method::poisson_aml), table.estimand));
    }
    add("table" + std::to_string(number) + ".csv", csv::summary_table_csv(rows));
  }

  // Finite-sample distributions: Poisson AML, then the unfeasible Gaussian.
  const struct {
    const char* prefix;
    Method method;
    Count n2_0;
  } hist_designs[] = {{"fig4", Method::poisson_aml, 100},
                      {"fig5", Method::poisson_aml, 1000},
                      {"figa1", Method::unfeasible_gaussian, 100},
                      {"figa2", Method::unfeasible_gaussian, 1000}};
  for (const auto& h : hist_designs) {
    McDesign d;
    d.n2_0 = h.n2_0;
    d.reps = cfg.histogram_reps;
    d.seed = cfg.seed;
    d.threads = cfg.threads;
    const auto samples = run_replications(d, h.method);
    for (Estimand e : {Estimand::a, Estimand::c, Estimand::r0}) {
      add(std::string(h.prefix) + "_" + std::string(to_string(e)) + ".csv",
          csv::histogram_table(histogram(samples, e, cfg.histogram_bins)));
    }
  }

  // Estimator comparison on one path, and AR sums over replications.
  McDesign cmp;
  cmp.T = cfg.comparison_days;
  cmp.reps = 1;
  cmp.seed = cfg.seed;
  add("fig6_comparison.csv", csv::comparison_table(comparison_series(cmp, ComparisonConfig{}).front()));

  McDesign ar_design;
  ar_design.T = 100;
  ar_design.reps = cfg.ar_reps;
  ar_design.seed = cfg.seed;
  std::vector<ArEstimate> ar(static_cast<std::size_t>(3 * cfg.ar_reps));
  parallel_for(static_cast<std::size_t>(cfg.ar_reps), cfg.threads, [&](std::size_t r) {
    const auto incidence = incidence_series(replicate_path(ar_design, static_cast<std::int64_t>(r)));
    const std::int64_t orders[] = {7, 14, 21};
    for (std::size_t k = 0; k < 3; ++k) ar[3 * r + k] = ar_estimate(incidence, orders[k]);
  });
  add("fig7_ar.csv", csv::ar_table(ar));

  // Instantaneous R on the long-run path with both profiles.
  const auto incidence = incidence_series(path);
  add("epiestim_geometric.csv",
      csv::instant_table(instantaneous_r(incidence, geometric_profile(params.c, 200), 7, RPrior{})));
  add("epiestim_lognormal.csv",
      csv::instant_table(instantaneous_r(incidence, discretize_interval(ProfileFamily::lognormal, 4.5, 2.5, 200), 7,
                                         RPrior{})));

  // Posterior of R0 on growing prefixes of the long-run path.
  std::vector<PosteriorSummary> posts;
  for (std::int64_t T : {20, 40, 60, 100, 200, 400, 700}) {
    posts.push_back(summarize(posterior_update(default_prior(), build_stats(path, 1, T))));
  }
  add("posterior.csv", csv::posterior_table(posts));

  // Two groups: a small vulnerable and infectious group inside a large one.
  const auto hp = HeteroParams::rank_one({1.0, 0.2}, {0.4, 0.1}, {0.07, 0.07}, {200'000, 800'000});
  const HeteroState hinit{{initial_state(200'000, 100), initial_state(800'000, 100)}};
  add("hetero_paths.csv", csv::group_paths_table(simulate_sir2(hp, hinit, 250, root.substream("hetero"))));
  return files;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// One "<fnv1a-64 hex>  <name>" line per file.
inline std::string manifest(const std::vector<ReproFile>& files) {
  std::string out;
  for (const auto& f : files) out += hex64(hash_string(f.content)) + "  " + f.name + "\n";
  return out;
}

inline void write_repro(const std::filesystem::path& dir, const std::vector<ReproFile>& files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
  auto put = [&](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    if (!out) fail(ErrorKind::io, "cannot write " + (dir / name).string());
  };
  for (const auto& f : files) put(f.name, f.content);
  put("manifest.txt", manifest(files));
}

}  // namespace sirstat
