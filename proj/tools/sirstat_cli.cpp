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

// sirstat command-line front end. Exit codes: 0 success, 1 runtime error,
// 2 usage error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sirstat/sirstat.hpp"

namespace {

using namespace sirstat;

struct Common {
  std::uint64_t seed = default_seed;
  std::optional<unsigned> threads;
  std::string out = "-";

  unsigned thread_count() const { return threads ? *threads : default_thread_count(); }
};

void add_common(CLI::App* cmd, Common& common, bool random = true) {
  cmd->add_option("--out", common.out, "output file ('-' for stdout)");
  if (random) {
    cmd->add_option("--seed", common.seed, "master seed")->capture_default_str();
    cmd->add_option("--threads", common.threads, "worker threads (default: REPRO_THREADS, then hardware)")
        ->check(CLI::PositiveNumber);
  }
}

void emit(const Common& common, const std::string& text) {
  if (common.out == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) fail(ErrorKind::io, "write to stdout failed");
    return;
  }
  std::ofstream f(common.out, std::ios::binary);
  f << text;
  if (!f) fail(ErrorKind::io, "cannot write " + common.out);
}

void emit(const Common& common, const csv::Table& t) { emit(common, csv::to_string(t)); }

csv::Table read_input(const std::string& name) {
  if (name == "-") return csv::read(std::cin);
  std::ifstream f(name);
  if (!f) fail(ErrorKind::io, "cannot open " + name);
  return csv::read(f);
}

CountPath read_path(const std::string& name) { return csv::path_from_table(read_input(name)); }

/// geometric:C, lognormal:MEAN:SD, gamma:MEAN:SD or explicit:W1;W2;...
InfectivityProfile parse_profile(const std::string& spec, std::int64_t length) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.empty()) fail(ErrorKind::invalid_argument, "empty profile");
  auto number = [&](std::size_t k) {
    if (k >= parts.size()) fail(ErrorKind::invalid_argument, "profile '" + spec + "' is missing a parameter");
    return csv::parse_double(parts[k]);
  };
  const std::string& family = parts[0];
  if (family == "geometric") return geometric_profile(number(1), length);
  if (family == "lognormal") return discretize_interval(ProfileFamily::lognormal, number(1), number(2), length);
  if (family == "gamma") return discretize_interval(ProfileFamily::gamma, number(1), number(2), length);
  if (family == "explicit" && parts.size() == 2) {
    std::vector<double> w;
    std::stringstream ws(parts[1]);
    for (std::string x; std::getline(ws, x, ';');) w.push_back(csv::parse_double(x));
    return explicit_profile(std::move(w));
  }
  fail(ErrorKind::invalid_argument, "unknown profile '" + spec + "'");
}

std::int64_t resolve_last(std::int64_t last, const CountPath& path) { return last > 0 ? last : path.days(); }

// ---------------------------------------------------------------------------

void register_simulate(CLI::App& app, std::function<void()>& run) {
  auto* cmd = app.add_subcommand("simulate", "simulate a chain-binomial SIR path");
  auto common = std::make_shared<Common>();
  struct Opts {
    double a = 0.1, c = 0.07;
    Count n = 3'000'000, i0 = 50, recovered = 0;
    std::int64_t T = 700;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--a", o->a, "contagion parameter")->capture_default_str();
  cmd->add_option("--c", o->c, "recovery probability")->capture_default_str();
  cmd->add_option("--n", o->n, "population size")->capture_default_str();
  cmd->add_option("--i0", o->i0, "initially infected")->capture_default_str();
  cmd->add_option("--recovered0", o->recovered, "initially recovered")->capture_default_str();
  cmd->add_option("--t", o->T, "days to simulate")->capture_default_str();
  add_common(cmd, *common);
  cmd->callback([&run, common, o] {
    run = [common, o] {
      const ModelParams params(o->a, o->c, o->n);
      emit(*common, csv::path_table(simulate(params, initial_state(o->n, o->i0, o->recovered), o->T,
                                             RngStream{common->seed, 0})));
    };
  });
}

void register_estimate(CLI::App& app, std::function<void()>& run) {
  auto* cmd = app.add_subcommand("estimate", "fit estimators to a count path");
  auto common = std::make_shared<Common>();
  struct Opts {
    std::string input = "-", method = "all", rolling = "none";
    std::int64_t first = 1, last = 0;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--input", o->input, "count path CSV ('-' for stdin)")->capture_default_str();
  cmd->add_option("--method", o->method, "binomial-ml, poisson-aml, gaussian-aml, unfeasible-gaussian, "
                                         "poisson-gaussian or all")
      ->capture_default_str();
  cmd->add_option("--rolling", o->rolling, "none, expanding, or a fixed window length in days")->capture_default_str();
  cmd->add_option("--first", o->first, "first day used (non-rolling)")->capture_default_str();
  cmd->add_option("--last", o->last, "last day used (non-rolling; 0 = all)")->capture_default_str();
  add_common(cmd, *common, false);
  cmd->callback([&run, common, o] {
    run = [common, o] {
      const auto path = read_path(o->input);
      std::vector<Method> methods;
      if (o->method == "all") methods.assign(std::begin(all_methods), std::end(all_methods));
      else methods.push_back(parse_method(o->method));
      std::vector<FitResult> fits;
      if (o->rolling == "none") {
        const auto stats = build_stats(path, o->first, resolve_last(o->last, path));
        for (Method m : methods) fits.push_back(try_fit(stats, m));
      } else {
        const RollingMode mode =
            o->rolling == "expanding" ? RollingMode::expanding() : RollingMode::fixed(csv::parse_int(o->rolling));
        for (Method m : methods) {
          const auto series = rolling_fit(path, m, mode);
          fits.insert(fits.end(), series.begin(), series.end());
        }
      }
      emit(*common, csv::fits_table(fits));
    };
  });
}

void register_rzero(CLI::App& app, std::function<void()>& run) {
  auto* cmd = app.add_subcommand("rzero", "effective and basic reproduction ratios along a path");
  auto common = std::make_shared<Common>();
  struct Opts {
    std::string input = "-";
    double a = 0.1, c = 0.07;
    std::int64_t horizon = 100, replications = 100;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--input", o->input, "count path CSV")->capture_default_str();
  cmd->add_option("--a", o->a, "contagion parameter")->capture_default_str();
  cmd->add_option("--c", o->c, "recovery probability")->capture_default_str();
  cmd->add_option("--horizon", o->horizon, "forward horizon H in days")->capture_default_str();
  cmd->add_option("--replications", o->replications, "forward simulations S per day")->capture_default_str();
  add_common(cmd, *common);
  cmd->callback([&run, common, o] {
    run = [common, o] {
      const auto path = read_path(o->input);
      RzeroConfig cfg;
      cfg.horizon = o->horizon;
      cfg.replications = o->replications;
      cfg.rng = RngStream{common->seed, 0};
      cfg.threads = common->thread_count();
      emit(*common, csv::rzero_table(rzero_path(path, ModelParams(o->a, o->c, path.population()), cfg)));
    };
  });
}

void register_epiestim(CLI::App& app, std::function<void()>& run) {
  auto* cmd = app.add_subcommand("epiestim", "instantaneous reproduction number from incidence");
  auto common = std::make_shared<Common>();
  struct Opts {
    std::string input = "-", profile = "lognormal:4.5:2.5";
    std::int64_t window = 7, length = 100;
    double shape = 1.0, rate = 0.2;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--input", o->input, "count path CSV")->capture_default_str();
  cmd->add_option("--profile", o->profile, "geometric:C, lognormal:MEAN:SD, gamma:MEAN:SD or explicit:W1;W2;...")
      ->capture_default_str();
  cmd->add_option("--profile-length", o->length, "profile support in days")->capture_default_str();
  cmd->add_option("--window", o->window, "smoothing window tau in days")->capture_default_str();
  cmd->add_option("--prior-shape", o->shape, "gamma prior shape")->capture_default_str();
  cmd->add_option("--prior-rate", o->rate, "gamma prior rate")->capture_default_str();
  add_common(cmd, *common, false);
  cmd->callback([&run, common, o] {
    run = [common, o] {
      const auto incidence = incidence_series(read_path(o->input));
      emit(*common, csv::instant_table(instantaneous_r(incidence, parse_profile(o->profile, o->length), o->window,
                                                       RPrior{o->shape, o->rate})));
    };
  });
}

void register_ar(CLI::App& app, std::function<void()>& run) {
  auto* cmd = app.add_subcommand("ar", "autoregression sums of lagged incidence");
  auto common = std::make_shared<Common>();
  auto input = std::make_shared<std::string>("-");
  auto orders = std::make_shared<std::vector<std::int64_t>>(std::vector<std::int64_t>{7, 14, 21});
  cmd->add_option("--input", *input, "count path CSV")->capture_default_str();
  cmd->add_option("--order", *orders, "lag order H (repeatable)")->capture_default_str();
  add_common(cmd, *common, false);
  cmd->callback([&run, common, input, orders] {
    run = [common, input, orders] {
      const auto incidence = incidence_series(read_path(*input));
      std::vector<ArEstimate> est;
      for (auto H : *orders) est.push_back(ar_estimate(incidence, H));
      emit(*common, csv::ar_table(est));
    };
  });
}

void register_mc(CLI::App& app, std::function<void()>& run) {
  auto* cmd = app.add_subcommand("mc", "Monte-Carlo designs, summary tables and histograms");
  auto common = std::make_shared<Common>();
  struct Opts {
    int table = 0;
    McDesign design;
    std::string method = "poisson-aml", estimand = "a";
    std::int64_t bins = 0;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--table", o->table, "reproduce summary table 3, 4 or 5")->check(CLI::IsMember({3, 4, 5}));
  cmd->add_option("--n1-0", o->design.n1_0, "initial susceptibles")->capture_default_str();
  cmd->add_option("--n2-0", o->design.n2_0, "initial infected")->capture_default_str();
  cmd->add_option("--t", o->design.T, "days per replication")->capture_default_str();
  cmd->add_option("--a", o->design.a, "contagion parameter")->capture_default_str();
  cmd->add_option("--c", o->design.c, "recovery probability")->capture_default_str();
  cmd->add_option("--reps", o->design.reps, "replications")->capture_default_str();
  cmd->add_option("--method", o->method, "estimator")->capture_default_str();
  cmd->add_option("--estimand", o->estimand, "a, c or r0")->capture_default_str();
  cmd->add_option("--histogram", o->bins, "emit a histogram with this many bins instead of a summary");
  add_common(cmd, *common);
  cmd->callback([&run, common, o] {
    run = [common, o] {
      const Method method = parse_method(o->method);
      const Estimand estimand = parse_estimand(o->estimand);
      auto prepare = [&](McDesign d) {
        d.seed = common->seed;
        d.threads = common->thread_count();
        return d;
      };
      if (o->table != 0) {
        const auto table = summary_table(o->table);
        std::vector<csv::SummaryRow> rows;
        for (const auto& row : table.rows) {
          auto d = prepare(row.design);
          d.reps = o->design.reps;
          rows.push_back(csv::summary_row(d, run_design(d, method), table.estimand));
        }
        emit(*common, csv::summary_table_csv(rows));
        return;
      }
      const auto d = prepare(o->design);
      if (o->bins > 0) {
        emit(*common, csv::histogram_table(histogram(run_replications(d, method), estimand, o->bins)));
      } else {
        emit(*common, csv::summary_table_csv({csv::summary_row(d, run_design(d, method), estimand)}));
      }
    };
  });
}

void register_posterior(CLI::App& app, std::function<void()>& run) {
  auto* cmd = app.add_subcommand("posterior", "conjugate gamma posterior of (a, c) and R0");
  auto common = std::make_shared<Common>();
  struct Opts {
    std::string input = "-";
    PosteriorPair prior = default_prior();
    std::int64_t first = 1, last = 0;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--input", o->input, "count path CSV")->capture_default_str();
  cmd->add_option("--nu-a", o->prior.a.shape, "prior shape for a")->capture_default_str();
  cmd->add_option("--lambda-a", o->prior.a.rate, "prior rate for a")->capture_default_str();
  cmd->add_option("--nu-c", o->prior.c.shape, "prior shape for c")->capture_default_str();
  cmd->add_option("--lambda-c", o->prior.c.rate, "prior rate for c")->capture_default_str();
  cmd->add_option("--first", o->first, "first day used")->capture_default_str();
  cmd->add_option("--last", o->last, "last day used (0 = all)")->capture_default_str();
  add_common(cmd, *common, false);
  cmd->callback([&run, common, o] {
    run = [common, o] {
      const auto path = read_path(o->input);
      const auto post = posterior_update(o->prior, build_stats(path, o->first, resolve_last(o->last, path)));
      emit(*common, csv::posterior_table({summarize(post)}));
    };
  });
}

void register_final_size(CLI::App& app, std::function<void()>& run) {
  auto* cmd = app.add_subcommand("final-size", "limit of the deterministic model");
  auto common = std::make_shared<Common>();
  struct Opts {
    double a = 0.1, c = 0.07, x0 = 1.0, y0 = 0.0;
    std::int64_t trajectory = 0;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--a", o->a, "contagion parameter")->capture_default_str();
  cmd->add_option("--c", o->c, "recovery probability")->capture_default_str();
  cmd->add_option("--x0", o->x0, "initial susceptible fraction")->capture_default_str();
  cmd->add_option("--y0", o->y0, "initial infected fraction")->capture_default_str();
  cmd->add_option("--trajectory", o->trajectory, "emit t,x,y,z for this many days instead");
  add_common(cmd, *common, false);
  cmd->callback([&run, common, o] {
    run = [common, o] {
      const ModelParams params(o->a, o->c, 1);
      if (o->trajectory > 0) {
        const double z0 = 1.0 - o->x0 - o->y0;
        emit(*common, csv::trajectory_table(trajectory(params, {o->x0, o->y0, z0}, o->trajectory)));
        return;
      }
      const double x = final_size(params, o->x0, o->y0);
      emit(*common, csv::Table{{"a", "c", "x0", "y0", "x_inf", "attack_rate"},
                               {{csv::format(o->a), csv::format(o->c), csv::format(o->x0), csv::format(o->y0),
                                 csv::format(x), csv::format(1.0 - x)}}});
    };
  });
}

void register_repro(CLI::App& app, std::function<void()>& run) {
  auto* cmd = app.add_subcommand("repro", "write every table and figure input plus a hash manifest");
  auto common = std::make_shared<Common>();
  auto dir = std::make_shared<std::string>("repro");
  auto cfg = std::make_shared<ReproConfig>();
  cmd->add_option("--dir", *dir, "output directory")->capture_default_str();
  cmd->add_option("--table-reps", cfg->table_reps, "replications per table row")->capture_default_str();
  cmd->add_option("--histogram-reps", cfg->histogram_reps, "replications per histogram design")
      ->capture_default_str();
  cmd->add_option("--rzero-replications", cfg->rzero_replications, "forward simulations S")->capture_default_str();
  cmd->add_option("--ar-reps", cfg->ar_reps, "replications of the AR study")->capture_default_str();
  add_common(cmd, *common);
  cmd->callback([&run, common, dir, cfg] {
    run = [common, dir, cfg] {
      cfg->seed = common->seed;
      cfg->threads = common->thread_count();
      const auto files = run_repro_suite(*cfg);
      write_repro(*dir, files);
      emit(*common, manifest(files));
    };
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sirstat: stochastic SIR simulation and reproduction-ratio estimation"};
  app.require_subcommand(1);
  std::function<void()> run;
  register_simulate(app, run);
  register_estimate(app, run);
  register_rzero(app, run);
  register_epiestim(app, run);
  register_ar(app, run);
  register_mc(app, run);
  register_posterior(app, run);
  register_final_size(app, run);
  register_repro(app, run);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (run) run();
  } catch (const sirstat::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
