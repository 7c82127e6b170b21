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

// Replication harness: simulate -> fit pipelines over a design, summary
// tables, histograms and per-day estimator comparisons.
//
// Replication r of a design always draws from substream r of the master
// seed, and results are stored by index, so every output is independent of
// the worker count.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sirstat/epiestim.hpp"
#include "sirstat/error.hpp"
#include "sirstat/estimators.hpp"
#include "sirstat/numerics.hpp"
#include "sirstat/parallel.hpp"
#include "sirstat/rng.hpp"
#include "sirstat/sir.hpp"

namespace sirstat {

enum class Estimand { a, c, r0 };

inline std::string_view to_string(Estimand e) {
  switch (e) {
    case Estimand::a: return "a";
    case Estimand::c: return "c";
    case Estimand::r0: return "r0";
  }
  return "?";
}

inline Estimand parse_estimand(std::string_view name) {
  if (name == "a") return Estimand::a;
  if (name == "c") return Estimand::c;
  if (name == "r0" || name == "R0") return Estimand::r0;
  fail(ErrorKind::invalid_argument, "unknown estimand '" + std::string(name) + "' (expected a, c or r0)");
}

inline constexpr std::uint64_t default_seed = 20'200'504;

struct McDesign {
  Count n1_0 = 3'000'000;
  Count n2_0 = 100;
  std::int64_t T = 20;
  double a = 0.14;
  double c = 0.07;
  std::int64_t reps = 10'000;
  std::uint64_t seed = default_seed;
  unsigned threads = 1;

  ModelParams params() const { return ModelParams(a, c, n1_0 + n2_0); }
  EpidemicState initial() const { return initial_state(n1_0 + n2_0, n2_0); }
  double r0() const { return a / c; }

  void validate() const {
    require(n1_0 >= 0 && n2_0 >= 0 && n1_0 + n2_0 >= 1, ErrorKind::invalid_argument, "design counts must be >= 0");
    require(T >= 1, ErrorKind::invalid_argument, "design horizon T must be >= 1");
    require(reps >= 1, ErrorKind::invalid_argument, "replication count must be >= 1");
    params().validate();
  }
};

/// Path of replication r.
inline CountPath replicate_path(const McDesign& design, std::int64_t r) {
  return simulate(design.params(), design.initial(), design.T,
                  RngStream{design.seed, 0}.substream(static_cast<std::uint64_t>(r)));
}

struct McSamples {
  McDesign design;
  Method method = Method::poisson_aml;
  std::vector<FitResult> fits;  // one per replication, in replication order

  /// Failed fits and infinite or non-finite ratios are excluded from moments.
  static bool flagged(const FitResult& f) {
    return f.has(fit_flag::failed) || f.r0_infinite() || !std::isfinite(f.a_hat) || !std::isfinite(f.c_hat) ||
           !std::isfinite(f.r0_hat);
  }
  std::int64_t flagged_count() const {
    return std::count_if(fits.begin(), fits.end(), [](const FitResult& f) { return flagged(f); });
  }
  std::vector<double> values(Estimand e) const {
    std::vector<double> out;
    out.reserve(fits.size());
    for (const auto& f : fits) {
      if (flagged(f)) continue;
      out.push_back(e == Estimand::a ? f.a_hat : e == Estimand::c ? f.c_hat : f.r0_hat);
    }
    return out;
  }
};

inline McSamples run_replications(const McDesign& design, Method method) {
  design.validate();
  McSamples out;
  out.design = design;
  out.method = method;
  out.fits.resize(static_cast<std::size_t>(design.reps));
  parallel_for(out.fits.size(), design.threads, [&](std::size_t r) {
    out.fits[r] = try_fit(build_stats(replicate_path(design, static_cast<std::int64_t>(r))), method);
  });
  return out;
}

struct EstimandSummary {
  double mean = 0.0;
  double var = 0.0;  // unbiased
  double median = 0.0;
  double skewness = 0.0;

  /// Monte-Carlo standard error of the mean.
  double se(std::int64_t used) const { return std::sqrt(var / static_cast<double>(used)); }
};

struct SummaryStats {
  EstimandSummary a, c, r0;
  double rho = 0.0;  // correlation of a_hat and c_hat
  std::int64_t used = 0;
  std::int64_t flagged = 0;

  const EstimandSummary& of(Estimand e) const { return e == Estimand::a ? a : e == Estimand::c ? c : r0; }
};

inline EstimandSummary summarize_values(std::span<const double> xs) {
  return {mean(xs), variance(xs), median(xs), skewness(xs)};
}

inline SummaryStats summarize(const McSamples& samples) {
  SummaryStats s;
  const auto a = samples.values(Estimand::a);
  if (a.empty()) fail(ErrorKind::empty_result, "every replication was flagged");
  const auto c = samples.values(Estimand::c);
  const auto r0 = samples.values(Estimand::r0);
  s.a = summarize_values(a);
  s.c = summarize_values(c);
  s.r0 = summarize_values(r0);
  s.rho = correlation(a, c);
  s.used = static_cast<std::int64_t>(a.size());
  s.flagged = samples.flagged_count();
  return s;
}

inline SummaryStats run_design(const McDesign& design, Method method) {
  return summarize(run_replications(design, method));
}

struct Histogram {
  std::vector<double> edges;    // bins + 1 increasing edges
  std::vector<double> density;  // integrates to one over the edges
  double skewness = 0.0;
};

/// Equal-width histogram over [min, max]. A sample with no spread gets one
/// bin of unit width centred on the common value.
inline Histogram histogram(std::span<const double> xs, std::int64_t bins) {
  require(bins >= 1, ErrorKind::invalid_argument, "histogram needs at least one bin");
  if (xs.empty()) fail(ErrorKind::empty_result, "histogram of an empty sample");
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it, hi = *hi_it;
  Histogram h;
  h.skewness = xs.size() >= 3 ? skewness(xs) : 0.0;
  if (!(hi > lo)) {
    h.edges = {lo - 0.5, lo + 0.5};
    h.density = {1.0};
    return h;
  }
  const auto nb = static_cast<std::size_t>(bins);
  const double width = (hi - lo) / static_cast<double>(nb);
  h.edges.resize(nb + 1);
  for (std::size_t k = 0; k <= nb; ++k) h.edges[k] = lo + width * static_cast<double>(k);
  h.edges.back() = hi;
  std::vector<double> counts(nb, 0.0);
  for (double x : xs) {
    auto k = static_cast<std::size_t>((x - lo) / width);
    counts[std::min(k, nb - 1)] += 1.0;
  }
  h.density.resize(nb);
  const double n = static_cast<double>(xs.size());
  for (std::size_t k = 0; k < nb; ++k) h.density[k] = counts[k] / (n * (h.edges[k + 1] - h.edges[k]));
  return h;
}

inline Histogram histogram(const McSamples& samples, Estimand e, std::int64_t bins) {
  return histogram(samples.values(e), bins);
}

// ---------------------------------------------------------------------------
// Reference designs of the summary tables.

struct TableRow {
  McDesign design;
  double mean = 0.0, var = 0.0, median = 0.0;
  double rho = std::numeric_limits<double>::quiet_NaN();  // not reported for R0
};

struct SummaryTable {
  int number = 0;
  Estimand estimand = Estimand::a;
  std::vector<TableRow> rows;
};

/// Tables 3, 4 and 5: summaries of a_hat, c_hat and R0_hat respectively, all
/// with N1(0) = 3,000,000 and c = 0.07. `reps` and `seed` are left at their
/// defaults for the caller to override.
inline SummaryTable summary_table(int number) {
  auto row = [](Count n2, std::int64_t T, double a, double m, double v, double med, double rho) {
    McDesign d;
    d.n2_0 = n2;
    d.T = T;
    d.a = a;
    return TableRow{d, m, v, med, rho};
  };
  const double na = std::numeric_limits<double>::quiet_NaN();
  switch (number) {
    case 3:
      return {3, Estimand::a,
              {row(5, 20, 0.035, 0.03115, 0.00045922, 0.03044, -0.112),
               row(5, 20, 0.140, 0.13119, 0.00099481, 0.13539, -0.246),
               row(5, 40, 0.105, 0.09677, 0.00051789, 0.10100, -0.380),
               row(5, 40, 0.140, 0.13326, 0.00044708, 0.13732, -0.489),
               row(100, 20, 0.140, 0.13969, 0.00003447, 0.13973, -0.005),
               row(100, 40, 0.070, 0.06963, 0.00001785, 0.06977, 0.006),
               row(200, 20, 0.070, 0.06982, 0.00001722, 0.06986, -0.027),
               row(200, 40, 0.070, 0.06982, 0.00000899, 0.06990, -0.009),
               row(300, 20, 0.070, 0.06994, 0.00001169, 0.07000, -0.008),
               row(300, 40, 0.035, 0.03492, 0.00000545, 0.03496, 0.000)}};
    case 4:
      return {4, Estimand::c,
              {row(50, 40, 0.035, 0.07091, 0.00006506, 0.07034, -0.004),
               row(100, 40, 0.070, 0.07034, 0.00001723, 0.07015, 0.006),
               row(100, 40, 0.105, 0.07019, 0.00000806, 0.07008, -0.007),
               row(200, 20, 0.105, 0.07010, 0.00001175, 0.07000, -0.007),
               row(200, 20, 0.140, 0.07007, 0.00000809, 0.07004, -0.007),
               row(300, 20, 0.035, 0.07012, 0.00001469, 0.07008, -0.004),
               row(500, 20, 0.035, 0.07005, 0.00000902, 0.07002, -0.003),
               row(500, 20, 0.105, 0.07005, 0.00000461, 0.07000, 0.008),
               row(500, 40, 0.035, 0.07010, 0.00000609, 0.07002, 0.012),
               row(1000, 20, 0.035, 0.07006, 0.00000433, 0.07004, 0.006)}};
    case 5:
      return {5, Estimand::r0,
              {row(5, 40, 0.035, 0.43255, 0.08842763, 0.42888, na),
               row(50, 20, 0.035, 0.49951, 0.01497913, 0.49202, na),
               row(50, 20, 0.140, 1.99277, 0.04051883, 1.98941, na),
               row(100, 20, 0.070, 0.99856, 0.01403924, 0.99422, na),
               row(100, 40, 0.070, 0.99327, 0.00689571, 0.99369, na),
               row(200, 20, 0.105, 1.49857, 0.00917040, 1.49868, na),
               row(300, 40, 0.035, 0.49858, 0.00160204, 0.49925, na),
               row(500, 40, 0.035, 0.49956, 0.00096347, 0.49970, na),
               row(500, 40, 0.070, 0.99871, 0.00137583, 0.99869, na),
               row(1000, 20, 0.070, 0.99950, 0.00137986, 0.99882, na)}};
    default: fail(ErrorKind::invalid_argument, "summary tables are numbered 3, 4 and 5");
  }
}

// ---------------------------------------------------------------------------
// Estimator comparison on shared paths.

struct ComparisonConfig {
  std::int64_t window = 7;  // EpiEstim tau
  RPrior prior{};
  std::int64_t profile_length = 0;  // 0: use the path length
  double lognormal_mean = 4.5;
  double lognormal_sd = 2.5;
  std::vector<std::int64_t> ar_orders{7, 14, 21};
};

struct NamedSeries {
  std::string name;
  std::vector<double> values;  // NaN where the estimator is flagged or undefined
};

struct ComparisonSeries {
  std::vector<std::int64_t> t;  // 1..T
  std::vector<NamedSeries> series;

  const NamedSeries& get(std::string_view name) const {
    for (const auto& s : series) {
      if (s.name == name) return s;
    }
    fail(ErrorKind::invalid_argument, "no series named '" + std::string(name) + "'");
  }
};

/// All estimator series for one path: expanding binomial and Poisson R0
/// fits, EpiEstim posterior means with the matched geometric and the
/// lognormal profiles, and AR sums on the incidence observed up to day t.
inline ComparisonSeries compare_on_path(const CountPath& path, double c, const ComparisonConfig& cfg) {
  const std::int64_t T = path.days();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ComparisonSeries out;
  for (std::int64_t t = 1; t <= T; ++t) out.t.push_back(t);
  const auto size = static_cast<std::size_t>(T);

  for (Method m : {Method::binomial_ml, Method::poisson_aml}) {
    NamedSeries s{std::string(to_string(m)), std::vector<double>(size, nan)};
    const auto fits = rolling_fit(path, m, RollingMode::expanding());
    for (std::size_t k = 0; k < fits.size(); ++k) {
      if (!McSamples::flagged(fits[k])) s.values[k] = fits[k].r0_hat;
    }
    out.series.push_back(std::move(s));
  }

  const auto incidence = incidence_series(path);
  const std::int64_t S = cfg.profile_length > 0 ? cfg.profile_length : std::max<std::int64_t>(T, 1);
  const InfectivityProfile profiles[] = {
      geometric_profile(c, S),
      discretize_interval(ProfileFamily::lognormal, cfg.lognormal_mean, cfg.lognormal_sd, S)};
  for (const auto& profile : profiles) {
    NamedSeries s{"epiestim-" + std::string(to_string(profile.family)), std::vector<double>(size, nan)};
    const auto est = instantaneous_r(incidence, profile, cfg.window, cfg.prior);
    for (std::size_t k = 0; k < est.size(); ++k) s.values[k] = est[k].posterior_mean;
    out.series.push_back(std::move(s));
  }

  for (std::int64_t H : cfg.ar_orders) {
    NamedSeries s{"ar-" + std::to_string(H), std::vector<double>(size, nan)};
    for (std::int64_t t = 2 * H; t <= T; ++t) {
      try {
        s.values[static_cast<std::size_t>(t - 1)] =
            ar_estimate(std::span<const double>(incidence).first(static_cast<std::size_t>(t + 1)), H).r_ar;
      } catch (const Error&) {
      }
    }
    out.series.push_back(std::move(s));
  }
  return out;
}

/// One ComparisonSeries per replication of `design`, over design.T days.
inline std::vector<ComparisonSeries> comparison_series(const McDesign& design, const ComparisonConfig& cfg) {
  design.validate();
  std::vector<ComparisonSeries> out(static_cast<std::size_t>(design.reps));
  parallel_for(out.size(), design.threads, [&](std::size_t r) {
    out[r] = compare_on_path(replicate_path(design, static_cast<std::int64_t>(r)), design.c, cfg);
  });
  return out;
}

}  // namespace sirstat
