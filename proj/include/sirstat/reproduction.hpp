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

// Reproduction ratios of the chain-binomial SIR model.
//
// Someone infected at t stays infectious for a geometric number of days
// (P[D >= x] = (1 - c)^(x - 1)) and on each of those days infects every
// susceptible with probability a/n. Summing over days gives
//
//   effective  R*_t = (a/n)     sum_{x=0}^{H-1} E_t[N1(t+x)] (1 - c)^x
//   basic      R_t  = (a/N1(t)) sum_{x=0}^{H-1} E_t[N1(t+x)] (1 - c)^x
//
// where the expectation is estimated by S forward simulations from the
// current state. At the start of an outbreak both are close to a/c.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sirstat/error.hpp"
#include "sirstat/numerics.hpp"
#include "sirstat/parallel.hpp"
#include "sirstat/rng.hpp"
#include "sirstat/sir.hpp"

namespace sirstat {

inline double initial_r0(const ModelParams& params) {
  params.validate();
  return params.a / params.c;
}

/// P[D >= x] for the geometric infectious duration.
inline double geometric_survival(double c, std::int64_t x) {
  require(x >= 1, ErrorKind::invalid_argument, "geometric_survival needs x >= 1");
  return std::pow(1.0 - c, static_cast<double>(x - 1));
}

struct RzeroConfig {
  std::int64_t horizon = 100;      // H
  std::int64_t replications = 100;  // S
  RngStream rng{};
  unsigned threads = 1;

  void validate() const {
    require(horizon >= 1, ErrorKind::invalid_argument, "horizon H must be >= 1");
    require(replications >= 1, ErrorKind::invalid_argument, "replications S must be >= 1");
  }
};

/// S forward trajectories of N1(t+x), x = 0..H-1; row s is replication s
/// and uses the substream s of the configured stream.
inline std::vector<std::vector<Count>> forward_susceptibles(const EpidemicState& state, const ModelParams& params,
                                                           const RzeroConfig& cfg) {
  cfg.validate();
  params.validate();
  validate_state(state, params.n);
  std::vector<std::vector<Count>> out(static_cast<std::size_t>(cfg.replications));
  parallel_for(out.size(), cfg.threads, [&](std::size_t s) {
    auto engine = cfg.rng.substream(static_cast<std::uint64_t>(s)).engine();
    auto& row = out[s];
    row.reserve(static_cast<std::size_t>(cfg.horizon));
    EpidemicState cur = state;
    row.push_back(cur.n1);
    for (std::int64_t x = 1; x < cfg.horizon; ++x) {
      cur = detail::step_with(cur, params, engine).first;
      row.push_back(cur.n1);
    }
  });
  return out;
}

/// sum_{x=0}^{H-1} n1[x] (1 - c)^x for one (expected or simulated) path.
inline double discounted_susceptibles(std::span<const double> n1, double c) {
  double total = 0.0, w = 1.0;
  for (double v : n1) {
    total += v * w;
    w *= 1.0 - c;
  }
  return total;
}

struct RzeroValue {
  double effective = 0.0;
  double basic = std::numeric_limits<double>::quiet_NaN();
  double se_effective = 0.0;  // Monte-Carlo standard errors
  double se_basic = std::numeric_limits<double>::quiet_NaN();
  bool basic_defined = false;  // false when N1(t) = 0
};

/// Both ratios for one state, from the same S forward simulations.
inline RzeroValue reproduction_ratios(const EpidemicState& state, const ModelParams& params, const RzeroConfig& cfg) {
  const auto paths = forward_susceptibles(state, params, cfg);
  std::vector<double> sums(paths.size());
  std::vector<double> row;
  for (std::size_t s = 0; s < paths.size(); ++s) {
    row.assign(paths[s].begin(), paths[s].end());
    sums[s] = discounted_susceptibles(row, params.c);
  }
  const double m = mean(sums);
  const double se = sums.size() > 1 ? std::sqrt(variance(sums) / static_cast<double>(sums.size())) : 0.0;
  RzeroValue v;
  const double n = static_cast<double>(params.n);
  v.effective = params.a / n * m;
  v.se_effective = params.a / n * se;
  if (state.n1 > 0) {
    const double n1 = static_cast<double>(state.n1);
    v.basic = params.a / n1 * m;
    v.se_basic = params.a / n1 * se;
    v.basic_defined = true;
  }
  return v;
}

inline double effective_r0(const EpidemicState& state, const ModelParams& params, const RzeroConfig& cfg) {
  return reproduction_ratios(state, params, cfg).effective;
}

/// NaN when N1(t) = 0; see RzeroValue::basic_defined.
inline double basic_r0(const EpidemicState& state, const ModelParams& params, const RzeroConfig& cfg) {
  return reproduction_ratios(state, params, cfg).basic;
}

struct RzeroSeries {
  std::vector<std::int64_t> t;
  std::vector<RzeroValue> values;
  RzeroConfig config;
};

/// Ratios for every state of a path. Day k re-simulates forward on the
/// substream k of the configured stream; days run in parallel.
inline RzeroSeries rzero_path(const CountPath& path, const ModelParams& params, const RzeroConfig& cfg) {
  validate_path(path);
  require(path.population() == params.n, ErrorKind::invalid_argument, "path population differs from params.n");
  cfg.validate();
  RzeroSeries out;
  out.config = cfg;
  out.values.resize(path.states.size());
  for (const auto& s : path.states) out.t.push_back(s.t);
  parallel_for(path.states.size(), cfg.threads, [&](std::size_t k) {
    RzeroConfig day = cfg;
    day.rng = cfg.rng.substream(static_cast<std::uint64_t>(k));
    day.threads = 1;
    out.values[k] = reproduction_ratios(path.states[k], params, day);
  });
  return out;
}

}  // namespace sirstat
