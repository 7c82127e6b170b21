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

// Discrete-time stochastic SIR model: exact chain-binomial simulation of the
// aggregate counts, an individual-level simulator for cross-checks, and the
// lossless conversions between marginal and transition counts.
//
// States are numbered 1 = susceptible, 2 = infected/infectious, 3 = recovered.
// Over day t, N12(t) ~ Binomial(N1(t-1), a N2(t-1)/n) new infections and
// N23(t) ~ Binomial(N2(t-1), c) new recoveries are drawn independently.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/random/binomial_distribution.hpp>

#include "sirstat/error.hpp"
#include "sirstat/rng.hpp"

namespace sirstat {

using Count = std::int64_t;

struct ModelParams {
  double a = 0.1;   // contagion rate per day
  double c = 0.07;  // daily recovery probability
  Count n = 3'000'000;

  ModelParams() = default;
  ModelParams(double a_, double c_, Count n_) : a(a_), c(c_), n(n_) { validate(); }

  void validate() const {
    require(a > 0.0, ErrorKind::invalid_argument, "contagion rate a must be > 0");
    require(c > 0.0 && c < 1.0, ErrorKind::invalid_argument, "recovery probability c must lie in (0, 1)");
    require(n >= 1, ErrorKind::invalid_argument, "population size n must be >= 1");
  }
};

struct EpidemicState {
  std::int64_t t = 0;
  Count n1 = 0;
  Count n2 = 0;
  Count n3 = 0;

  Count total() const { return n1 + n2 + n3; }
  friend bool operator==(const EpidemicState&, const EpidemicState&) = default;
};

struct TransitionCounts {
  std::int64_t t = 0;
  Count n12 = 0;
  Count n23 = 0;

  friend bool operator==(const TransitionCounts&, const TransitionCounts&) = default;
};

/// Marginal counts for t = 0..T and the transitions for t = 1..T;
/// transitions[k] links states[k] to states[k + 1].
struct CountPath {
  std::vector<EpidemicState> states;
  std::vector<TransitionCounts> transitions;

  Count population() const { return states.empty() ? 0 : states.front().total(); }
  std::int64_t days() const { return static_cast<std::int64_t>(transitions.size()); }
  friend bool operator==(const CountPath&, const CountPath&) = default;
};

/// Marginal sequences only.
struct MarginalSeries {
  std::vector<Count> n1, n2, n3;
};

/// State at t=0 following the usual outbreak convention: N3(0) = 0 unless given.
inline EpidemicState initial_state(Count n, Count infected, Count recovered = 0) {
  require(infected >= 0 && recovered >= 0 && infected + recovered <= n, ErrorKind::invalid_argument,
          "initial counts must be nonnegative and not exceed n");
  return {0, n - infected - recovered, infected, recovered};
}

inline void validate_state(const EpidemicState& s, Count n) {
  if (s.n1 < 0 || s.n2 < 0 || s.n3 < 0 || s.total() != n) {
    fail(ErrorKind::inconsistent_counts, "state at t=" + std::to_string(s.t) + " is not a partition of n");
  }
}

inline double infection_probability(const ModelParams& params, Count n2_prev) {
  const double p = params.a * static_cast<double>(n2_prev) / static_cast<double>(params.n);
  if (p > 1.0) {
    fail(ErrorKind::invalid_probability, "infection probability a*N2/n = " + std::to_string(p) + " exceeds 1");
  }
  return p;
}

using TransitionMatrix = std::array<std::array<double, 3>, 3>;

inline TransitionMatrix transition_matrix(const ModelParams& params, Count n2_prev) {
  const double p12 = infection_probability(params, n2_prev);
  return {{{1.0 - p12, p12, 0.0}, {0.0, 1.0 - params.c, params.c}, {0.0, 0.0, 1.0}}};
}

/// Exact binomial variate: inversion for small means, BTRD otherwise.
template <typename Engine>
Count draw_binomial(Count trials, double p, Engine& engine) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  boost::random::binomial_distribution<Count, double> dist(trials, p);
  return dist(engine);
}

namespace detail {
template <typename Engine>
std::pair<EpidemicState, TransitionCounts> step_with(const EpidemicState& state, const ModelParams& params,
                                                     Engine& engine) {
  const double p12 = infection_probability(params, state.n2);
  const Count n12 = draw_binomial(state.n1, p12, engine);
  const Count n23 = draw_binomial(state.n2, params.c, engine);
  EpidemicState next{state.t + 1, state.n1 - n12, state.n2 + n12 - n23, state.n3 + n23};
  return {next, TransitionCounts{next.t, n12, n23}};
}
}  // namespace detail

/// One day of the chain binomial. The engine is derived from the stream, so a
/// fixed (seed, stream) always produces the same day.
inline std::pair<EpidemicState, TransitionCounts> step(const EpidemicState& state, const ModelParams& params,
                                                       const RngStream& rng) {
  params.validate();
  validate_state(state, params.n);
  auto engine = rng.engine();
  return detail::step_with(state, params, engine);
}

template <typename Engine>
CountPath simulate_with(const ModelParams& params, const EpidemicState& init, std::int64_t days, Engine& engine) {
  require(days >= 1, ErrorKind::invalid_argument, "simulation horizon T must be >= 1");
  params.validate();
  validate_state(init, params.n);
  CountPath path;
  path.states.reserve(static_cast<std::size_t>(days) + 1);
  path.transitions.reserve(static_cast<std::size_t>(days));
  path.states.push_back(init);
  for (std::int64_t k = 0; k < days; ++k) {
    auto [next, tr] = detail::step_with(path.states.back(), params, engine);
    path.states.push_back(next);
    path.transitions.push_back(tr);
  }
  return path;
}

inline CountPath simulate(const ModelParams& params, const EpidemicState& init, std::int64_t days,
                          const RngStream& rng) {
  auto engine = rng.engine();
  return simulate_with(params, init, days, engine);
}

/// Checks conservation, nonnegativity and the day-to-day identities.
inline void validate_path(const CountPath& path) {
  require(!path.states.empty(), ErrorKind::inconsistent_counts, "path has no states");
  require(path.states.size() == path.transitions.size() + 1, ErrorKind::inconsistent_counts,
          "path needs exactly one more state than transitions");
  const Count n = path.population();
  for (const auto& s : path.states) validate_state(s, n);
  for (std::size_t k = 0; k < path.transitions.size(); ++k) {
    const auto& prev = path.states[k];
    const auto& cur = path.states[k + 1];
    const auto& tr = path.transitions[k];
    const bool ok = tr.n12 >= 0 && tr.n23 >= 0 && tr.n12 <= prev.n1 && tr.n23 <= prev.n2 &&
                    cur.n1 == prev.n1 - tr.n12 && cur.n2 == prev.n2 + tr.n12 - tr.n23 &&
                    cur.n3 == prev.n3 + tr.n23 && cur.t == prev.t + 1 && tr.t == cur.t;
    if (!ok) fail(ErrorKind::inconsistent_counts, "transition at t=" + std::to_string(cur.t) + " breaks the count identities");
  }
}

inline MarginalSeries marginals_of(const CountPath& path) {
  MarginalSeries m;
  for (const auto& s : path.states) {
    m.n1.push_back(s.n1);
    m.n2.push_back(s.n2);
    m.n3.push_back(s.n3);
  }
  return m;
}

/// N12(t) = -dN1(t), N23(t) = dN3(t); requires N1 non-increasing, N3
/// non-decreasing and a constant total.
inline std::vector<TransitionCounts> transitions_from_marginals(const MarginalSeries& m) {
  require(m.n1.size() == m.n2.size() && m.n2.size() == m.n3.size() && !m.n1.empty(), ErrorKind::inconsistent_counts,
          "marginal series must be nonempty and of equal length");
  const Count n = m.n1[0] + m.n2[0] + m.n3[0];
  std::vector<TransitionCounts> out;
  out.reserve(m.n1.size() - 1);
  for (std::size_t t = 0; t < m.n1.size(); ++t) {
    if (m.n1[t] < 0 || m.n2[t] < 0 || m.n3[t] < 0 || m.n1[t] + m.n2[t] + m.n3[t] != n) {
      fail(ErrorKind::inconsistent_counts, "marginals at t=" + std::to_string(t) + " do not sum to n");
    }
    if (t == 0) continue;
    const Count n12 = m.n1[t - 1] - m.n1[t];
    const Count n23 = m.n3[t] - m.n3[t - 1];
    if (n12 < 0 || n23 < 0 || n23 > m.n2[t - 1]) {
      fail(ErrorKind::inconsistent_counts, "marginals at t=" + std::to_string(t) + " violate SIR monotonicity");
    }
    out.push_back({static_cast<std::int64_t>(t), n12, n23});
  }
  return out;
}

inline MarginalSeries marginals_from_transitions(const EpidemicState& init, const std::vector<TransitionCounts>& trs) {
  require(init.n1 >= 0 && init.n2 >= 0 && init.n3 >= 0, ErrorKind::inconsistent_counts, "negative initial count");
  MarginalSeries m;
  m.n1.push_back(init.n1);
  m.n2.push_back(init.n2);
  m.n3.push_back(init.n3);
  for (const auto& tr : trs) {
    const Count n1 = m.n1.back(), n2 = m.n2.back();
    if (tr.n12 < 0 || tr.n23 < 0 || tr.n12 > n1 || tr.n23 > n2) {
      fail(ErrorKind::inconsistent_counts, "transition at t=" + std::to_string(tr.t) + " exceeds available counts");
    }
    m.n1.push_back(n1 - tr.n12);
    m.n2.push_back(n2 + tr.n12 - tr.n23);
    m.n3.push_back(m.n3.back() + tr.n23);
  }
  return m;
}

/// Rebuilds a CountPath from marginal counts (t = 0..T).
inline CountPath path_from_marginals(const MarginalSeries& m) {
  CountPath path;
  path.transitions = transitions_from_marginals(m);
  for (std::size_t t = 0; t < m.n1.size(); ++t) {
    path.states.push_back({static_cast<std::int64_t>(t), m.n1[t], m.n2[t], m.n3[t]});
  }
  return path;
}

// ---------------------------------------------------------------------------
// Individual-level simulation.

enum class Health : std::uint8_t { susceptible = 1, infected = 2, recovered = 3 };

inline constexpr Count max_individuals = 100'000;

/// histories[t][i] is the state of individual i on day t.
struct IndividualHistories {
  std::vector<std::vector<Health>> histories;

  CountPath aggregate() const {
    MarginalSeries m;
    for (const auto& day : histories) {
      Count c1 = 0, c2 = 0, c3 = 0;
      for (Health h : day) {
        c1 += h == Health::susceptible;
        c2 += h == Health::infected;
        c3 += h == Health::recovered;
      }
      m.n1.push_back(c1);
      m.n2.push_back(c2);
      m.n3.push_back(c3);
    }
    return path_from_marginals(m);
  }
};

/// Every susceptible flips with probability a N2(t-1)/n and every infected
/// recovers with probability c, all independently given the previous day.
/// Individuals are laid out as [susceptible..., infected..., recovered...].
inline IndividualHistories simulate_individuals(const ModelParams& params, const EpidemicState& init,
                                                std::int64_t days, const RngStream& rng) {
  params.validate();
  validate_state(init, params.n);
  require(days >= 1, ErrorKind::invalid_argument, "simulation horizon T must be >= 1");
  if (params.n > max_individuals) fail(ErrorKind::size_limit, "individual simulation is limited to n <= 100000");
  auto engine = rng.engine();

  std::vector<Health> today(static_cast<std::size_t>(params.n), Health::recovered);
  std::fill_n(today.begin(), init.n1, Health::susceptible);
  std::fill_n(today.begin() + init.n1, init.n2, Health::infected);

  IndividualHistories out;
  out.histories.reserve(static_cast<std::size_t>(days) + 1);
  out.histories.push_back(today);
  Count infected = init.n2;
  for (std::int64_t t = 1; t <= days; ++t) {
    const double p12 = infection_probability(params, infected);
    Count next_infected = 0;
    for (Health& h : today) {
      if (h == Health::susceptible) {
        if (engine.uniform() < p12) h = Health::infected;
        else continue;
        ++next_infected;
      } else if (h == Health::infected) {
        if (engine.uniform() < params.c) h = Health::recovered;
        else ++next_infected;
      }
    }
    infected = next_infected;
    out.histories.push_back(today);
  }
  return out;
}

}  // namespace sirstat
