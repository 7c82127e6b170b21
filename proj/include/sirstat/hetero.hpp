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

// Two-population SIR. A susceptible of group j is infected with probability
// sum_k a_jk N2^k(t-1) / n^k and an infected of group j recovers with
// probability c_j. Under the rank-one form a_jk = beta_j alpha_k, beta is the
// vulnerability and alpha the infectiveness of each group.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "sirstat/error.hpp"
#include "sirstat/rng.hpp"
#include "sirstat/sir.hpp"

namespace sirstat {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<Vec2, 2>;

struct HeteroParams {
  Mat2 A{};  // A[j][k]: contagion of group j by infected of group k
  Vec2 c{0.07, 0.07};
  std::array<Count, 2> n{0, 0};

  static HeteroParams rank_one(const Vec2& beta, const Vec2& alpha, const Vec2& c, const std::array<Count, 2>& n) {
    HeteroParams p;
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) p.A[j][k] = beta[j] * alpha[k];
    }
    p.c = c;
    p.n = n;
    p.validate();
    return p;
  }

  Count total() const { return n[0] + n[1]; }

  void validate() const {
    for (const auto& row : A) {
      for (double v : row) require(v >= 0.0 && std::isfinite(v), ErrorKind::invalid_argument, "contagion entries must be >= 0");
    }
    for (double cj : c) require(cj > 0.0 && cj < 1.0, ErrorKind::invalid_argument, "recovery probabilities must lie in (0, 1)");
    require(n[0] >= 0 && n[1] >= 0 && total() >= 1, ErrorKind::invalid_argument, "group sizes must be >= 0 with a positive total");
  }
};

struct HeteroState {
  std::array<EpidemicState, 2> groups{};

  Count susceptible() const { return groups[0].n1 + groups[1].n1; }
  Count infected() const { return groups[0].n2 + groups[1].n2; }
};

/// Group-j infection probability given the infected counts of both groups.
inline double group_infection_probability(const HeteroParams& params, int j, const std::array<Count, 2>& infected) {
  double p = 0.0;
  for (int k = 0; k < 2; ++k) {
    if (params.n[k] > 0) p += params.A[j][k] * static_cast<double>(infected[k]) / static_cast<double>(params.n[k]);
  }
  if (p > 1.0) {
    fail(ErrorKind::invalid_probability, "group " + std::to_string(j + 1) + " infection probability " +
                                             std::to_string(p) + " exceeds 1");
  }
  return p;
}

/// One CountPath per group; the groups share one engine and are drawn in
/// order (group 1 infections, recoveries, then group 2).
inline std::array<CountPath, 2> simulate_sir2(const HeteroParams& params, const HeteroState& init, std::int64_t T,
                                              const RngStream& rng) {
  params.validate();
  require(T >= 1, ErrorKind::invalid_argument, "simulation horizon T must be >= 1");
  for (int j = 0; j < 2; ++j) validate_state(init.groups[j], params.n[j]);
  auto engine = rng.engine();
  std::array<CountPath, 2> out;
  for (int j = 0; j < 2; ++j) out[j].states.push_back(init.groups[j]);
  for (std::int64_t t = 1; t <= T; ++t) {
    const std::array<Count, 2> infected{out[0].states.back().n2, out[1].states.back().n2};
    for (int j = 0; j < 2; ++j) {
      const EpidemicState& prev = out[j].states.back();
      const Count n12 = draw_binomial(prev.n1, group_infection_probability(params, j, infected), engine);
      const Count n23 = draw_binomial(prev.n2, params.c[j], engine);
      const EpidemicState next{prev.t + 1, prev.n1 - n12, prev.n2 + n12 - n23, prev.n3 + n23};
      out[j].states.push_back(next);
      out[j].transitions.push_back({next.t, n12, n23});
    }
  }
  return out;
}

/// Pooled counts of the two groups.
inline CountPath aggregate(const std::array<CountPath, 2>& groups) {
  require(groups[0].states.size() == groups[1].states.size(), ErrorKind::inconsistent_counts,
          "group paths differ in length");
  CountPath out;
  for (std::size_t k = 0; k < groups[0].states.size(); ++k) {
    const auto& a = groups[0].states[k];
    const auto& b = groups[1].states[k];
    out.states.push_back({a.t, a.n1 + b.n1, a.n2 + b.n2, a.n3 + b.n3});
  }
  for (std::size_t k = 0; k < groups[0].transitions.size(); ++k) {
    const auto& a = groups[0].transitions[k];
    const auto& b = groups[1].transitions[k];
    out.transitions.push_back({a.t, a.n12 + b.n12, a.n23 + b.n23});
  }
  return out;
}

/// R[j][k] = beta_j alpha_k / c_k.
inline Mat2 matrix_r0(const Vec2& beta, const Vec2& alpha, const Vec2& c) {
  for (double cj : c) require(cj > 0.0 && cj < 1.0, ErrorKind::invalid_argument, "recovery probabilities must lie in (0, 1)");
  Mat2 r{};
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) r[j][k] = beta[j] * alpha[k] / c[k];
  }
  return r;
}

/// Contagion rate a_t making the pooled one-step infection probability equal
/// a_t N2(t-1) / N:
///   a_t = [sum_j beta_j N1^j / N1] [sum_k alpha_k N2^k / n^k] N / N2.
/// NaN when N1 = 0 or N2 = 0.
inline double implied_a_t(const HeteroState& state, const Vec2& beta, const Vec2& alpha, const std::array<Count, 2>& n) {
  const Count n1 = state.susceptible();
  const Count n2 = state.infected();
  if (n1 == 0 || n2 == 0) return std::numeric_limits<double>::quiet_NaN();
  double vulnerability = 0.0, infectiousness = 0.0;
  for (int j = 0; j < 2; ++j) {
    vulnerability += beta[j] * static_cast<double>(state.groups[j].n1) / static_cast<double>(n1);
    if (n[j] > 0) infectiousness += alpha[j] * static_cast<double>(state.groups[j].n2) / static_cast<double>(n[j]);
  }
  const double total = static_cast<double>(n[0] + n[1]);
  return vulnerability * infectiousness * total / static_cast<double>(n2);
}

}  // namespace sirstat
