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

// Infinite-population limit of the chain binomial, day step fixed at one.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "sirstat/error.hpp"
#include "sirstat/numerics.hpp"
#include "sirstat/sir.hpp"

namespace sirstat {

struct MechanisticState {
  double x = 1.0;  // susceptible fraction
  double y = 0.0;  // infected fraction
  double z = 0.0;  // recovered fraction
};

inline MechanisticState deterministic_step(const MechanisticState& s, const ModelParams& params) {
  if (params.a * s.y > 1.0) fail(ErrorKind::invalid_probability, "a*y exceeds 1 in the mechanistic step");
  const double infections = params.a * s.x * s.y;
  const double recoveries = params.c * s.y;
  return {s.x - infections, s.y + infections - recoveries, s.z + recoveries};
}

/// States for t = 0..T.
inline std::vector<MechanisticState> trajectory(const ModelParams& params, const MechanisticState& init,
                                                std::int64_t T) {
  require(T >= 0, ErrorKind::invalid_argument, "trajectory length must be >= 0");
  require(init.x >= 0 && init.y >= 0 && init.z >= 0 && std::abs(init.x + init.y + init.z - 1.0) < 1e-12,
          ErrorKind::invalid_argument, "mechanistic state must be a probability vector");
  std::vector<MechanisticState> out;
  out.reserve(static_cast<std::size_t>(T) + 1);
  out.push_back(init);
  for (std::int64_t t = 1; t <= T; ++t) out.push_back(deterministic_step(out.back(), params));
  return out;
}

/// Limit x(inf) of the susceptible fraction: the root in (0, x0] of
///   x - x0 - y0 - (c/a) log(x / x0) = 0.
/// The function is convex with its minimum at c/a, so the relevant root lies
/// below min(c/a, x0); when y0 = 0 and x0 <= c/a the outbreak never starts.
inline double final_size(const ModelParams& params, double x0, double y0) {
  require(params.a > 0.0, ErrorKind::invalid_argument, "final_size needs a > 0");
  require(x0 > 0.0 && x0 <= 1.0 && y0 >= 0.0, ErrorKind::invalid_argument, "final_size needs 0 < x0 <= 1, y0 >= 0");
  const double ratio = params.c / params.a;
  auto f = [&](double x) { return x - x0 - y0 - ratio * std::log(x / x0); };
  const double hi = std::min(ratio, x0);
  if (y0 == 0.0 && x0 <= ratio) return x0;
  if (f(hi) == 0.0) return hi;
  return bisect(f, 1e-15, hi, 1e-12).x;
}

/// Next incidence p*12(t) from the incidence history h(0..t-1), with h(0)
/// the initially infected fraction:
///   a (1 - sum_s h(t-s)) sum_{s=1}^{t} (1 - c)^(s-1) h(t-s).
inline double mechanistic_infections(const ModelParams& params, std::span<const double> history) {
  require(!history.empty(), ErrorKind::invalid_argument, "incidence history must be nonempty");
  double cumulative = 0.0, infectious = 0.0, w = 1.0;
  for (std::size_t s = 1; s <= history.size(); ++s) {
    const double h = history[history.size() - s];
    require(h >= 0.0, ErrorKind::invalid_argument, "incidence history must be nonnegative");
    cumulative += h;
    infectious += w * h;
    w *= 1.0 - params.c;
  }
  if (cumulative > 1.0 + 1e-12) fail(ErrorKind::invalid_probability, "cumulative incidence exceeds 1");
  return params.a * (1.0 - cumulative) * infectious;
}

/// R00 sum_{s>=1} c (1 - c)^(s-1) h(t-s).
inline double linearized_renewal(double r00, double c, std::span<const double> history) {
  require(!history.empty(), ErrorKind::invalid_argument, "incidence history must be nonempty");
  double total = 0.0, w = c;
  for (std::size_t s = 1; s <= history.size(); ++s) {
    total += w * history[history.size() - s];
    w *= 1.0 - c;
  }
  return r00 * total;
}

/// Day-over-day growth factor of incidence under the linearized renewal.
/// Only this combination of R00 and c is identified from incidence alone.
inline double explosion_rate(double r00, double c) { return 1.0 + c * (r00 - 1.0); }

/// Iterates the linearized renewal from h(0) = seed for T further days.
inline std::vector<double> renewal_trajectory(double r00, double c, double seed, std::int64_t T) {
  std::vector<double> h{seed};
  h.reserve(static_cast<std::size_t>(T) + 1);
  for (std::int64_t t = 1; t <= T; ++t) h.push_back(linearized_renewal(r00, c, h));
  return h;
}

}  // namespace sirstat
