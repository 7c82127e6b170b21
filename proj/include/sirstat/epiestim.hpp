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

// Renewal-equation estimators computed from new-infection counts only:
// the instantaneous reproduction number (raw ratio and the gamma-posterior
// smoother over a trailing window), a reproduction ratio written in terms of
// an arbitrary infectious-duration survival function, and the OLS
// autoregression of incidence on its own lags.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>

#include "sirstat/error.hpp"
#include "sirstat/numerics.hpp"
#include "sirstat/reproduction.hpp"
#include "sirstat/sir.hpp"

namespace sirstat {

enum class ProfileFamily { geometric, lognormal, gamma, explicit_weights };

inline std::string_view to_string(ProfileFamily f) {
  switch (f) {
    case ProfileFamily::geometric: return "geometric";
    case ProfileFamily::lognormal: return "lognormal";
    case ProfileFamily::gamma: return "gamma";
    case ProfileFamily::explicit_weights: return "explicit";
  }
  return "unknown";
}

/// weights[s - 1] = w(s), s = 1..S; nonnegative and summing to one.
struct InfectivityProfile {
  std::vector<double> weights;
  ProfileFamily family = ProfileFamily::explicit_weights;

  std::size_t size() const { return weights.size(); }
  double w(std::size_t s) const { return s >= 1 && s <= weights.size() ? weights[s - 1] : 0.0; }
  double mean() const {
    double m = 0.0;
    for (std::size_t s = 1; s <= weights.size(); ++s) m += static_cast<double>(s) * weights[s - 1];
    return m;
  }
};

namespace detail {
inline void normalize(std::vector<double>& w) {
  double total = 0.0;
  for (double v : w) {
    require(v >= 0.0 && std::isfinite(v), ErrorKind::invalid_argument, "profile weights must be finite and >= 0");
    total += v;
  }
  if (!(total > 0.0)) fail(ErrorKind::invalid_argument, "profile has no mass on days 1..S");
  for (double& v : w) v /= total;
}
}  // namespace detail

inline InfectivityProfile explicit_profile(std::vector<double> weights) {
  require(!weights.empty(), ErrorKind::invalid_argument, "profile needs at least one weight");
  detail::normalize(weights);
  return {std::move(weights), ProfileFamily::explicit_weights};
}

/// w(s) proportional to c (1 - c)^(s-1) on s = 1..S.
inline InfectivityProfile geometric_profile(double c, std::int64_t S) {
  require(S >= 1, ErrorKind::invalid_argument, "profile length S must be >= 1");
  require(c > 0.0 && c <= 1.0, ErrorKind::invalid_argument, "geometric profile needs 0 < c <= 1");
  std::vector<double> w(static_cast<std::size_t>(S));
  double v = c;
  for (auto& x : w) {
    x = v;
    v *= 1.0 - c;
  }
  detail::normalize(w);
  return {std::move(w), ProfileFamily::geometric};
}

/// Discretizes a continuous serial-interval law with the given mean and sd:
/// w(s) = F(s + 1/2) - F(s - 1/2), the first cell starting at 0, then
/// renormalized over s = 1..S.
inline InfectivityProfile discretize_interval(ProfileFamily family, double mean, double sd, std::int64_t S) {
  require(S >= 1, ErrorKind::invalid_argument, "profile length S must be >= 1");
  require(mean > 0.0 && sd > 0.0 && std::isfinite(mean) && std::isfinite(sd), ErrorKind::invalid_argument,
          "serial interval needs mean > 0 and sd > 0");
  std::vector<double> w(static_cast<std::size_t>(S));
  auto fill = [&](const auto& dist) {
    double prev = 0.0;
    for (std::int64_t s = 1; s <= S; ++s) {
      const double next = boost::math::cdf(dist, static_cast<double>(s) + 0.5);
      w[static_cast<std::size_t>(s - 1)] = next - prev;
      prev = next;
    }
  };
  switch (family) {
    case ProfileFamily::lognormal: {
      const double sigma2 = std::log1p(sd * sd / (mean * mean));
      fill(boost::math::lognormal_distribution<double>(std::log(mean) - 0.5 * sigma2, std::sqrt(sigma2)));
      break;
    }
    case ProfileFamily::gamma: {
      const double shape = mean * mean / (sd * sd);
      const double scale = sd * sd / mean;
      if (!(shape > 0.0 && std::isfinite(shape) && scale > 0.0)) {
        fail(ErrorKind::invalid_argument, "gamma moment match is infeasible");
      }
      fill(boost::math::gamma_distribution<double>(shape, scale));
      break;
    }
    default: fail(ErrorKind::invalid_argument, "discretize_interval supports lognormal and gamma families");
  }
  detail::normalize(w);
  return {std::move(w), family};
}

/// Gamma prior (shape, rate) on the instantaneous reproduction number.
struct RPrior {
  double shape = 1.0;
  double rate = 0.2;

  void validate() const {
    require(shape > 0.0 && rate > 0.0, ErrorKind::invalid_argument, "R prior needs shape > 0 and rate > 0");
  }
};

namespace instant_flag {
inline constexpr unsigned raw_undefined = 1u << 0;        // Lambda(t) = 0
inline constexpr unsigned posterior_undefined = 1u << 1;  // zero posterior rate

inline std::string describe(unsigned flags) {
  std::string out;
  if (flags & raw_undefined) out = "raw-undefined";
  if (flags & posterior_undefined) out += out.empty() ? "posterior-undefined" : "|posterior-undefined";
  return out;
}
}  // namespace instant_flag

struct InstantEstimate {
  std::int64_t t = 0;
  double lambda = 0.0;  // total infectiousness sum_s w(s) I(t - s)
  double raw_ratio = std::numeric_limits<double>::quiet_NaN();
  double posterior_shape = 0.0;
  double posterior_rate = 0.0;
  double posterior_mean = std::numeric_limits<double>::quiet_NaN();
  unsigned flags = 0;
};

/// Day-0 cases are the initially infected, then N12(t) for t >= 1.
inline std::vector<double> incidence_series(const CountPath& path) {
  validate_path(path);
  std::vector<double> out;
  out.reserve(path.states.size());
  out.push_back(static_cast<double>(path.states.front().n2));
  for (const auto& tr : path.transitions) out.push_back(static_cast<double>(tr.n12));
  return out;
}

/// Estimates for t = 1..len-1. The posterior pools the trailing window
/// [t - tau + 1, t] (clipped at day 1): shape = prior shape + sum I,
/// rate = prior rate + sum Lambda.
inline std::vector<InstantEstimate> instantaneous_r(std::span<const double> incidence, const InfectivityProfile& profile,
                                                    std::int64_t window, const RPrior& prior) {
  require(window >= 1, ErrorKind::invalid_argument, "window tau must be >= 1");
  require(!profile.weights.empty(), ErrorKind::invalid_argument, "empty infectivity profile");
  prior.validate();
  for (double v : incidence) require(v >= 0.0, ErrorKind::invalid_argument, "incidence must be nonnegative");
  const std::size_t len = incidence.size();
  std::vector<double> lambda(len, 0.0);
  for (std::size_t t = 1; t < len; ++t) {
    double total = 0.0;
    for (std::size_t s = 1; s <= std::min(t, profile.size()); ++s) total += profile.w(s) * incidence[t - s];
    lambda[t] = total;
  }
  std::vector<InstantEstimate> out;
  for (std::size_t t = 1; t < len; ++t) {
    InstantEstimate e;
    e.t = static_cast<std::int64_t>(t);
    e.lambda = lambda[t];
    if (lambda[t] > 0.0) e.raw_ratio = incidence[t] / lambda[t];
    else e.flags |= instant_flag::raw_undefined;
    const std::size_t first = t + 1 > static_cast<std::size_t>(window) ? t + 1 - static_cast<std::size_t>(window) : 1;
    double cases = 0.0, exposure = 0.0;
    for (std::size_t k = first; k <= t; ++k) {
      cases += incidence[k];
      exposure += lambda[k];
    }
    e.posterior_shape = prior.shape + cases;
    e.posterior_rate = prior.rate + exposure;
    if (e.posterior_rate > 0.0) e.posterior_mean = e.posterior_shape / e.posterior_rate;
    else e.flags |= instant_flag::posterior_undefined;
    out.push_back(e);
  }
  return out;
}

/// Survival gamma(s) = P[D >= s] of an infectious duration, s = 1..S.
struct DurationModel {
  std::vector<double> survival;

  static DurationModel geometric(double c, std::int64_t S) {
    require(S >= 1, ErrorKind::invalid_argument, "duration support must be >= 1");
    DurationModel d;
    for (std::int64_t s = 1; s <= S; ++s) d.survival.push_back(std::pow(1.0 - c, static_cast<double>(s - 1)));
    return d;
  }
  static DurationModel fixed(std::int64_t L) {
    require(L >= 1, ErrorKind::invalid_argument, "fixed duration must be >= 1");
    return {std::vector<double>(static_cast<std::size_t>(L), 1.0)};
  }

  double gamma(std::int64_t s) const {
    return s >= 1 && s <= static_cast<std::int64_t>(survival.size()) ? survival[static_cast<std::size_t>(s - 1)] : 0.0;
  }
  double mean() const {
    double m = 0.0;
    for (double g : survival) m += g;
    return m;
  }
  /// E[(D - k)+] = sum_{s > k} gamma(s).
  double partial_expectation(std::int64_t k) const {
    double m = 0.0;
    for (std::int64_t s = k + 1; s <= static_cast<std::int64_t>(survival.size()); ++s) m += gamma(s);
    return m;
  }
  void validate() const {
    require(!survival.empty(), ErrorKind::invalid_argument, "empty duration model");
    for (std::size_t i = 0; i < survival.size(); ++i) {
      require(survival[i] >= 0.0 && survival[i] <= 1.0, ErrorKind::invalid_argument, "survival must lie in [0, 1]");
      if (i > 0) require(survival[i] <= survival[i - 1], ErrorKind::invalid_argument, "survival must be non-increasing");
    }
  }
};

struct RestrictedValue {
  double value = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  bool defined = false;  // false when N1(t) = 0
};

/// a sum_{s=1}^{H} gamma(s) - (a/N1(t)) sum_{k=1}^{H-1} E_t[N12(t+k)] sum_{s=k+1}^{H} gamma(s),
/// with the expectation taken over the same forward simulations as
/// reproduction_ratios(); for a geometric duration the two agree exactly.
inline RestrictedValue restricted_r0(const EpidemicState& state, const ModelParams& params,
                                     const DurationModel& duration, const RzeroConfig& cfg) {
  duration.validate();
  RestrictedValue out;
  if (state.n1 == 0) return out;
  const auto paths = forward_susceptibles(state, params, cfg);
  const std::int64_t H = cfg.horizon;
  std::vector<double> tail(static_cast<std::size_t>(H) + 1, 0.0);  // tail[k] = sum_{s=k+1}^{H} gamma(s)
  for (std::int64_t k = H - 1; k >= 0; --k) tail[static_cast<std::size_t>(k)] = tail[static_cast<std::size_t>(k) + 1] + duration.gamma(k + 1);
  const double n1 = static_cast<double>(state.n1);
  std::vector<double> values(paths.size());
  for (std::size_t r = 0; r < paths.size(); ++r) {
    double future = 0.0;
    for (std::int64_t k = 1; k < H; ++k) {
      const double n12 = static_cast<double>(paths[r][static_cast<std::size_t>(k - 1)] - paths[r][static_cast<std::size_t>(k)]);
      future += n12 * tail[static_cast<std::size_t>(k)];
    }
    values[r] = params.a * tail[0] - params.a / n1 * future;
  }
  out.value = mean(values);
  out.se = values.size() > 1 ? std::sqrt(variance(values) / static_cast<double>(values.size())) : 0.0;
  out.defined = true;
  return out;
}

struct ArEstimate {
  std::int64_t H = 0;
  std::vector<double> gamma;  // gamma[s - 1] multiplies I(t - s)
  double r_ar = 0.0;          // sum of the lag coefficients
};

/// OLS without intercept of I(t) on I(t-1), ..., I(t-H), for every t >= H.
/// Needs at least 2H + 1 observations; the H x H normal equations are solved
/// with a fully pivoted LU.
inline ArEstimate ar_estimate(std::span<const double> incidence, std::int64_t H) {
  require(H >= 1, ErrorKind::invalid_argument, "AR order H must be >= 1");
  const auto len = static_cast<std::int64_t>(incidence.size());
  if (len < 2 * H + 1) {
    fail(ErrorKind::invalid_argument, "AR(" + std::to_string(H) + ") needs at least " + std::to_string(2 * H + 1) +
                                          " observations, got " + std::to_string(len));
  }
  const auto h = static_cast<Eigen::Index>(H);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(h, h);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd row(h);
  for (std::int64_t t = H; t < len; ++t) {
    for (Eigen::Index s = 0; s < h; ++s) row[s] = incidence[static_cast<std::size_t>(t - 1 - s)];
    gram.noalias() += row * row.transpose();
    rhs += row * incidence[static_cast<std::size_t>(t)];
  }
  // Equilibrate so the rank threshold is relative to the diagonal scale.
  const double scale = gram.diagonal().maxCoeff();
  if (!(scale > 0.0)) fail(ErrorKind::rank_deficient, "lagged incidence is identically zero");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram / scale);
  lu.setThreshold(1e-10);
  if (lu.rank() < h) fail(ErrorKind::rank_deficient, "AR Gram matrix is singular");
  const Eigen::VectorXd coef = lu.solve(rhs / scale);
  ArEstimate out;
  out.H = H;
  out.gamma.assign(coef.data(), coef.data() + h);
  out.r_ar = coef.sum();
  return out;
}

}  // namespace sirstat
