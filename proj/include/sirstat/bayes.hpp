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

// Conjugate gamma inference for (a, c) under the Poisson approximate
// likelihood.
//
// Gamma(nu, lambda) is shape-rate throughout: density ~ x^(nu-1) e^(-lambda x).
// With independent priors the posteriors stay independent gammas,
//
//   a | data ~ Gamma(nu_a + sum N12,  lambda_a + sum N1(t-1) N2(t-1) / n)
//   c | data ~ Gamma(nu_c + sum N23,  lambda_c + sum N2(t-1))
//
// and since 2 lambda x ~ chi2(2 nu), the ratio R0 = a / c satisfies
//
//   (lambda_a nu_c) / (lambda_c nu_a) * R0 ~ F(2 nu_a, 2 nu_c).

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/random/gamma_distribution.hpp>

#include "sirstat/error.hpp"
#include "sirstat/estimators.hpp"
#include "sirstat/rng.hpp"

namespace sirstat {

struct GammaParam {
  double shape = 1.0;  // nu
  double rate = 1e-3;  // lambda

  void validate() const {
    require(shape > 0.0 && std::isfinite(shape) && rate > 0.0 && std::isfinite(rate), ErrorKind::invalid_argument,
            "gamma shape and rate must be positive and finite");
  }
  double mean() const { return shape / rate; }
  /// Zero when shape < 1 (the density is then unbounded at the origin).
  double mode() const { return shape >= 1.0 ? (shape - 1.0) / rate : 0.0; }
  double variance() const { return shape / (rate * rate); }

  friend bool operator==(const GammaParam&, const GammaParam&) = default;
};

struct PosteriorPair {
  GammaParam a;
  GammaParam c;

  void validate() const {
    a.validate();
    c.validate();
  }
  friend bool operator==(const PosteriorPair&, const PosteriorPair&) = default;
};

/// Near-flat default: shape 1, rate 1e-3 for both parameters.
inline PosteriorPair default_prior() { return {}; }

inline PosteriorPair posterior_update(const PosteriorPair& prior, const SufficientStats& stats) {
  prior.validate();
  require(stats.n >= 1, ErrorKind::invalid_argument, "population size must be >= 1");
  PosteriorPair post = prior;
  post.a.shape += static_cast<double>(stats.sum_n12());
  post.a.rate += stats.exposure_a();
  post.c.shape += static_cast<double>(stats.sum_n23());
  post.c.rate += static_cast<double>(stats.sum_n2_prev());
  return post;
}

/// Distribution of R0 = a / c under a PosteriorPair.
class R0Posterior {
 public:
  explicit R0Posterior(const PosteriorPair& post)
      : post_(post), f_(2.0 * post.a.shape, 2.0 * post.c.shape) {
    post.validate();
    scale_ = post.a.rate * post.c.shape / (post.c.rate * post.a.shape);
  }

  const PosteriorPair& posterior() const { return post_; }
  /// k such that k R0 ~ F(2 nu_a, 2 nu_c).
  double scale() const { return scale_; }
  double df1() const { return 2.0 * post_.a.shape; }
  double df2() const { return 2.0 * post_.c.shape; }

  double cdf(double r) const { return r <= 0.0 ? 0.0 : boost::math::cdf(f_, scale_ * r); }
  double density(double r) const { return r < 0.0 ? 0.0 : scale_ * boost::math::pdf(f_, scale_ * r); }
  double quantile(double p) const {
    require(p > 0.0 && p < 1.0, ErrorKind::invalid_probability, "quantile level must lie in (0, 1)");
    return boost::math::quantile(f_, p) / scale_;
  }

  /// The mean exists only when nu_c > 1.
  bool mean_defined() const { return post_.c.shape > 1.0; }
  /// nu_a lambda_c / (lambda_a (nu_c - 1)); NaN when undefined.
  double mean() const {
    if (!mean_defined()) return std::numeric_limits<double>::quiet_NaN();
    return post_.a.shape * post_.c.rate / (post_.a.rate * (post_.c.shape - 1.0));
  }

 private:
  PosteriorPair post_;
  boost::math::fisher_f_distribution<double> f_;
  double scale_ = 1.0;
};

inline R0Posterior r0_posterior(const PosteriorPair& post) { return R0Posterior(post); }

struct PosteriorDraws {
  std::vector<double> a, c, r0;
};

/// S independent draws of (a, c) and R0 = a / c. a and c use separate
/// substreams so either marginal is reproducible on its own.
inline PosteriorDraws sample_posterior(const PosteriorPair& post, std::int64_t S, const RngStream& rng) {
  post.validate();
  require(S >= 1, ErrorKind::invalid_argument, "sample count S must be >= 1");
  const auto count = static_cast<std::size_t>(S);
  PosteriorDraws out;
  out.a.resize(count);
  out.c.resize(count);
  out.r0.resize(count);
  auto engine_a = rng.substream("a").engine();
  auto engine_c = rng.substream("c").engine();
  // boost's gamma takes (shape, scale).
  boost::random::gamma_distribution<double> ga(post.a.shape, 1.0 / post.a.rate);
  boost::random::gamma_distribution<double> gc(post.c.shape, 1.0 / post.c.rate);
  for (std::size_t i = 0; i < count; ++i) {
    out.a[i] = ga(engine_a);
    out.c[i] = gc(engine_c);
    out.r0[i] = out.a[i] / out.c[i];
  }
  return out;
}

struct PosteriorSummary {
  PosteriorPair post;
  double r0_mean = std::numeric_limits<double>::quiet_NaN();
  double r0_q05 = 0.0, r0_q50 = 0.0, r0_q95 = 0.0;
  bool mean_defined = false;

  std::string flags() const { return mean_defined ? "" : "mean_undefined"; }
};

inline PosteriorSummary summarize(const PosteriorPair& post) {
  const R0Posterior d(post);
  PosteriorSummary s;
  s.post = post;
  s.mean_defined = d.mean_defined();
  s.r0_mean = d.mean();
  s.r0_q05 = d.quantile(0.05);
  s.r0_q50 = d.quantile(0.5);
  s.r0_q95 = d.quantile(0.95);
  return s;
}

}  // namespace sirstat
