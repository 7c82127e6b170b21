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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/random/poisson_distribution.hpp>

#include "sirstat/epiestim.hpp"
#include "sirstat/mechanistic.hpp"

namespace sirstat {
namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

TEST(Profiles, Geometric) {
  EXPECT_EQ(geometric_profile(0.07, 1).weights, std::vector<double>{1.0});
  const auto p = geometric_profile(0.07, 100);
  EXPECT_NEAR(sum(p.weights), 1.0, 1e-12);
  const double norm = 1 - std::pow(0.93, 100);
  EXPECT_NEAR(p.w(1), 0.07 / norm, 1e-15);
  EXPECT_NEAR(p.w(3), 0.07 * 0.93 * 0.93 / norm, 1e-15);
  EXPECT_NEAR(geometric_profile(0.07, 2000).mean(), 1 / 0.07, 1e-9);
  EXPECT_THROW(geometric_profile(0.07, 0), Error);
}

TEST(Profiles, LognormalModeAndNormalization) {
  const auto p = discretize_interval(ProfileFamily::lognormal, 4.5, 2.5, 30);
  EXPECT_NEAR(sum(p.weights), 1.0, 1e-12);
  const auto mode = std::max_element(p.weights.begin(), p.weights.end()) - p.weights.begin() + 1;
  // Continuous mode exp(mu - sigma^2) of the moment-matched lognormal.
  const double sigma2 = std::log1p(2.5 * 2.5 / (4.5 * 4.5));
  const double density_mode = std::exp(std::log(4.5) - 1.5 * sigma2);
  EXPECT_EQ(mode, std::lround(density_mode));
  EXPECT_LE(std::abs(mode - 4), 1);
  for (double w : p.weights) EXPECT_GE(w, 0.0);
  EXPECT_NEAR(p.mean(), 4.5, 0.1);
}

TEST(Profiles, CellsAreCdfDifferences) {
  const auto p = discretize_interval(ProfileFamily::gamma, 5.0, 2.0, 200);
  const boost::math::gamma_distribution<double> g(6.25, 0.8);
  const double total = boost::math::cdf(g, 200.5);
  EXPECT_NEAR(p.w(1), boost::math::cdf(g, 1.5) / total, 1e-14);
  EXPECT_NEAR(p.w(7), (boost::math::cdf(g, 7.5) - boost::math::cdf(g, 6.5)) / total, 1e-14);
}

TEST(Profiles, TinySpreadConcentratesOnTheRoundedMean) {
  for (auto f : {ProfileFamily::lognormal, ProfileFamily::gamma}) {
    const auto p = discretize_interval(f, 6.2, 1e-4, 20);
    EXPECT_NEAR(p.w(6), 1.0, 1e-12);
  }
}

TEST(Profiles, GammaAndLognormalDifferInTheTail) {
  const auto g = discretize_interval(ProfileFamily::gamma, 4.5, 2.5, 60);
  const auto l = discretize_interval(ProfileFamily::lognormal, 4.5, 2.5, 60);
  double tail_g = 0, tail_l = 0;
  for (std::size_t s = 11; s <= 60; ++s) {
    tail_g += g.w(s);
    tail_l += l.w(s);
  }
  EXPECT_GT(tail_l, tail_g);
  EXPECT_GT(std::abs(tail_l - tail_g), 1e-3);
}

TEST(Profiles, InvalidMoments) {
  EXPECT_THROW(discretize_interval(ProfileFamily::lognormal, -1.0, 2.0, 10), Error);
  EXPECT_THROW(discretize_interval(ProfileFamily::gamma, 3.0, 0.0, 10), Error);
  EXPECT_THROW(discretize_interval(ProfileFamily::geometric, 3.0, 1.0, 10), Error);
  EXPECT_THROW(explicit_profile({0.0, 0.0}), Error);
  EXPECT_NEAR(explicit_profile({1.0, 3.0}).w(2), 0.75, 1e-15);
}

TEST(InstantaneousR, ConstantIncidenceGivesUnitRatio) {
  const std::vector<double> flat(200, 40.0);
  const auto est = instantaneous_r(flat, discretize_interval(ProfileFamily::lognormal, 4.5, 2.5, 20), 7, RPrior{});
  for (const auto& e : est) {
    if (e.t >= 20) {
      EXPECT_NEAR(e.raw_ratio, 1.0, 1e-12);
    }
  }
  EXPECT_NEAR(est.back().posterior_mean, (1.0 + 7 * 40.0) / (0.2 + 7 * 40.0), 1e-12);
}

TEST(InstantaneousR, ZeroIncidenceReturnsThePriorMean) {
  const std::vector<double> zeros(50, 0.0);
  const RPrior prior{2.0, 0.5};
  for (const auto& e : instantaneous_r(zeros, geometric_profile(0.07, 30), 7, prior)) {
    EXPECT_DOUBLE_EQ(e.posterior_mean, 4.0);
    EXPECT_TRUE(e.flags & instant_flag::raw_undefined);
  }
}

TEST(InstantaneousR, HandWindow) {
  const std::vector<double> inc{10, 20, 30, 40};
  const auto p = explicit_profile({0.5, 0.5});
  const auto est = instantaneous_r(inc, p, 2, RPrior{1.0, 0.2});
  ASSERT_EQ(est.size(), 3u);
  EXPECT_DOUBLE_EQ(est[0].lambda, 5.0);
  EXPECT_DOUBLE_EQ(est[1].lambda, 15.0);
  EXPECT_DOUBLE_EQ(est[2].lambda, 25.0);
  EXPECT_DOUBLE_EQ(est[2].raw_ratio, 40.0 / 25.0);
  EXPECT_DOUBLE_EQ(est[2].posterior_shape, 1.0 + 30 + 40);
  EXPECT_DOUBLE_EQ(est[2].posterior_rate, 0.2 + 15 + 25);
}

TEST(InstantaneousR, RawRatioIsScaleInvariant) {
  const ModelParams p(0.14, 0.07, 3'000'000);
  const auto inc = incidence_series(simulate(p, initial_state(p.n, 100), 120, RngStream{1, 0}));
  std::vector<double> scaled(inc);
  for (auto& v : scaled) v *= 7.5;
  const auto prof = geometric_profile(0.07, 100);
  const auto a = instantaneous_r(inc, prof, 7, RPrior{});
  const auto b = instantaneous_r(scaled, prof, 7, RPrior{});
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::isfinite(a[k].raw_ratio)) {
      EXPECT_NEAR(a[k].raw_ratio, b[k].raw_ratio, 1e-12 * a[k].raw_ratio);
    }
  }
}

TEST(InstantaneousR, Validation) {
  const std::vector<double> bad{1.0, -1.0};
  EXPECT_THROW(instantaneous_r(bad, geometric_profile(0.1, 5), 7, RPrior{}), Error);
  const std::vector<double> ok{1.0, 1.0};
  EXPECT_THROW(instantaneous_r(ok, geometric_profile(0.1, 5), 0, RPrior{}), Error);
  EXPECT_THROW(instantaneous_r(ok, geometric_profile(0.1, 5), 7, RPrior{0.0, 1.0}), Error);
}

TEST(IncidenceSeries, PrependsInitialInfected) {
  const auto path = path_from_marginals({{100, 90, 84}, {10, 15, 17}, {0, 5, 9}});
  EXPECT_EQ(incidence_series(path), (std::vector<double>{10, 10, 6}));
}

TEST(RestrictedR0, GeometricDurationEqualsBasicRatio) {
  const ModelParams p;
  const auto path = simulate(p, initial_state(p.n, 50), 250, RngStream{2, 0});
  for (std::size_t t : {0u, 120u, 200u, 250u}) {
    const RzeroConfig cfg{100, 100, RngStream{3, t}};
    const auto basic = reproduction_ratios(path.states[t], p, cfg);
    const auto restricted = restricted_r0(path.states[t], p, DurationModel::geometric(p.c, 100), cfg);
    ASSERT_TRUE(restricted.defined);
    EXPECT_NEAR(restricted.value, basic.basic, 1e-10 * basic.basic) << t;
    EXPECT_NEAR(restricted.value, basic.basic, 3 * basic.se_basic + 1e-12) << t;
  }
}

TEST(RestrictedR0, NoFutureInfectionsGivesTheMeanDuration) {
  const ModelParams p(0.1, 0.07, 1000);
  const EpidemicState s{0, 500, 0, 500};
  const auto geo = DurationModel::geometric(0.07, 100);
  EXPECT_NEAR(restricted_r0(s, p, geo, RzeroConfig{100, 3, {}}).value, 0.1 * geo.mean(), 1e-12);
  const auto fixed = DurationModel::fixed(5);
  EXPECT_NEAR(restricted_r0(s, p, fixed, RzeroConfig{100, 3, {}}).value, 0.1 * 5, 1e-12);
  EXPECT_FALSE(restricted_r0(EpidemicState{0, 0, 500, 500}, p, geo, RzeroConfig{}).defined);
}

TEST(RestrictedR0, FixedDurationSubtractsWeightedInfections) {
  const ModelParams p(0.2, 0.07, 100'000);
  const auto state = initial_state(p.n, 500);
  const RzeroConfig cfg{10, 50, RngStream{4, 0}};
  const auto fixed = DurationModel::fixed(4);
  EXPECT_DOUBLE_EQ(fixed.partial_expectation(1), 3.0);
  EXPECT_DOUBLE_EQ(fixed.partial_expectation(4), 0.0);
  const auto paths = forward_susceptibles(state, p, cfg);
  double expected = 0;
  for (const auto& row : paths) {
    double future = 0;
    for (int k = 1; k < 4; ++k) future += double(row[k - 1] - row[k]) * (4 - k);
    expected += p.a * 4 - p.a / double(state.n1) * future;
  }
  expected /= double(paths.size());
  EXPECT_NEAR(restricted_r0(state, p, fixed, cfg).value, expected, 1e-12);
  EXPECT_LT(expected, p.a * 4);
}

TEST(DurationModel, Validation) {
  EXPECT_THROW((DurationModel{{1.0, 0.5, 0.7}}.validate()), Error);
  EXPECT_THROW((DurationModel{{}}.validate()), Error);
  EXPECT_NEAR(DurationModel::geometric(0.07, 5000).mean(), 1 / 0.07, 1e-9);
}

TEST(ArEstimate, ExactAutoregressionOfOrderOne) {
  std::vector<double> inc{5.0};
  for (int t = 1; t < 30; ++t) inc.push_back(inc.back() * 1.07);
  const auto est = ar_estimate(inc, 1);
  EXPECT_NEAR(est.gamma[0], 1.07, 1e-12);
  EXPECT_NEAR(est.r_ar, 1.07, 1e-12);
}

TEST(ArEstimate, LengthAndRank) {
  const std::vector<double> short_series(14, 1.0);
  EXPECT_THROW(ar_estimate(short_series, 7), Error);
  std::vector<double> geometric{1.0};
  for (int t = 1; t < 40; ++t) geometric.push_back(geometric.back() * 1.1);
  try {
    ar_estimate(geometric, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::rank_deficient);
  }
  const std::vector<double> zeros(40, 0.0);
  EXPECT_THROW(ar_estimate(zeros, 2), Error);
}

TEST(ArEstimate, RecoversTheRenewalRatio) {
  // Poisson renewal with weights c(1-c)^(s-1) normalized over the first H
  // lags: an AR(H) in conditional mean whose coefficients sum to R00.
  const double r00 = 1.0, c = 0.3;
  const std::int64_t H = 10;
  const auto w = geometric_profile(c, H);
  double total = 0;
  for (std::uint64_t rep = 0; rep < 5; ++rep) {
    auto engine = RngStream{5, rep}.engine();
    std::vector<double> inc(static_cast<std::size_t>(H), 500.0);
    for (int t = 0; t < 2000; ++t) {
      double mu = 0;
      for (std::int64_t s = 1; s <= H; ++s) mu += r00 * w.w(s) * inc[inc.size() - s];
      inc.push_back(static_cast<double>(boost::random::poisson_distribution<long, double>(mu)(engine)));
    }
    total += ar_estimate(inc, H).r_ar;
  }
  EXPECT_NEAR(total / 5, r00, 0.05 * r00);
}

TEST(ArEstimate, ScaleInvariantAndComputableOnShortSeries) {
  const ModelParams p(0.14, 0.07, 3'000'000);
  const auto inc = incidence_series(simulate(p, initial_state(p.n, 100), 42, RngStream{6, 0}));
  ASSERT_EQ(inc.size(), 43u);
  for (std::int64_t H : {7, 14, 21}) {
    const auto a = ar_estimate(inc, H);
    std::vector<double> scaled(inc);
    for (auto& v : scaled) v *= 3.0;
    EXPECT_NEAR(ar_estimate(scaled, H).r_ar, a.r_ar, 1e-8 * std::abs(a.r_ar)) << H;
  }
}

}  // namespace
}  // namespace sirstat
