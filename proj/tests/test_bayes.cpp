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

#include <cmath>
#include <vector>

#include "sirstat/bayes.hpp"
#include "sirstat/numerics.hpp"

namespace sirstat {
namespace {

CountPath sample_path() {
  return simulate(ModelParams(0.14, 0.07, 3'000'000), initial_state(3'000'000, 100), 40, RngStream{11, 0});
}

TEST(PosteriorUpdate, NoDataLeavesThePrior) {
  const PosteriorPair prior{{2.0, 3.0}, {4.0, 5.0}};
  SufficientStats empty;
  empty.n = 1000;
  EXPECT_EQ(posterior_update(prior, empty), prior);
}

TEST(PosteriorUpdate, AddsCountsAndExposures) {
  const auto path = sample_path();
  const auto stats = build_stats(path);
  const PosteriorPair prior{{2.0, 3.0}, {4.0, 5.0}};
  const auto post = posterior_update(prior, stats);
  double n12 = 0, n23 = 0, exposure = 0, n2 = 0;
  for (std::size_t t = 1; t < path.states.size(); ++t) {
    n12 += double(path.transitions[t - 1].n12);
    n23 += double(path.transitions[t - 1].n23);
    exposure += double(path.states[t - 1].n1) * double(path.states[t - 1].n2) / 3e6;
    n2 += double(path.states[t - 1].n2);
  }
  EXPECT_EQ(post.a.shape, 2.0 + n12);
  EXPECT_NEAR(post.a.rate, 3.0 + exposure, 1e-9 * exposure);
  EXPECT_EQ(post.c.shape, 4.0 + n23);
  EXPECT_EQ(post.c.rate, 5.0 + n2);
}

TEST(PosteriorUpdate, SequentialEqualsBatch) {
  const auto path = sample_path();
  const auto prior = default_prior();
  const auto batch = posterior_update(prior, build_stats(path, 1, 40));
  const auto seq = posterior_update(posterior_update(prior, build_stats(path, 1, 17)), build_stats(path, 18, 40));
  EXPECT_EQ(seq.a.shape, batch.a.shape);
  EXPECT_EQ(seq.c.shape, batch.c.shape);
  EXPECT_EQ(seq.c.rate, batch.c.rate);
  EXPECT_NEAR(seq.a.rate, batch.a.rate, 1e-13 * batch.a.rate);
}

TEST(PosteriorUpdate, FlatPriorLimitIsThePoissonEstimate) {
  const auto stats = build_stats(sample_path());
  const auto fit = fit_poisson_aml(stats);
  // Uniform prior (shape 1, rate -> 0): the posterior mode tends to the estimate.
  const auto uniform = posterior_update({{1.0, 1e-12}, {1.0, 1e-12}}, stats);
  EXPECT_NEAR(uniform.a.mode(), fit.a_hat, 1e-10 * fit.a_hat);
  EXPECT_NEAR(uniform.c.mode(), fit.c_hat, 1e-10 * fit.c_hat);
  // Shape and rate both -> 0: the posterior mean does.
  const auto vague = posterior_update({{1e-12, 1e-12}, {1e-12, 1e-12}}, stats);
  EXPECT_NEAR(vague.a.mean(), fit.a_hat, 1e-10 * fit.a_hat);
  EXPECT_NEAR(vague.c.mean(), fit.c_hat, 1e-10 * fit.c_hat);
}

TEST(PosteriorUpdate, RejectsBadPriors) {
  SufficientStats s;
  s.n = 10;
  EXPECT_THROW(posterior_update({{0.0, 1.0}, {1.0, 1.0}}, s), Error);
  EXPECT_THROW(posterior_update({{1.0, 1.0}, {1.0, -1.0}}, s), Error);
}

TEST(R0Posterior, ExchangeableParametersHaveUnitMedian) {
  for (double nu : {0.7, 3.0, 250.0}) {
    const R0Posterior d({{nu, 2.5}, {nu, 2.5}});
    EXPECT_NEAR(d.quantile(0.5), 1.0, 1e-10) << nu;
    EXPECT_NEAR(d.cdf(1.0), 0.5, 1e-12) << nu;
  }
}

TEST(R0Posterior, QuantileInvertsCdf) {
  const R0Posterior d({{40.0, 20.0}, {25.0, 300.0}});
  for (double p : {1e-6, 0.05, 0.5, 0.95, 0.999999}) EXPECT_NEAR(d.cdf(d.quantile(p)), p, 1e-10 * std::max(p, 1e-3));
}

TEST(R0Posterior, DensityIntegratesToTheCdf) {
  const R0Posterior d({{12.0, 6.0}, {9.0, 70.0}});
  const double lo = d.quantile(0.1), hi = d.quantile(0.9);
  const int m = 20'000;
  const double h = (hi - lo) / m;
  double integral = d.density(lo) + d.density(hi);
  for (int i = 1; i < m; ++i) integral += (i % 2 ? 4.0 : 2.0) * d.density(lo + i * h);
  EXPECT_NEAR(integral * h / 3.0, 0.8, 1e-10);
}

TEST(R0Posterior, MeanDefinedOnlyAboveUnitShape) {
  EXPECT_FALSE(R0Posterior({{5.0, 1.0}, {1.0, 1.0}}).mean_defined());
  EXPECT_TRUE(std::isnan(R0Posterior({{5.0, 1.0}, {0.5, 1.0}}).mean()));
  EXPECT_TRUE(R0Posterior({{5.0, 1.0}, {1.0 + 1e-9, 1.0}}).mean_defined());
  const auto s = summarize({{5.0, 1.0}, {1.0, 1.0}});
  EXPECT_EQ(s.flags(), "mean_undefined");
  EXPECT_LT(s.r0_q05, s.r0_q50);
  EXPECT_LT(s.r0_q50, s.r0_q95);
}

TEST(R0Posterior, ScaledRatioPassesKolmogorovSmirnov) {
  const PosteriorPair post{{30.0, 200.0}, {12.0, 170.0}};
  const R0Posterior d(post);
  const auto draws = sample_posterior(post, 1'000'000, RngStream{12, 0});
  const double D = ks_statistic(draws.r0, [&](double r) { return d.cdf(r); });
  EXPECT_LT(D, 0.01);
  EXPECT_GT(ks_pvalue(D, draws.r0.size()), 0.01);
}

TEST(R0Posterior, KolmogorovSmirnovDetectsTheWrongScale) {
  const PosteriorPair post{{30.0, 200.0}, {12.0, 170.0}};
  const R0Posterior wrong({{30.0, 200.0 * 1.02}, {12.0, 170.0}});
  const auto draws = sample_posterior(post, 200'000, RngStream{12, 1});
  EXPECT_LT(ks_pvalue(ks_statistic(draws.r0, [&](double r) { return wrong.cdf(r); }), draws.r0.size()), 0.01);
}

TEST(R0Posterior, MeanMatchesTheSamplingOracle) {
  const PosteriorPair post{{40.0, 300.0}, {8.0, 90.0}};
  const R0Posterior d(post);
  const auto draws = sample_posterior(post, 10'000'000, RngStream{13, 0});
  const double oracle = mean(draws.r0);
  EXPECT_NEAR(d.mean(), oracle, 0.01 * oracle);
  // The alternative form with an extra nu_c factor is far off.
  const double alternative = post.c.rate * post.a.shape / post.a.rate * post.c.shape / (post.c.shape - 1.0);
  EXPECT_GT(std::abs(alternative - oracle), 0.5 * oracle);
}

TEST(SamplePosterior, QuantilesMatchTheDistribution) {
  const PosteriorPair post{{50.0, 400.0}, {20.0, 250.0}};
  const R0Posterior d(post);
  const auto draws = sample_posterior(post, 200'000, RngStream{14, 0});
  for (double p : {0.05, 0.5, 0.95}) {
    // Binomial standard error of the empirical CDF at the quantile, in probability units.
    const double se = std::sqrt(p * (1 - p) / 200'000.0);
    EXPECT_NEAR(d.cdf(quantile(draws.r0, p)), p, 4 * se) << p;
  }
}

TEST(SamplePosterior, HugeShapeConcentrates) {
  const PosteriorPair post{{1e10, 1e11}, {1e10, 2e11}};
  const auto draws = sample_posterior(post, 1000, RngStream{15, 0});
  for (std::size_t i = 0; i < draws.a.size(); ++i) {
    EXPECT_NEAR(draws.a[i], 0.1, 1e-4);
    EXPECT_NEAR(draws.c[i], 0.05, 1e-4);
    EXPECT_NEAR(draws.r0[i], 2.0, 1e-3);
  }
}

TEST(SamplePosterior, DeterministicUnderSeed) {
  const PosteriorPair post{{3.0, 2.0}, {4.0, 5.0}};
  const auto x = sample_posterior(post, 500, RngStream{16, 2});
  const auto y = sample_posterior(post, 500, RngStream{16, 2});
  const auto z = sample_posterior(post, 500, RngStream{16, 3});
  EXPECT_EQ(x.r0, y.r0);
  EXPECT_NE(x.r0, z.r0);
  EXPECT_THROW(sample_posterior(post, 0, RngStream{}), Error);
}

TEST(KolmogorovSmirnov, KnownStatistic) {
  const std::vector<double> xs{0.1, 0.4, 0.7};
  // Uniform CDF: deviations are 1/3-0.1, 2/3-0.4, 1-0.7 and 0.1, 0.4-1/3, 0.7-2/3.
  EXPECT_NEAR(ks_statistic(xs, [](double x) { return x; }), 0.3, 1e-15);
  EXPECT_NEAR(ks_pvalue(1.628 / std::sqrt(1e6), 1'000'000), 0.01, 2e-4);
}

}  // namespace
}  // namespace sirstat
