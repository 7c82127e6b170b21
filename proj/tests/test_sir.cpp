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

#include "sirstat/numerics.hpp"
#include "sirstat/sir.hpp"

namespace sirstat {
namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an sirstat::Error";
  return ErrorKind::io;
}

TEST(ModelParams, RejectsInvalidValues) {
  EXPECT_EQ(kind_of([] { ModelParams(0.0, 0.07, 10); }), ErrorKind::invalid_argument);
  EXPECT_EQ(kind_of([] { ModelParams(0.1, 1.0, 10); }), ErrorKind::invalid_argument);
  EXPECT_EQ(kind_of([] { ModelParams(0.1, 0.0, 10); }), ErrorKind::invalid_argument);
  EXPECT_EQ(kind_of([] { ModelParams(0.1, 0.07, 0); }), ErrorKind::invalid_argument);
}

TEST(TransitionMatrix, StructureAndExamples) {
  const ModelParams p(0.1, 0.07, 3'000'000);
  const auto m = transition_matrix(p, 50);
  EXPECT_DOUBLE_EQ(m[0][1], 1.0 / 600'000.0);
  EXPECT_DOUBLE_EQ(m[1][1], 0.93);
  EXPECT_DOUBLE_EQ(m[1][2], 0.07);
  EXPECT_EQ(m[0][2], 0.0);
  EXPECT_EQ(m[1][0], 0.0);
  EXPECT_EQ(m[2][0], 0.0);
  EXPECT_EQ(m[2][1], 0.0);
  EXPECT_EQ(m[2][2], 1.0);
  for (const auto& row : m) EXPECT_NEAR(row[0] + row[1] + row[2], 1.0, 1e-15);

  const auto idle = transition_matrix(p, 0);
  EXPECT_EQ(idle[0][0], 1.0);
  EXPECT_EQ(idle[0][1], 0.0);
}

TEST(TransitionMatrix, ProbabilityAboveOneIsAnError) {
  const ModelParams p(2.0, 0.07, 100);
  EXPECT_EQ(kind_of([&] { transition_matrix(p, 60); }), ErrorKind::invalid_probability);
  EXPECT_NO_THROW(transition_matrix(p, 50));
}

TEST(Step, DiseaseFreeStateIsAbsorbing) {
  const ModelParams p(0.3, 0.07, 1000);
  const EpidemicState s{5, 900, 0, 100};
  for (std::uint64_t k = 0; k < 50; ++k) {
    auto [next, tr] = step(s, p, RngStream{3, k});
    EXPECT_EQ(tr.n12, 0);
    EXPECT_EQ(tr.n23, 0);
    EXPECT_EQ(next.n1, s.n1);
    EXPECT_EQ(next.n3, s.n3);
    EXPECT_EQ(next.t, 6);
  }
}

TEST(Step, NearCertainRecovery) {
  const ModelParams p(0.1, 1.0 - 1e-9, 10'000);
  const EpidemicState s{0, 9000, 1000, 0};
  auto [next, tr] = step(s, p, RngStream{4, 0});
  EXPECT_GE(tr.n23, 999);
}

TEST(Step, BinomialMomentsFromFixedState) {
  const ModelParams p(0.25, 0.07, 50'000);
  const EpidemicState s{0, 40'000, 8'000, 2'000};
  const double prob = 0.25 * 8000.0 / 50000.0;
  const double mu = 40'000 * prob;
  const double sigma2 = mu * (1.0 - prob);
  const int draws = 100'000;
  std::vector<double> n12(draws), n23(draws);
  const RngStream base{11, 0};
  for (int i = 0; i < draws; ++i) {
    auto [next, tr] = step(s, p, base.substream(static_cast<std::uint64_t>(i)));
    n12[i] = static_cast<double>(tr.n12);
    n23[i] = static_cast<double>(tr.n23);
  }
  EXPECT_NEAR(mean(n12), mu, 3.0 * std::sqrt(sigma2 / draws));
  // Standard error of the sample variance for a near-normal law.
  EXPECT_NEAR(variance(n12), sigma2, 3.0 * sigma2 * std::sqrt(2.0 / (draws - 1)));
  const double mu23 = 8000 * 0.07;
  const double v23 = mu23 * 0.93;
  EXPECT_NEAR(mean(n23), mu23, 3.0 * std::sqrt(v23 / draws));
  EXPECT_NEAR(variance(n23), v23, 3.0 * v23 * std::sqrt(2.0 / (draws - 1)));
  EXPECT_LT(std::abs(correlation(n12, n23)), 0.02);
}

TEST(Step, SmallMeanBranchMoments) {
  // mean below 11 exercises the inversion branch
  const ModelParams p(0.1, 0.07, 3'000'000);
  const EpidemicState s{0, 2'999'950, 50, 0};
  const double prob = 0.1 * 50.0 / 3'000'000.0;
  const double mu = 2'999'950 * prob;
  const int draws = 100'000;
  std::vector<double> n12(draws);
  for (int i = 0; i < draws; ++i) {
    n12[i] = static_cast<double>(step(s, p, RngStream{12, static_cast<std::uint64_t>(i)}).second.n12);
  }
  EXPECT_NEAR(mean(n12), mu, 3.0 * std::sqrt(mu * (1 - prob) / draws));
}

TEST(Simulate, NoInfectedGivesConstantPath) {
  const ModelParams p(0.1, 0.07, 1000);
  const auto path = simulate(p, initial_state(1000, 0), 30, RngStream{1, 0});
  ASSERT_EQ(path.days(), 30);
  for (const auto& s : path.states) {
    EXPECT_EQ(s.n1, 1000);
    EXPECT_EQ(s.n2, 0);
  }
}

TEST(Simulate, RejectsEmptyHorizon) {
  const ModelParams p(0.1, 0.07, 1000);
  EXPECT_EQ(kind_of([&] { simulate(p, initial_state(1000, 5), 0, RngStream{}); }), ErrorKind::invalid_argument);
}

TEST(Simulate, DeterministicAndConserving) {
  const ModelParams p(0.2, 0.07, 20'000);
  const auto init = initial_state(20'000, 20);
  const auto a = simulate(p, init, 200, RngStream{99, 7});
  const auto b = simulate(p, init, 200, RngStream{99, 7});
  const auto c = simulate(p, init, 200, RngStream{99, 8});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_NO_THROW(validate_path(a));
  for (std::size_t t = 1; t < a.states.size(); ++t) {
    EXPECT_EQ(a.states[t].total(), 20'000);
    EXPECT_LE(a.states[t].n1, a.states[t - 1].n1);
    EXPECT_GE(a.states[t].n3, a.states[t - 1].n3);
  }
}

TEST(Simulate, DefaultDesignFinalImmuneFraction) {
  const ModelParams p;  // a = 0.1, c = 0.07, n = 3e6
  const auto init = initial_state(p.n, 50);
  const int reps = 100;
  double immune = 0.0;
  int extinct = 0;
  for (int r = 0; r < reps; ++r) {
    const auto path = simulate(p, init, 700, RngStream{2024, static_cast<std::uint64_t>(r)});
    const auto& last = path.states.back();
    immune += static_cast<double>(last.n3 + last.n2) / static_cast<double>(p.n);
    extinct += last.n3 < 1000;
  }
  EXPECT_NEAR(immune / reps, 0.55, 0.05);
  EXPECT_LT(extinct, 5);
}

TEST(Simulate, MeanInfectedIsSinglePeaked) {
  const ModelParams p;
  const auto init = initial_state(p.n, 50);
  const int reps = 20;
  std::vector<double> mean_n2(701, 0.0);
  for (int r = 0; r < reps; ++r) {
    const auto path = simulate(p, init, 700, RngStream{5, static_cast<std::uint64_t>(r)});
    for (std::size_t t = 0; t < path.states.size(); ++t) mean_n2[t] += static_cast<double>(path.states[t].n2) / reps;
  }
  std::size_t peak = 0;
  for (std::size_t t = 0; t < mean_n2.size(); ++t) {
    if (mean_n2[t] > mean_n2[peak]) peak = t;
  }
  EXPECT_GT(peak, 50u);
  EXPECT_LT(peak, 650u);
  for (std::size_t t = 20; t < peak; ++t) EXPECT_GE(mean_n2[t], mean_n2[t - 20]) << t;
  for (std::size_t t = peak + 20; t < mean_n2.size(); ++t) EXPECT_LE(mean_n2[t], mean_n2[t - 20]) << t;
}

TEST(Streams, DistinctStreamsAreUncorrelated) {
  const ModelParams p(0.2, 0.07, 10'000);
  const auto init = initial_state(10'000, 30);
  const int reps = 10'000;
  std::vector<double> x(reps), y(reps);
  const RngStream base{77, 0};
  for (int r = 0; r < reps; ++r) {
    x[r] = static_cast<double>(simulate(p, init, 15, base.substream(2 * r)).states.back().n3);
    y[r] = static_cast<double>(simulate(p, init, 15, base.substream(2 * r + 1)).states.back().n3);
  }
  EXPECT_LT(std::abs(correlation(x, y)), 0.05);
}

TEST(Conversions, HandExample) {
  const MarginalSeries m{{100, 90}, {10, 15}, {0, 5}};
  const auto trs = transitions_from_marginals(m);
  ASSERT_EQ(trs.size(), 1u);
  EXPECT_EQ(trs[0].t, 1);
  EXPECT_EQ(trs[0].n12, 10);
  EXPECT_EQ(trs[0].n23, 5);
  const auto back = marginals_from_transitions(EpidemicState{0, 100, 10, 0}, trs);
  EXPECT_EQ(back.n1, m.n1);
  EXPECT_EQ(back.n2, m.n2);
  EXPECT_EQ(back.n3, m.n3);
}

TEST(Conversions, ConstantMarginalsGiveZeroTransitions) {
  const MarginalSeries m{{7, 7, 7}, {3, 3, 3}, {1, 1, 1}};
  for (const auto& tr : transitions_from_marginals(m)) {
    EXPECT_EQ(tr.n12, 0);
    EXPECT_EQ(tr.n23, 0);
  }
}

TEST(Conversions, ViolationsAreRejected) {
  EXPECT_EQ(kind_of([] { transitions_from_marginals({{90, 100}, {10, 0}, {0, 0}}); }), ErrorKind::inconsistent_counts);
  EXPECT_EQ(kind_of([] { transitions_from_marginals({{90, 90}, {10, 10}, {5, 0}}); }), ErrorKind::inconsistent_counts);
  EXPECT_EQ(kind_of([] { transitions_from_marginals({{90, 90}, {10, 11}, {0, 0}}); }), ErrorKind::inconsistent_counts);
  EXPECT_EQ(kind_of([] { marginals_from_transitions({0, 5, 1, 0}, {{1, 6, 0}}); }), ErrorKind::inconsistent_counts);
}

TEST(Conversions, RoundTripOnSimulatedPaths) {
  const ModelParams p(0.25, 0.1, 5000);
  for (std::uint64_t r = 0; r < 1000; ++r) {
    const auto path = simulate(p, initial_state(5000, 10), 60, RngStream{8, r});
    const auto m = marginals_of(path);
    const auto trs = transitions_from_marginals(m);
    ASSERT_EQ(trs, path.transitions);
    const auto m2 = marginals_from_transitions(path.states.front(), trs);
    ASSERT_EQ(m2.n1, m.n1);
    ASSERT_EQ(m2.n2, m.n2);
    ASSERT_EQ(m2.n3, m.n3);
    ASSERT_EQ(path_from_marginals(m), path);
  }
}

TEST(Individuals, SingleInfectedRecoversGeometrically) {
  const ModelParams p(0.1, 0.07, 1);
  const int reps = 10'000;
  std::vector<double> durations(reps);
  for (int r = 0; r < reps; ++r) {
    const auto h = simulate_individuals(p, initial_state(1, 1), 400, RngStream{21, static_cast<std::uint64_t>(r)});
    int d = 0;
    while (d + 1 < static_cast<int>(h.histories.size()) && h.histories[d + 1][0] == Health::infected) ++d;
    durations[r] = d + 1.0;  // days spent infected, counting day 0
  }
  const double sd = std::sqrt(0.93) / 0.07;
  EXPECT_NEAR(mean(durations), 1.0 / 0.07, 3.0 * sd / std::sqrt(reps));
}

TEST(Individuals, AggregateMatchesCountSimulation) {
  const ModelParams p(0.3, 0.1, 1000);
  const auto init = initial_state(1000, 10);
  const int reps = 10'000;
  const int days = 8;
  std::vector<std::vector<double>> ind(days, std::vector<double>(reps)), agg(days, std::vector<double>(reps));
  for (int r = 0; r < reps; ++r) {
    const auto path = simulate_individuals(p, init, days, RngStream{31, static_cast<std::uint64_t>(r)}).aggregate();
    const auto ref = simulate(p, init, days, RngStream{32, static_cast<std::uint64_t>(r)});
    ASSERT_NO_THROW(validate_path(path));
    for (int d = 0; d < days; ++d) {
      ind[d][r] = static_cast<double>(path.transitions[d].n12);
      agg[d][r] = static_cast<double>(ref.transitions[d].n12);
    }
  }
  for (int d = 0; d < days; ++d) {
    const double se = std::sqrt((variance(ind[d]) + variance(agg[d])) / reps);
    EXPECT_NEAR(mean(ind[d]), mean(agg[d]), 3.0 * se) << "day " << d + 1;
  }
}

TEST(Individuals, AllRecoveredIsFrozen) {
  const ModelParams p(0.3, 0.1, 50);
  const auto h = simulate_individuals(p, EpidemicState{0, 0, 0, 50}, 10, RngStream{});
  for (const auto& day : h.histories) {
    for (Health x : day) EXPECT_EQ(x, Health::recovered);
  }
}

TEST(Individuals, SizeGuard) {
  const ModelParams p(0.3, 0.1, 200'000);
  EXPECT_EQ(kind_of([&] { simulate_individuals(p, initial_state(200'000, 1), 1, RngStream{}); }),
            ErrorKind::size_limit);
}

}  // namespace
}  // namespace sirstat
