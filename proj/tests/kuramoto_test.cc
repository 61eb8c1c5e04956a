/*
 * Copyright 2026 The Leakgame Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "leakgame/kuramoto.h"

#include <cmath>
#include <random>
#include <vector>

#include "boost/numeric/odeint.hpp"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "leakgame/csv.h"
#include "test_util.h"

namespace leakgame {
namespace {

OscillatorState Advance(OscillatorState s, double dt, int steps) {
  for (int k = 0; k < steps; ++k) s = *Step(s, dt);
  return s;
}

TEST(KuramotoTest, SynchronizedManifoldIsInvariant) {
  OscillatorState s = *MakeOscillators(std::vector<double>(6, 1.3),
                                       std::vector<double>(6, 0.7), 2.0);
  s = Advance(s, 0.01, 500);
  for (double p : s.phases) EXPECT_EQ(p, s.phases[0]);
  EXPECT_NEAR(s.unwrapped[0], 1.3 + 0.7 * 5.0, 1e-9);
}

TEST(KuramotoTest, UncoupledPhasesAdvanceLinearly) {
  std::vector<double> phi = {0.1, 2.0, 5.9}, w = {1.0, -0.4, 2.5};
  OscillatorState s = Advance(*MakeOscillators(phi, w, 0.0), 0.05, 200);
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(WrapDifference(s.phases[i] - (phi[i] + w[i] * 10.0)), 0.0, 1e-9);
    EXPECT_GE(s.phases[i], 0.0);
    EXPECT_LT(s.phases[i], 2 * M_PI);
  }
}

TEST(KuramotoTest, TwoOscillatorsLockAtArcsin) {
  OscillatorState s = *MakeOscillators({0.0, 0.0}, {0.0, 0.5}, 1.0);
  s = Advance(s, 0.01, 5000);
  const double diff = WrapDifference(s.phases[1] - s.phases[0]);
  EXPECT_NEAR(diff, std::asin(0.5), 1e-3);

  // Fine-step adaptive integration of the same pair.
  using State = std::vector<double>;
  State y = {0.0, 0.0};
  auto rhs = [](const State& x, State& dx, double) {
    dx[0] = 0.0 + 0.5 * std::sin(x[1] - x[0]);
    dx[1] = 0.5 + 0.5 * std::sin(x[0] - x[1]);
  };
  boost::numeric::odeint::integrate_adaptive(
      boost::numeric::odeint::make_controlled<
          boost::numeric::odeint::runge_kutta_dopri5<State>>(1e-12, 1e-12),
      rhs, y, 0.0, 50.0, 1e-3);
  EXPECT_NEAR(s.unwrapped[0], y[0], 1e-6);
  EXPECT_NEAR(s.unwrapped[1], y[1], 1e-6);
}

TEST(KuramotoTest, WeakCouplingDoesNotLock) {
  OscillatorState s = *MakeOscillators({0.0, 0.0}, {0.0, 0.5}, 0.3);
  s = Advance(s, 0.01, 5000);
  EXPECT_GT(s.unwrapped[1] - s.unwrapped[0], 2 * M_PI);
}

TEST(CoherenceTest, Corners) {
  EXPECT_NEAR(Coherence({0.4, 0.4, 0.4}).r, 1.0, 1e-15);
  EXPECT_NEAR(Coherence({0.4, 0.4, 0.4}).psi, 0.4, 1e-15);
  EXPECT_NEAR(Coherence({0.0, M_PI}).r, 0.0, 1e-15);
  EXPECT_LT(Coherence({0.0, 1e-3}).r, 1.0 - 1e-12);
}

TEST(CoherenceTest, RandomPhasesAreIncoherent) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 2 * M_PI);
  std::vector<double> phi(10000);
  for (double& p : phi) p = u(rng);
  OrderParameter o = Coherence(phi);
  EXPECT_LT(o.r, 0.05);
  EXPECT_GE(o.r, 0.0);
}

TEST(KuramotoTest, MeanPhaseDriftsAtMeanFrequency) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2 * M_PI), w(-1.0, 1.0);
  std::vector<double> phi(12), om(12);
  for (size_t i = 0; i < 12; ++i) {
    phi[i] = u(rng);
    om[i] = w(rng);
  }
  OscillatorState s = *MakeOscillators(phi, om, 1.5);
  double mean0 = 0.0, wbar = 0.0;
  for (size_t i = 0; i < 12; ++i) {
    mean0 += phi[i] / 12;
    wbar += om[i] / 12;
  }
  s = Advance(s, 0.01, 1000);
  double mean1 = 0.0;
  for (double p : s.unwrapped) mean1 += p / 12;
  EXPECT_NEAR((mean1 - mean0) / 10.0, wbar, 1e-10);
}

TEST(KuramotoTest, IdenticalOscillatorsGainCoherence) {
  int good = 0, total = 0;
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2 * M_PI);
    std::vector<double> phi(16);
    for (double& p : phi) p = u(rng);
    OscillatorState s = *MakeOscillators(phi, std::vector<double>(16, 0.3), 1.0);
    double r = Coherence(s.phases).r;
    for (int k = 0; k < 500; ++k) {
      s = *Step(s, 0.02);
      const double next = Coherence(s.phases).r;
      good += next >= r - 1e-12;
      ++total;
      r = next;
    }
  }
  EXPECT_GE(good, 0.95 * total);
}

TEST(KuramotoTest, MaskCutsCoupling) {
  std::vector<std::vector<double>> none = {{0, 0}, {0, 0}};
  OscillatorState s = *MakeOscillators({0.0, 1.0}, {0.2, 0.2}, 5.0, none);
  s = Advance(s, 0.01, 100);
  EXPECT_NEAR(s.unwrapped[1] - s.unwrapped[0], 1.0, 1e-12);
  std::vector<std::vector<double>> full = {{0, 1}, {1, 0}};
  OscillatorState a = Advance(*MakeOscillators({0.0, 1.0}, {0.2, 0.2}, 5.0, full), 0.01, 100);
  OscillatorState b = Advance(*MakeOscillators({0.0, 1.0}, {0.2, 0.2}, 5.0), 0.01, 100);
  EXPECT_NEAR(a.unwrapped[0], b.unwrapped[0], 1e-12);
  EXPECT_FALSE(MakeOscillators({0.0, 1.0}, {0.2, 0.2}, 5.0, {{0, 1}}).ok());
}

TEST(KuramotoTest, NoiseIsSeeded) {
  OscillatorState s = *MakeOscillators({0.0, 1.0, 2.0}, {0.1, 0.2, 0.3}, 1.0);
  s.noise = 0.2;
  EXPECT_FALSE(Step(s, 0.01).ok());
  std::mt19937_64 r1(5), r2(5);
  OscillatorState a = s, b = s;
  auto ta = Simulate(a, 0.01, 100, 10, &r1);
  auto tb = Simulate(b, 0.01, 100, 10, &r2);
  ASSERT_OK(ta);
  ASSERT_OK(tb);
  EXPECT_EQ(*ta, *tb);
  EXPECT_EQ(ta->size(), 11u);
  EXPECT_EQ((*ta)[0].size(), 5u);  // t, three phases, r
  EXPECT_NE(a.unwrapped[0] - 0.1, 0.0);
}

TEST(KuramotoTest, RejectsBadInput) {
  EXPECT_FALSE(MakeOscillators({}, {}, 1.0).ok());
  EXPECT_FALSE(MakeOscillators({0.0}, {0.0, 1.0}, 1.0).ok());
  EXPECT_FALSE(MakeOscillators({NAN}, {0.0}, 1.0).ok());
  EXPECT_FALSE(Step(*MakeOscillators({0.0}, {0.0}, 1.0), 0.0).ok());
}

TEST(KuramotoTest, TrajectoryCsvHasHeader) {
  OscillatorState s = *MakeOscillators({0.0, 1.0}, {0.0, 0.5}, 1.0);
  auto rows = Simulate(s, 0.1, 5);
  ASSERT_OK(rows);
  const std::string path = ::testing::TempDir() + "/traj.csv";
  ASSERT_OK(WriteTrajectoryCsv(path, *rows));
  absl::StatusOr<Matrix> back = ReadCsv(path);
  ASSERT_OK(back);
  EXPECT_EQ(back->size(), 6u);
  EXPECT_EQ((*back)[5], (*rows)[5]);
}

}  // namespace
}  // namespace leakgame
