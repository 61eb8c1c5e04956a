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
#include "leakgame/bankruptcy.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "leakgame/csv.h"
#include "shapley_oracle.h"
#include "test_util.h"

namespace leakgame {
namespace {

using ::leakgame::testing::PermutationShapley;
using ::leakgame::testing::RandomBankruptcy;
using ::testing::ElementsAre;

TEST(CoalitionWorthTest, TwoCreditorValues) {
  BankruptcyInstance inst{100.0, {60.0, 80.0}};
  EXPECT_EQ(*CoalitionWorth(inst, Coalition{0}), 0.0);
  EXPECT_EQ(*CoalitionWorth(inst, Coalition{1}), 20.0);
  EXPECT_EQ(*CoalitionWorth(inst, Coalition{2}), 40.0);
  EXPECT_EQ(*CoalitionWorth(inst, Coalition{3}), 100.0);
  EXPECT_EQ(*CoalitionWorth(inst, std::vector<size_t>{1}), 40.0);
}

TEST(CoalitionWorthTest, NoContestGivesClaims) {
  BankruptcyInstance inst{500.0, {10.0, 20.0, 30.0}};
  for (Coalition s = 0; s < 8; ++s) {
    double want = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (s >> i & 1) want += inst.claims[i];
    }
    EXPECT_EQ(*CoalitionWorth(inst, s), want);
  }
}

TEST(CoalitionWorthTest, UnknownPlayerIsValidationError) {
  BankruptcyInstance inst{10.0, {5.0, 6.0}};
  EXPECT_EQ(CoalitionWorth(inst, std::vector<size_t>{2}).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(CoalitionWorth(inst, Coalition{4}).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(CoalitionWorth({-1.0, {1.0}}, Coalition{1}).ok());
  EXPECT_FALSE(CoalitionWorth({1.0, {}}, Coalition{0}).ok());
}

TEST(CoalitionWorthTest, MonotoneAndSuperadditive) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    BankruptcyInstance inst = RandomBankruptcy(6, rng);
    for (Coalition s = 0; s < 64; ++s) {
      for (Coalition t = 0; t < 64; ++t) {
        const double vs = *CoalitionWorth(inst, s), vt = *CoalitionWorth(inst, t);
        if ((s & t) == s) EXPECT_LE(vs, vt + 1e-12);
        if ((s & t) == 0) EXPECT_LE(vs + vt, *CoalitionWorth(inst, s | t) + 1e-9);
      }
    }
  }
}

TEST(ShapleyTest, TwoCreditorsExactly) {
  absl::StatusOr<Allocation> a = Shapley({100.0, {60.0, 80.0}});
  ASSERT_OK(a);
  EXPECT_THAT(a->payoffs, ElementsAre(40.0, 60.0));
  EXPECT_FALSE(a->approximate);
  EXPECT_THAT(a->min_right, ElementsAre(20.0, 40.0));
  EXPECT_THAT(a->max_right, ElementsAre(60.0, 80.0));
}

TEST(ShapleyTest, Corners) {
  EXPECT_THAT(Shapley({5.0, {8.0}})->payoffs, ElementsAre(5.0));
  EXPECT_THAT(Shapley({0.0, {3.0, 4.0, 5.0}})->payoffs, ElementsAre(0.0, 0.0, 0.0));
  EXPECT_THAT(Shapley({100.0, {10.0, 20.0}})->payoffs, ElementsAre(10.0, 20.0));
}

TEST(ShapleyTest, MatchesPermutationEnumeration) {
  std::mt19937_64 rng(5);
  for (size_t n = 1; n <= 8; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      BankruptcyInstance inst = RandomBankruptcy(n, rng);
      std::vector<double> want = PermutationShapley(inst);
      Allocation got = *Shapley(inst);
      for (size_t i = 0; i < n; ++i) EXPECT_NEAR(got.payoffs[i], want[i], 1e-9);
    }
  }
}

TEST(ShapleyTest, RandomInstancesSatisfyAllConditions) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<size_t> size(1, 12);
  for (int trial = 0; trial < 1000; ++trial) {
    BankruptcyInstance inst = RandomBankruptcy(size(rng), rng);
    Allocation a = *Shapley(inst);
    AllocationReport r = *ValidateAllocation(inst, a);
    EXPECT_TRUE(r.efficient) << trial;
    EXPECT_TRUE(r.within_claims) << trial;
    EXPECT_TRUE(r.within_rights) << trial;
    const double total = std::accumulate(inst.claims.begin(), inst.claims.end(), 0.0);
    const double paid = std::accumulate(a.payoffs.begin(), a.payoffs.end(), 0.0);
    EXPECT_NEAR(paid, std::min(inst.estate, total), 1e-9);
  }
}

TEST(ShapleyTest, ScalesWithTheInstance) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    BankruptcyInstance inst = RandomBankruptcy(7, rng);
    BankruptcyInstance big = inst;
    const double lambda = 3.7;
    big.estate *= lambda;
    for (double& c : big.claims) c *= lambda;
    Allocation a = *Shapley(inst), b = *Shapley(big);
    for (size_t i = 0; i < 7; ++i) {
      EXPECT_NEAR(b.payoffs[i], lambda * a.payoffs[i], 1e-9 * std::max(1.0, b.payoffs[i]));
    }
  }
}

TEST(ShapleyTest, LargeInstancesAreSampled) {
  BankruptcyInstance sym{50.0, std::vector<double>(25, 4.0)};
  absl::StatusOr<Allocation> a = Shapley(sym, {.seed = 3, .permutations = 4000});
  ASSERT_OK(a);
  EXPECT_TRUE(a->approximate);
  for (size_t i = 0; i < 25; ++i) {
    EXPECT_NEAR(a->payoffs[i], 2.0, 5.0 * a->std_error[i] + 1e-12);
  }
  EXPECT_TRUE(ValidateAllocation(sym, *a)->ok());

  std::mt19937_64 rng(4);
  BankruptcyInstance inst = RandomBankruptcy(30, rng);
  absl::StatusOr<Allocation> s = Shapley(inst, {.seed = 1, .permutations = 2000});
  ASSERT_OK(s);
  EXPECT_TRUE(s->approximate);
  AllocationReport r = *ValidateAllocation(inst, *s);
  EXPECT_TRUE(r.efficient);
  // Bankruptcy games are convex, so every sampled marginal lies between
  // the rights and so does their mean.
  EXPECT_TRUE(r.within_rights);
  for (double e : s->std_error) EXPECT_GT(e, 0.0);
  EXPECT_EQ(s->payoffs, Shapley(inst, {.seed = 1, .permutations = 2000})->payoffs);
}

TEST(ValidateAllocationTest, EqualSplitAndViolations) {
  BankruptcyInstance inst{100.0, {60.0, 80.0}};
  AllocationReport r = *ValidateAllocation(inst, *WithRights(inst, {50.0, 50.0}));
  EXPECT_TRUE(r.efficient);
  EXPECT_TRUE(r.within_claims);
  EXPECT_TRUE(r.within_rights);

  r = *ValidateAllocation(inst, *WithRights(inst, {70.0, 30.0}));
  EXPECT_TRUE(r.efficient);
  EXPECT_FALSE(r.within_claims);
  EXPECT_FALSE(r.within_rights);
  EXPECT_THAT(r.player_ok, ElementsAre(false, false));

  r = *ValidateAllocation(inst, *WithRights(inst, {40.0, 50.0}));
  EXPECT_FALSE(r.efficient);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(WithRights(inst, {1.0}).ok());
}

TEST(BankruptcyEventTest, Corners) {
  EXPECT_EQ(*BankruptcyEvent({0.3, 0.2, 0.4, 0.1, 0.5}, 3), 0.0);
  EXPECT_EQ(*BankruptcyEvent({0.3, 0.2, 0.4, 0.0, 0.0}, 3), 1.0);
  EXPECT_EQ(*BankruptcyEvent({0.3, 0.0, 0.4, 0.0, 0.0}, 3), 0.0);
  EXPECT_EQ(BankruptcyEvent({0.3, 0.2}, 2).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(BankruptcyEvent({0.3, 0.2}, 0).ok());
  EXPECT_FALSE(BankruptcyEventProbability({}, 1).ok());
}

TEST(BankruptcyEventTest, MatchesBernoulliProduct) {
  const size_t len = 10, kb = 4;
  std::vector<double> keep = {0.95, 0.9, 0.97, 0.92};          // rate stays > 0
  std::vector<double> drop = {0.8, 0.9, 0.85, 0.95, 0.9, 0.99};  // rate hits 0
  double want = 1.0;
  for (double p : keep) want *= p;
  for (double p : drop) want *= p;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> traj(10000, std::vector<double>(len));
  for (auto& t : traj) {
    for (size_t k = 0; k < len; ++k) {
      const bool positive = k < kb ? u(rng) < keep[k] : u(rng) >= drop[k - kb];
      t[k] = positive ? 0.1 + u(rng) : 0.0;
    }
  }
  const double got = *BankruptcyEventProbability(traj, kb);
  const double sd = std::sqrt(want * (1 - want) / traj.size());
  EXPECT_NEAR(got, want, 3 * sd);
}

TEST(BankruptcyCsvTest, RoundTrip) {
  const std::string path = ::testing::TempDir() + "/bk.csv";
  ASSERT_OK(WriteText(path, "# estate then claims\n100\n60,80\n"));
  absl::StatusOr<BankruptcyInstance> inst = ReadBankruptcyCsv(path);
  ASSERT_OK(inst);
  EXPECT_EQ(inst->estate, 100.0);
  EXPECT_THAT(inst->claims, ElementsAre(60.0, 80.0));
  const std::string out = ::testing::TempDir() + "/alloc.csv";
  ASSERT_OK(WriteAllocationCsv(out, *inst, *Shapley(*inst)));
  absl::StatusOr<Matrix> m = ReadCsv(out);
  ASSERT_OK(m);
  ASSERT_EQ(m->size(), 2u);
  EXPECT_EQ((*m)[0][2], 40.0);
  EXPECT_EQ((*m)[1][2], 60.0);
  EXPECT_EQ((*m)[1][6], 1.0);

  ASSERT_OK(WriteText(path, "100,1\n60,80\n"));
  EXPECT_FALSE(ReadBankruptcyCsv(path).ok());
  ASSERT_OK(WriteText(path, "100\n60,-80\n"));
  EXPECT_FALSE(ReadBankruptcyCsv(path).ok());
  std::remove(path.c_str());
  std::remove(out.c_str());
}

}  // namespace
}  // namespace leakgame
