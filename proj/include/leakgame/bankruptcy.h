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
#ifndef LEAKGAME_BANKRUPTCY_H_
#define LEAKGAME_BANKRUPTCY_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace leakgame {

struct BankruptcyInstance {
  double estate = 0.0;
  std::vector<double> claims;
};

// Checks estate >= 0 and claims >= 0 (finite, at least one claimant).
// An estate covering every claim is allowed; there is then no contest.
absl::Status ValidateInstance(const BankruptcyInstance& inst);

// Coalitions are bit masks over the claimants, bit i for claimant i, so
// the mask forms need at most 64 claimants.
using Coalition = uint64_t;

// v(S) = min(sum_{i in S} c_i, max(0, E - sum_{j not in S} c_j)).
absl::StatusOr<double> CoalitionWorth(const BankruptcyInstance& inst,
                                      Coalition s);
// Same, with the coalition given as claimant indices.
absl::StatusOr<double> CoalitionWorth(const BankruptcyInstance& inst,
                                      const std::vector<size_t>& members);

struct Allocation {
  std::vector<double> payoffs;
  std::vector<double> min_right;  // v({i})
  std::vector<double> max_right;  // v(N) - v(N \ {i})
  bool approximate = false;
  std::vector<double> std_error;  // per player, zero when exact
};

inline constexpr size_t kExactShapleyLimit = 20;

struct ShapleyOptions {
  uint64_t seed = 0;
  size_t permutations = 20000;  // used above kExactShapleyLimit players
};

// Exact Shapley value by subset enumeration for up to kExactShapleyLimit
// claimants; beyond that, the mean marginal contribution over seeded
// random orders, flagged approximate with per-player standard errors.
absl::StatusOr<Allocation> Shapley(const BankruptcyInstance& inst,
                                   const ShapleyOptions& opts = {});

// Rights for an arbitrary payoff vector, e.g. to check another rule.
absl::StatusOr<Allocation> WithRights(const BankruptcyInstance& inst,
                                      std::vector<double> payoffs);

struct AllocationReport {
  bool efficient = false;        // sum of payoffs = v(N)
  bool within_claims = false;    // 0 <= payoff_i <= c_i
  bool within_rights = false;    // v({i}) <= payoff_i <= v(N) - v(N \ {i})
  std::vector<bool> player_ok;   // both bounds, per player
  bool ok() const { return efficient && within_claims && within_rights; }
};

absl::StatusOr<AllocationReport> ValidateAllocation(
    const BankruptcyInstance& inst, const Allocation& alloc,
    double tol = 1e-9);

// 1 if the rate is positive before time kb and non-positive from kb on,
// else 0. Needs 1 <= kb < rates.size().
absl::StatusOr<double> BankruptcyEvent(const std::vector<double>& rates,
                                       size_t kb);
// Fraction of trajectories showing the event.
absl::StatusOr<double> BankruptcyEventProbability(
    const std::vector<std::vector<double>>& trajectories, size_t kb);

// CSV: first row the estate, second row the claims.
absl::StatusOr<BankruptcyInstance> ReadBankruptcyCsv(const std::string& path);
absl::Status WriteAllocationCsv(const std::string& path,
                                const BankruptcyInstance& inst,
                                const Allocation& alloc);

}  // namespace leakgame

#endif  // LEAKGAME_BANKRUPTCY_H_
