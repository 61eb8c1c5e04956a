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
#ifndef LEAKGAME_FUZZY_H_
#define LEAKGAME_FUZZY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace leakgame {

// Fuzzy clustering of distributions under the KL divergence:
//   J(U, C) = sum_i sum_j mu_ij^m KL(s_j || c_i)   (natural log)
//             + l2_penalty sum_i ||c_i - uniform||^2.
// The penalty is the optional convex hook for weighted variants; it is
// zero by default.
struct FuzzyInstance {
  std::vector<std::vector<double>> data;  // k points on the simplex
  size_t clusters = 2;                    // q
  double fuzzifier = 2.0;                 // m > 1
  double l2_penalty = 0.0;
};

struct FuzzyState {
  std::vector<std::vector<double>> memberships;  // q x k, columns sum to 1
  std::vector<std::vector<double>> centers;      // q points on the simplex
};

// Requires 1 <= q < k; q = 1 is accepted as the single-cluster reduction.
absl::Status ValidateFuzzy(const FuzzyInstance& inst);

// Terms with mu_ij = 0 contribute nothing; a center that is zero where a
// point with positive membership is positive is a domain error.
absl::StatusOr<double> FuzzyObjective(const FuzzyInstance& inst,
                                      const FuzzyState& state);

// mu_ij proportional to d_ij^(-1/(m-1)) per column; a point at zero
// distance (KL <= 1e-14) from some centers is split evenly among them.
absl::StatusOr<std::vector<std::vector<double>>> UpdateMemberships(
    const FuzzyInstance& inst, const std::vector<std::vector<double>>& centers);

// Weighted means with weights mu_ij^m; with a penalty, the per-coordinate
// stationarity condition is a quadratic solved under a bisected
// normalization multiplier. An all-zero membership row is a validation
// error.
absl::StatusOr<std::vector<std::vector<double>>> UpdateCenters(
    const FuzzyInstance& inst, const std::vector<std::vector<double>>& u);

struct FuzzyOptions {
  double tol = 1e-10;
  int max_iter = 500;
  uint64_t seed = 0;
  int restarts = 1;  // seeds seed, seed + 1, ...; the lowest J wins
};

struct FuzzyFit {
  FuzzyState state;
  std::vector<double> trace;  // J at the start and after every alternation
  int iterations = 0;
  bool converged = false;
};

absl::StatusOr<FuzzyFit> FitFuzzy(const FuzzyInstance& inst,
                                  const FuzzyOptions& opts = {});

absl::StatusOr<std::vector<std::vector<double>>> ReadFuzzyData(
    const std::string& path);
// Writes <prefix>_centers.csv and <prefix>_memberships.csv.
absl::Status WriteFuzzyState(const std::string& prefix, const FuzzyState& s);

}  // namespace leakgame

#endif  // LEAKGAME_FUZZY_H_
