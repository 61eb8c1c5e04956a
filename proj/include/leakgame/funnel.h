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
#ifndef LEAKGAME_FUNNEL_H_
#define LEAKGAME_FUNNEL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "leakgame/prob.h"

namespace leakgame {

enum class UtilityMode {
  kRate,  // I(X;Y) >= bound
  kGap,   // I(S;X) - I(S;Y) <= bound
};

struct FunnelProblem {
  JointPmf p_sx;  // rows S, columns X
  size_t y_size = 2;
  UtilityMode mode = UtilityMode::kRate;
  double bound = 0.0;  // bits
};

struct FunnelOptions {
  double tol = 1e-9;
  int max_iter = 5000;
  uint64_t seed = 0;
  std::optional<Channel> init;  // replaces the seeded starts
  std::vector<Channel> extra_starts;  // added to the seeded starts
  // Rows whose leakage contribution p(x) KL(P(S|x) || P(S)) falls below
  // this are not header rows.
  double header_threshold = 1e-9;
};

struct FunnelTracePoint {
  int iter;
  double leakage;
  double utility;
};

struct FunnelSolution {
  Channel channel;
  double leakage;  // I(S;Y)
  double utility;  // I(X;Y)
  int iterations = 0;
  bool converged = false;
  std::vector<FunnelTracePoint> trace;
};

absl::Status ValidateProblem(const FunnelProblem& prob);

// Inputs x with p(x) KL(P(S|x) || P(S)) > threshold.
std::vector<size_t> HeaderRows(const JointPmf& p_sx, double threshold);

// Leakage I(S;Y) and utility I(X;Y) of a channel, in bits.
struct FunnelStats {
  double leakage;
  double utility;
};
absl::StatusOr<FunnelStats> Evaluate(const JointPmf& p_sx, const Channel& ch);

// Majorize-minimize solver. Each agent (input row) updates its own row in
// closed exponential form from the shared posterior P(Y|S) and output law;
// the constraint multiplier is found by bisection. Several starts run in
// lockstep and the best feasible iterate is returned. Every iterate is
// feasible and the trace leakage is non-increasing.
absl::StatusOr<FunnelSolution> SolveFunnel(const FunnelProblem& prob,
                                           const FunnelOptions& opts = {});

// Coordinate-wise local search: move mass between two outputs of one row,
// keep the move if it stays feasible and lowers leakage, halve the move
// size when a sweep finds nothing.
absl::StatusOr<FunnelSolution> GreedyBaseline(const FunnelProblem& prob,
                                              const FunnelOptions& opts = {});

struct TradeoffPoint {
  double bound;
  double leakage;
  double utility;
  bool ok;
  std::string error;
};

// Rate-mode sweep over ascending bounds. Failures are marked and the sweep
// continues. Points are solved from the largest bound down, and each solve
// also starts from the channel found for the next larger bound, which is
// feasible for the smaller one; this keeps the curve monotone.
absl::StatusOr<std::vector<TradeoffPoint>> TradeoffSweep(
    const JointPmf& p_sx, size_t y_size, const std::vector<double>& bounds,
    const FunnelOptions& opts = {});

// Reference minimum for 2x2 rate-mode problems: one channel row walks a
// grid of the given step, the other is placed on the constraint boundary
// by bisection. Used for loss reporting.
absl::StatusOr<double> BinaryGridOptimum(const JointPmf& p_sx, double rate,
                                         double step = 0.005);

}  // namespace leakgame

#endif  // LEAKGAME_FUNNEL_H_
