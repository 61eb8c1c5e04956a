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
#ifndef LEAKGAME_MFG_H_
#define LEAKGAME_MFG_H_

#include <cstddef>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace leakgame {

// Mean-field game on a 1-D or 2-D box, discretized as a controlled Markov
// chain: per step a cell moves one node up or down each axis with
// probabilities
//   up   = tau/dx max(b, 0)  + sigma^2 tau / (2 dx^2)
//   down = tau/dx max(-b, 0) + sigma^2 tau / (2 dx^2)
// and stays otherwise (moves through a wall are suppressed), where b is the
// controlled drift and tau = dt^alpha. The value recursion (HJB) is the
// dynamic program of this chain and the density recursion (FPK) is its
// transpose, so mass is conserved exactly and both updates are monotone.
// For alpha < 1 both recursions carry Grunwald-Letnikov memory.

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  size_t n = 11;  // nodes, including both ends
  double dx() const { return (hi - lo) / static_cast<double>(n - 1); }
  double x(size_t i) const { return lo + dx() * static_cast<double>(i); }
};

struct MfgGrid {
  std::vector<Axis> axes;  // 1 or 2
  double dt = 0.01;
  size_t steps = 10;  // horizon K = steps * dt
  double sigma = 0.0;
  double alpha = 1.0;
  size_t memory = 0;  // Grunwald-Letnikov truncation depth, 0 = full
};

size_t CellCount(const MfgGrid& grid);

enum class DriftKind { kLinear, kTanh };

// Phi(u) = sign * gain * (u - p0), or sign * gain * tanh(u - p0).
struct DriftSpec {
  DriftKind kind = DriftKind::kLinear;
  double gain = 1.0;
  double p0 = 0.0;
  double sign = 1.0;
  double operator()(double u) const;
};

// Running cost per unit time at state x (per axis), control u and density
// m (mass per unit cell volume):
//   constant + sum_d state_weight (x_d - target_d)^2 + congestion m
//   + control_weight (u_min - p0)^2 - control_weight (u_max - p0)^2
// where the control term of a maximizing player enters with a minus sign.
// Terminal cost: terminal_weight sum_d (x_d - target_d)^2.
struct CostSpec {
  double constant = 0.0;
  double state_weight = 0.0;
  std::vector<double> target = {0.0};
  double control_weight = 0.0;
  double congestion = 0.0;
  double terminal_weight = 0.0;
};

enum class GameMode {
  kMin,      // one controller minimizing (1-D)
  kMax,      // one controller maximizing (1-D)
  kMinimax,  // axis 0 controlled by a minimizer, axis 1 by a maximizer
};

struct MfgProblem {
  std::vector<DriftSpec> drift;               // one per axis
  std::vector<std::vector<double>> controls;  // control set per axis
  CostSpec cost;
  GameMode mode = GameMode::kMin;
};

absl::Status ValidateMfg(const MfgProblem& prob, const MfgGrid& grid);

// Values and masses are flattened row-major over the axes (axis 0 slowest).
// Control entries are indices into the control set; in minimax mode the
// index is a * |controls[1]| + b.
struct MfgState {
  std::vector<double> value;
  std::vector<double> density;  // probability mass per cell, sums to 1
  std::vector<int> control;
};

struct HjbStep {
  std::vector<double> value;
  std::vector<int> control;
};

// One backward step: state.value is the value at the next time and
// state.density the mass at the current time. For alpha < 1, `history`
// holds the values already computed, terminal first, ending with
// state.value.
absl::StatusOr<HjbStep> HjbBackwardStep(
    const MfgState& state, const MfgProblem& prob, const MfgGrid& grid,
    const std::vector<std::vector<double>>* history = nullptr);

// One forward step of the mass under state.control. For alpha < 1,
// `history` holds the masses so far, initial first, ending with
// state.density.
absl::StatusOr<std::vector<double>> FpkForwardStep(
    const MfgState& state, const MfgProblem& prob, const MfgGrid& grid,
    const std::vector<std::vector<double>>* history = nullptr);

// Per-cell probabilities of moving to the upper and lower neighbour along
// each axis. A conservative update of masses through cell faces.
struct FaceRates {
  std::vector<std::vector<double>> up;    // [axis][cell]
  std::vector<std::vector<double>> down;  // [axis][cell]
};
absl::StatusOr<std::vector<double>> FpkFaceStep(const std::vector<double>& mass,
                                                const FaceRates& rates,
                                                const MfgGrid& grid);

struct MfgOptions {
  double tol = 1e-8;
  int max_sweeps = 500;
  double damping = 0.3;  // weight of the new density in each sweep
};

struct MfgSolution {
  std::vector<std::vector<double>> values;     // [time 0..steps][cell]
  std::vector<std::vector<double>> densities;  // [time 0..steps][cell]
  std::vector<std::vector<int>> policy;        // [time 0..steps-1][cell]
  int sweeps = 0;
  bool converged = false;
  std::vector<double> residuals;  // L1 density change per sweep (max over t)
};

// Fixed point of full backward HJB passes and forward FPK passes. The
// density used by the HJB pass is relaxed toward each new FPK output.
absl::StatusOr<MfgSolution> SolveMfg(const MfgProblem& prob,
                                     const MfgGrid& grid,
                                     const std::vector<double>& initial_mass,
                                     const MfgOptions& opts = {});

// First moment of a mass vector along an axis.
double AxisMean(const std::vector<double>& mass, const MfgGrid& grid,
                size_t axis);

struct SaddleResult {
  size_t row;  // minimizer's choice
  size_t col;  // maximizer's choice
  double value;
  bool verified;  // pi(r*, c) <= pi(r*, c*) <= pi(r, c*) for all r, c
};

// Pure-strategy saddle of a payoff matrix (rows minimize, columns
// maximize). Returns the minimax row and maximin column.
absl::StatusOr<SaddleResult> SaddleCheck(
    const std::vector<std::vector<double>>& payoff);

// min over cells of |v_a + v_b|; zero flags a zero-sum pair.
absl::StatusOr<double> ValueSumNonzero(const std::vector<double>& v_a,
                                       const std::vector<double>& v_b);

// sum_{n=0}^{N-2} exp(-rho n) (F[n+1] - F[n])^2.
absl::StatusOr<double> StabilityCriterion(const std::vector<double>& f,
                                          double rho);

}  // namespace leakgame

#endif  // LEAKGAME_MFG_H_
