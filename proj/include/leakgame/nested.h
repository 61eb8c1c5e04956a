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
#ifndef LEAKGAME_NESTED_H_
#define LEAKGAME_NESTED_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "leakgame/bankruptcy.h"

namespace leakgame {

// Nested games over the bankruptcy horizon [K_b, K].
//
// Second level: a population of Bobs plays a discrete mean-field game on
// a grid of claim levels. A Bob at level y picking claim t collects its
// Shapley share of a bankruptcy game in which the other L0 - 1 coalition
// members claim the belief mean, the L - L0 outsiders claim a fixed
// level, and the estate is (1 - lambda) times the anticipated total claim.
// It pays kappa (t - y)^2 to move, gamma t^2 to claim, and
// envy lambda (t - mean)^2 for straying from the belief mean, so the
// dissatisfaction rate sets how strongly Bobs react to each other. Next
// level is t +- sigma.
//
// The belief (the law the Bobs plan against) and the realized law (the
// law their best responses produce) must agree; the consensus residual is
// the mean over k > K_b of KL(realized_k || belief_k). The bilevel solver
// closes this gap with ADMM; the trilevel one replaces ADMM by a phase
// game among the L0 coalition members whose coherence r gates the belief
// step.
enum class LevelNoise { kBernoulli, kGaussian };

struct NestedConfig {
  int kb = 6;
  int k = 60;
  int l = 9;   // all Bobs
  int l0 = 5;  // coalition
  double lambda = 0.3;
  double sigma = 0.05;
  LevelNoise noise = LevelNoise::kBernoulli;
  double admm_rho = 1.0;
  double tol = 1e-6;
  int max_iter = 500;

  int levels = 33;
  double theta_lo = 0.0;
  double theta_hi = 1.0;
  double kappa = 0.5;
  double gamma = 0.2;
  double envy = 1.0;  // weight of lambda (t - belief mean)^2
  // Weights over the K - K_b + 1 times; empty means a point mass at K_b.
  std::vector<double> major_measure;

  double coupling = 1.0;     // D
  double phase_dt = 0.0;     // 0 picks min(0.05, 0.1 / |D|)
  int phase_steps = 10;      // phase-game steps per outer iteration
  double coherence_tol = 1e-3;
};

absl::Status ValidateNestedConfig(const NestedConfig& cfg);

// Shapley share of a claimant with claim `theta` when l0 - 1 others claim
// `theta_bar`, l - l0 outsiders claim `outside`, and the estate is
// (1 - lambda) times the total with `theta_bar` in place of `theta`.
// Subsets are enumerated by how many of each kind they hold,
// O(l0 (l - l0)).
double RepresentativeShare(double theta, double theta_bar, double outside,
                           int l, int l0, double lambda);

// Elementary operations at the granularity of one coalition member.
struct OpCounts {
  int64_t hjb = 0;
  int64_t fpk = 0;
  int64_t consensus = 0;  // ADMM primal/dual, bilevel only
  int64_t sort = 0;       // N ceil(log2 N) per ordering of the coalition
  int64_t pairwise = 0;   // N^2: envy matrix or phase coupling
  int64_t total() const { return hjb + fpk + consensus + sort + pairwise; }
};

struct DiscreteMfgState {
  std::vector<double> levels;
  std::vector<std::vector<double>> utility;   // U2[time][level]
  std::vector<std::vector<double>> pmf;       // realized law [time][level]
  std::vector<std::vector<double>> belief;    // [time][level]
  std::vector<std::vector<double>> controls;  // claim chosen [time][level]
  std::vector<double> major_measure;          // [time]
  // Outer layer: the coalition estate at time k is estate * m_k with m_k
  // the realized mean claim over theta_hi; allocations are Shapley.
  std::vector<double> estate;                    // [time]
  std::vector<std::vector<double>> allocations;  // [time][member]
  double outer_objective = 0.0;  // sum_k mu_k (claims_k - estate_k)
};

struct PhaseGameState {
  std::vector<std::vector<double>> phases;  // [iteration][oscillator]
  std::vector<double> coherence;            // r per iteration
  std::vector<double> pdf;                  // over kPhaseBins bins of [0, 2 pi)
  std::vector<double> major_measure;        // over oscillators
  std::vector<double> utility;              // U3 per oscillator
};

inline constexpr int kPhaseBins = 64;

struct NestedResult {
  DiscreteMfgState mfg;
  PhaseGameState phase;  // trilevel only
  int iterations = 0;
  bool converged = false;
  bool smoothed = false;  // a KL term needed the 1e-12 floor
  std::vector<double> residuals;
  OpCounts ops;
};

struct NestedOptions {
  uint64_t seed = 0;
  // Starting belief; empty means the initial law at every time.
  std::vector<std::vector<double>> initial_belief;
};

// Law at K_b: Bobs start at their own claims, normalized by the largest,
// each smeared over the levels with width 0.05.
std::vector<double> InitialLaw(const NestedConfig& cfg,
                               const std::vector<double>& claims);

// `inst` holds the L0 coalition claims and the outer estate.
absl::StatusOr<NestedResult> SolveBilevelAdmm(const NestedConfig& cfg,
                                              const BankruptcyInstance& inst,
                                              const NestedOptions& opts = {});
absl::StatusOr<NestedResult> SolveTrilevelKuramoto(
    const NestedConfig& cfg, const BankruptcyInstance& inst,
    const NestedOptions& opts = {});

// U3: minus the mu-weighted mean absolute wrapped phase gap, per oscillator.
std::vector<double> PhaseUtility(const std::vector<double>& phases,
                                 const std::vector<double>& mu);
// Von Mises kernel density on kPhaseBins bins; integrates to 1.
std::vector<double> PhaseDensity(const std::vector<double>& phases,
                                 double concentration = 8.0);

// Least squares ops ~ a N + b N log2 N + c N^2.
struct ComplexityFit {
  double a = 0.0, b = 0.0, c = 0.0;
  double r2 = 0.0;
  double max_residual = 0.0;
};
absl::StatusOr<ComplexityFit> FitComplexity(const std::vector<double>& n,
                                            const std::vector<double>& ops);

// Per-iteration op counts of each solver at coalition size n.
OpCounts BilevelOpsPerIteration(int n);
OpCounts TrilevelOpsPerIteration(int n);

// Empirical CDF as (value, fraction of runs <= value) at each distinct value.
absl::StatusOr<std::vector<std::pair<double, double>>> IterationCdf(
    const std::vector<double>& runs);
// Fraction of the quantile levels q = 1/m, ..., 1 at which the q-quantile
// of `a` is <= that of `b`.
double QuantileDominance(std::vector<double> a, std::vector<double> b,
                         int m = 20);

struct RunLogRow {
  uint64_t seed = 0;
  std::string level;  // "bilevel" or "trilevel"
  double lambda = 0.0;
  int iterations = 0;
  double residual = 0.0;
  int64_t ops = 0;
};
absl::Status WriteRunLog(const std::string& path,
                         const std::vector<RunLogRow>& rows);
absl::Status WriteCdfCsv(const std::string& path,
                         const std::vector<std::pair<double, double>>& cdf);

}  // namespace leakgame

#endif  // LEAKGAME_NESTED_H_
