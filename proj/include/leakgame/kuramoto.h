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
#ifndef LEAKGAME_KURAMOTO_H_
#define LEAKGAME_KURAMOTO_H_

#include <random>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace leakgame {

// Phase oscillators with mean-field coupling
//   dphi_i/dt = omega_i + (D/N) sum_j A_ij sin(phi_j - phi_i) + noise.
// A is all ones unless a mask is given.
struct OscillatorState {
  std::vector<double> phases;     // wrapped to [0, 2 pi)
  std::vector<double> unwrapped;  // same phases without wrapping
  std::vector<double> omegas;
  double coupling = 0.0;  // D
  double noise = 0.0;     // zeta: Gaussian increments of sd noise * sqrt(dt)
  std::vector<std::vector<double>> mask;  // optional N x N, diagonal unused
  double time = 0.0;
};

absl::StatusOr<OscillatorState> MakeOscillators(
    std::vector<double> phases, std::vector<double> omegas, double coupling,
    std::vector<std::vector<double>> mask = {});

// Wraps to [0, 2 pi).
double WrapPhase(double phi);
// Wraps to (-pi, pi].
double WrapDifference(double d);

// One RK4 step of the deterministic part, then the noise increment when
// noise > 0 (which needs an rng).
absl::StatusOr<OscillatorState> Step(const OscillatorState& state, double dt,
                                     std::mt19937_64* rng = nullptr);

struct OrderParameter {
  double r;
  double psi;
};
// r exp(i psi) = (1/N) sum_j exp(i phi_j).
OrderParameter Coherence(const std::vector<double>& phases);

// Rows (t, phi_1..phi_N, r) every `every` steps, first row at the start.
absl::StatusOr<std::vector<std::vector<double>>> Simulate(
    OscillatorState& state, double dt, int steps, int every = 1,
    std::mt19937_64* rng = nullptr);
absl::Status WriteTrajectoryCsv(const std::string& path,
                                const std::vector<std::vector<double>>& rows);

}  // namespace leakgame

#endif  // LEAKGAME_KURAMOTO_H_
