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
#ifndef LEAKGAME_FRAC_H_
#define LEAKGAME_FRAC_H_

#include <cstddef>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace leakgame {

// Uniformly sampled signal f(k dt), k = 0..n-1, with derivative order alpha.
struct FracSignal {
  std::vector<double> samples;
  double dt = 1.0;
  double alpha = 1.0;
};

absl::Status ValidateSignal(const FracSignal& f);

// Gamma function for x > 0 (Lanczos, g = 7, n = 9).
absl::StatusOr<double> GammaFn(double x);

// w_0 = 1, w_j = w_{j-1} (1 - (alpha + 1) / j): the coefficients of
// (1 - z)^alpha.
std::vector<double> GrunwaldWeights(double alpha, size_t n);

// Caputo-type derivative by the Grunwald-Letnikov sum
//   D[k] = dt^-alpha sum_{j=0..k} w_j (f[k-j] - f[0]).
// alpha = 1 gives the first difference (forward at k = 0), alpha = 0 gives
// f - f[0]. A positive memory depth truncates the sum to j <= depth.
absl::StatusOr<std::vector<double>> FracDerivative(const FracSignal& f,
                                                   size_t memory = 0);

// Fractional gradient of a field on a uniform 1-D grid with spacing dx.
// `history` holds the past fields in time order, oldest first; `field` is
// the present one. The spatial gradient (central inside, second-order
// one-sided at the ends) is convolved in time with the kernel
//   (t - s)^-alpha / Gamma(1 - alpha)
// by product-trapezoid weights. alpha = 1 returns the plain gradient.
absl::StatusOr<std::vector<double>> FracGradient(
    const std::vector<double>& field,
    const std::vector<std::vector<double>>& history, double alpha, double dx,
    double dt);

// Second-order finite-difference gradient on a uniform grid.
absl::StatusOr<std::vector<double>> Gradient(const std::vector<double>& field,
                                             double dx);

}  // namespace leakgame

#endif  // LEAKGAME_FRAC_H_
