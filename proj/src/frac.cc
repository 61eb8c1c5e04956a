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
#include "leakgame/frac.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "leakgame/prob.h"

namespace leakgame {
namespace {

constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// Valid for x >= 0.5.
double Lanczos(double x) {
  x -= 1.0;
  double a = kLanczos[0];
  const double t = x + kLanczosG + 0.5;
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (x + i);
  return std::sqrt(2.0 * M_PI) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

}  // namespace

absl::Status ValidateSignal(const FracSignal& f) {
  if (f.samples.size() < 2) return ShapeError("need at least 2 samples");
  if (!(f.dt > 0.0)) return ValidationError("dt must be positive");
  if (!(f.alpha >= 0.0 && f.alpha <= 1.0)) {
    return ValidationError(absl::StrCat("alpha ", f.alpha, " not in [0, 1]"));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> GammaFn(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    return DomainError(absl::StrCat("Gamma(", x, ") is not supported"));
  }
  if (x < 0.5) return Lanczos(x + 1.0) / x;
  return Lanczos(x);
}

std::vector<double> GrunwaldWeights(double alpha, size_t n) {
  std::vector<double> w(n);
  if (n == 0) return w;
  w[0] = 1.0;
  for (size_t j = 1; j < n; ++j) {
    w[j] = w[j - 1] * (1.0 - (alpha + 1.0) / static_cast<double>(j));
  }
  return w;
}

absl::StatusOr<std::vector<double>> FracDerivative(const FracSignal& f,
                                                   size_t memory) {
  absl::Status s = ValidateSignal(f);
  if (!s.ok()) return s;
  const size_t n = f.samples.size();
  const std::vector<double> w = GrunwaldWeights(f.alpha, n);
  const double scale = std::pow(f.dt, -f.alpha);
  const double f0 = f.samples[0];
  std::vector<double> out(n, 0.0);
  for (size_t k = 1; k < n; ++k) {
    size_t top = memory > 0 ? std::min(k, memory) : k;
    double acc = 0.0;
    for (size_t j = 0; j <= top; ++j) acc += w[j] * (f.samples[k - j] - f0);
    out[k] = scale * acc;
  }
  if (f.alpha == 1.0) out[0] = (f.samples[1] - f0) / f.dt;
  return out;
}

absl::StatusOr<std::vector<double>> Gradient(const std::vector<double>& field,
                                             double dx) {
  const size_t n = field.size();
  if (n < 3) return ShapeError("gradient needs at least 3 grid points");
  if (!(dx > 0.0)) return ValidationError("dx must be positive");
  std::vector<double> g(n);
  for (size_t i = 1; i + 1 < n; ++i) g[i] = (field[i + 1] - field[i - 1]) / (2 * dx);
  g[0] = (-3 * field[0] + 4 * field[1] - field[2]) / (2 * dx);
  g[n - 1] = (3 * field[n - 1] - 4 * field[n - 2] + field[n - 3]) / (2 * dx);
  return g;
}

absl::StatusOr<std::vector<double>> FracGradient(
    const std::vector<double>& field,
    const std::vector<std::vector<double>>& history, double alpha, double dx,
    double dt) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    return ValidationError("alpha not in [0, 1]");
  }
  if (!(dt > 0.0)) return ValidationError("dt must be positive");
  for (const auto& h : history) {
    if (h.size() != field.size()) {
      return ShapeError("history field size differs from the present field");
    }
  }
  absl::StatusOr<std::vector<double>> now = Gradient(field, dx);
  if (!now.ok()) return now.status();
  const size_t n = history.size();  // present sample is index n
  const double beta = 1.0 - alpha;
  if (beta == 0.0 || n == 0) {
    if (beta == 0.0) return now;
    // A single sample carries no time extent to integrate over.
    return std::vector<double>(field.size(), 0.0);
  }

  // Product-trapezoid weights for the Riemann-Liouville integral of order
  // beta over [0, n dt], evaluated at the right end.
  auto p = [beta](double m) { return std::pow(m, beta + 1.0); };
  const double nn = static_cast<double>(n);
  std::vector<double> a(n + 1);
  a[0] = p(nn - 1.0) - (nn - beta - 1.0) * std::pow(nn, beta);
  for (size_t j = 1; j < n; ++j) {
    const double m = static_cast<double>(n - j);
    a[j] = p(m + 1.0) - 2.0 * p(m) + p(m - 1.0);
  }
  a[n] = 1.0;
  absl::StatusOr<double> g2 = GammaFn(beta + 2.0);
  if (!g2.ok()) return g2.status();
  const double pref = std::pow(dt, beta) / *g2;

  std::vector<double> out(field.size(), 0.0);
  for (size_t j = 0; j < n; ++j) {
    absl::StatusOr<std::vector<double>> gj = Gradient(history[j], dx);
    if (!gj.ok()) return gj.status();
    for (size_t i = 0; i < out.size(); ++i) out[i] += a[j] * (*gj)[i];
  }
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = pref * (out[i] + a[n] * (*now)[i]);
  }
  return out;
}

}  // namespace leakgame
