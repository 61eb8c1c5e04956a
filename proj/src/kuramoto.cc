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
#include <complex>

#include "absl/strings/str_cat.h"
#include "leakgame/csv.h"
#include "leakgame/prob.h"

namespace leakgame {
namespace {

constexpr double kTwoPi = 2.0 * M_PI;

std::vector<double> Rates(const OscillatorState& s, const std::vector<double>& phi) {
  const size_t n = phi.size();
  const double k = s.coupling / static_cast<double>(n);
  std::vector<double> out(n);
  if (s.mask.empty()) {
    // Complete graph: sum_j sin(phi_j - phi_i) = N r sin(psi - phi_i).
    double c = 0.0, sn = 0.0;
    for (double p : phi) {
      c += std::cos(p);
      sn += std::sin(p);
    }
    for (size_t i = 0; i < n; ++i) {
      out[i] = s.omegas[i] + k * (sn * std::cos(phi[i]) - c * std::sin(phi[i]));
    }
    return out;
  }
  for (size_t i = 0; i < n; ++i) {
    double u = 0.0;
    for (size_t j = 0; j < n; ++j) {
      if (j != i && s.mask[i][j] != 0.0) u += s.mask[i][j] * std::sin(phi[j] - phi[i]);
    }
    out[i] = s.omegas[i] + k * u;
  }
  return out;
}

}  // namespace

double WrapPhase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double WrapDifference(double d) {
  double w = WrapPhase(d + M_PI) - M_PI;
  return w == -M_PI ? M_PI : w;
}

absl::StatusOr<OscillatorState> MakeOscillators(
    std::vector<double> phases, std::vector<double> omegas, double coupling,
    std::vector<std::vector<double>> mask) {
  const size_t n = phases.size();
  if (n == 0) return ValidationError("need at least one oscillator");
  if (omegas.size() != n) return ShapeError("one natural frequency per phase");
  if (!std::isfinite(coupling)) return ValidationError("coupling must be finite");
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(phases[i]) || !std::isfinite(omegas[i])) {
      return ValidationError("phases and frequencies must be finite");
    }
  }
  if (!mask.empty()) {
    if (mask.size() != n) return ShapeError("mask must be N x N");
    for (const auto& row : mask) {
      if (row.size() != n) return ShapeError("mask must be N x N");
    }
  }
  OscillatorState s;
  s.unwrapped = phases;
  for (double& p : phases) p = WrapPhase(p);
  s.phases = std::move(phases);
  s.omegas = std::move(omegas);
  s.coupling = coupling;
  s.mask = std::move(mask);
  return s;
}

absl::StatusOr<OscillatorState> Step(const OscillatorState& state, double dt,
                                     std::mt19937_64* rng) {
  if (!(dt > 0.0)) return ValidationError("dt must be positive");
  if (state.noise > 0.0 && rng == nullptr) {
    return ValidationError("noise needs a seeded rng");
  }
  const size_t n = state.phases.size();
  const std::vector<double>& y = state.unwrapped;
  auto shifted = [&](const std::vector<double>& k, double h) {
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = y[i] + h * k[i];
    return out;
  };
  const std::vector<double> k1 = Rates(state, y);
  const std::vector<double> k2 = Rates(state, shifted(k1, dt / 2));
  const std::vector<double> k3 = Rates(state, shifted(k2, dt / 2));
  const std::vector<double> k4 = Rates(state, shifted(k3, dt));

  OscillatorState next = state;
  for (size_t i = 0; i < n; ++i) {
    next.unwrapped[i] = y[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  if (state.noise > 0.0) {
    std::normal_distribution<double> z(0.0, state.noise * std::sqrt(dt));
    for (size_t i = 0; i < n; ++i) next.unwrapped[i] += z(*rng);
  }
  for (size_t i = 0; i < n; ++i) next.phases[i] = WrapPhase(next.unwrapped[i]);
  next.time = state.time + dt;
  return next;
}

OrderParameter Coherence(const std::vector<double>& phases) {
  if (phases.empty()) return {0.0, 0.0};
  std::complex<double> z = 0.0;
  for (double p : phases) z += std::polar(1.0, p);
  z /= static_cast<double>(phases.size());
  return {std::min(1.0, std::abs(z)), std::arg(z)};
}

absl::StatusOr<std::vector<std::vector<double>>> Simulate(
    OscillatorState& state, double dt, int steps, int every,
    std::mt19937_64* rng) {
  if (steps < 0 || every < 1) return ValidationError("bad step counts");
  std::vector<std::vector<double>> rows;
  auto record = [&] {
    std::vector<double> row{state.time};
    row.insert(row.end(), state.phases.begin(), state.phases.end());
    row.push_back(Coherence(state.phases).r);
    rows.push_back(std::move(row));
  };
  record();
  for (int k = 1; k <= steps; ++k) {
    absl::StatusOr<OscillatorState> next = Step(state, dt, rng);
    if (!next.ok()) return next.status();
    state = std::move(*next);
    if (k % every == 0) record();
  }
  return rows;
}

absl::Status WriteTrajectoryCsv(const std::string& path,
                                const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return ShapeError("empty trajectory");
  std::vector<std::string> header{"t"};
  for (size_t i = 0; i + 2 < rows[0].size(); ++i) {
    header.push_back(absl::StrCat("phi", i + 1, "_rad"));
  }
  header.push_back("r");
  return WriteCsv(path, header, rows);
}

}  // namespace leakgame
