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
#include "leakgame/mfg.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "leakgame/frac.h"
#include "leakgame/prob.h"

namespace leakgame {
namespace {

constexpr double kTieTol = 1e-13;

double Tau(const MfgGrid& grid) { return std::pow(grid.dt, grid.alpha); }

double CellVolume(const MfgGrid& grid) {
  double v = 1.0;
  for (const Axis& a : grid.axes) v *= a.dx();
  return v;
}

// Per-axis multi-index helpers; axis 0 is the slowest.
struct Layout {
  std::vector<size_t> n;
  std::vector<size_t> stride;
  explicit Layout(const MfgGrid& grid) {
    for (const Axis& a : grid.axes) n.push_back(a.n);
    stride.assign(n.size(), 1);
    for (size_t d = n.size(); d-- > 1;) stride[d - 1] = stride[d] * n[d];
  }
  size_t Coord(size_t cell, size_t d) const { return (cell / stride[d]) % n[d]; }
};

struct Moves {
  double up[2] = {0.0, 0.0};
  double down[2] = {0.0, 0.0};
  double Exit() const { return up[0] + up[1] + down[0] + down[1]; }
};

Moves MovesAt(const MfgGrid& grid, const Layout& lay, size_t cell,
              const double* drift) {
  const double tau = Tau(grid);
  Moves mv;
  for (size_t d = 0; d < grid.axes.size(); ++d) {
    const double dx = grid.axes[d].dx();
    const double diff = grid.sigma * grid.sigma * tau / (2.0 * dx * dx);
    const size_t i = lay.Coord(cell, d);
    if (i + 1 < lay.n[d]) mv.up[d] = tau / dx * std::max(drift[d], 0.0) + diff;
    if (i > 0) mv.down[d] = tau / dx * std::max(-drift[d], 0.0) + diff;
  }
  return mv;
}

double Expected(const std::vector<double>& v, const Layout& lay, size_t cell,
                const Moves& mv) {
  double e = (1.0 - mv.Exit()) * v[cell];
  for (size_t d = 0; d < lay.n.size(); ++d) {
    if (mv.up[d] > 0.0) e += mv.up[d] * v[cell + lay.stride[d]];
    if (mv.down[d] > 0.0) e += mv.down[d] * v[cell - lay.stride[d]];
  }
  return e;
}

double StateCost(const MfgProblem& prob, const MfgGrid& grid,
                 const Layout& lay, size_t cell, double weight) {
  double c = 0.0;
  for (size_t d = 0; d < grid.axes.size(); ++d) {
    const double x = grid.axes[d].x(lay.Coord(cell, d));
    c += weight * (x - prob.cost.target[d]) * (x - prob.cost.target[d]);
  }
  return c;
}

double Effort(const MfgProblem& prob, size_t axis, double u) {
  const double e = u - prob.drift[axis].p0;
  return prob.cost.control_weight * e * e;
}

// Combine a one-step increment with Grunwald-Letnikov memory:
//   x_new = x0 - sum_{j=1..J} w_j (x_{s+1-j} - x0) + increment
// where hist = x0..x_s. With alpha = 1 this is x_s + increment.
void ApplyMemory(const MfgGrid& grid,
                 const std::vector<std::vector<double>>* hist,
                 const std::vector<double>& current,
                 std::vector<double>& increment) {
  if (grid.alpha == 1.0 || hist == nullptr || hist->size() <= 1) {
    for (size_t i = 0; i < increment.size(); ++i) increment[i] += current[i];
    return;
  }
  const size_t s = hist->size() - 1;
  size_t depth = s + 1;
  if (grid.memory > 0) depth = std::min(depth, grid.memory);
  const std::vector<double> w = GrunwaldWeights(grid.alpha, depth + 1);
  const std::vector<double>& x0 = hist->front();
  for (size_t i = 0; i < increment.size(); ++i) {
    double acc = x0[i];
    for (size_t j = 1; j <= depth; ++j) acc -= w[j] * ((*hist)[s + 1 - j][i] - x0[i]);
    increment[i] += acc;
  }
}

absl::Status CheckMass(const std::vector<double>& m, size_t cells,
                       const char* what) {
  if (m.size() != cells) {
    return ShapeError(absl::StrCat(what, " has ", m.size(), " cells, grid has ",
                                   cells));
  }
  return CheckProbabilities(m);
}

int ControlsFor(const MfgProblem& prob, int index, double* drift) {
  if (prob.mode == GameMode::kMinimax) {
    const int nb = static_cast<int>(prob.controls[1].size());
    drift[0] = prob.drift[0](prob.controls[0][index / nb]);
    drift[1] = prob.drift[1](prob.controls[1][index % nb]);
  } else {
    drift[0] = prob.drift[0](prob.controls[0][index]);
  }
  return index;
}

}  // namespace

size_t CellCount(const MfgGrid& grid) {
  size_t c = 1;
  for (const Axis& a : grid.axes) c *= a.n;
  return c;
}

double DriftSpec::operator()(double u) const {
  const double e = u - p0;
  return sign * gain * (kind == DriftKind::kTanh ? std::tanh(e) : e);
}

absl::Status ValidateMfg(const MfgProblem& prob, const MfgGrid& grid) {
  const size_t dims = grid.axes.size();
  if (dims < 1 || dims > 2) return ShapeError("grid must have 1 or 2 axes");
  for (const Axis& a : grid.axes) {
    if (a.n < 3) return ShapeError("axis needs at least 3 nodes");
    if (!(a.hi > a.lo)) return ValidationError("axis must have hi > lo");
  }
  if (!(grid.dt > 0.0)) return ValidationError("dt must be positive");
  if (grid.steps < 1) return ValidationError("need at least one time step");
  if (!(grid.sigma >= 0.0)) return ValidationError("sigma must be >= 0");
  if (!(grid.alpha > 0.0 && grid.alpha <= 1.0)) {
    return ValidationError("alpha must be in (0, 1]");
  }
  const bool joint = prob.mode == GameMode::kMinimax;
  if (joint != (dims == 2)) {
    return ConfigError("minimax mode needs a 2-D grid, min/max modes a 1-D grid");
  }
  if (prob.drift.size() != dims || prob.controls.size() != dims) {
    return ShapeError("need one drift and one control set per axis");
  }
  if (prob.cost.target.size() != dims) {
    return ShapeError("need one cost target per axis");
  }
  for (size_t d = 0; d < dims; ++d) {
    if (prob.controls[d].empty()) return ValidationError("empty control set");
    if (prob.drift[d].gain == 0.0 || !std::isfinite(prob.drift[d].gain)) {
      return ValidationError("drift gain must be nonzero and finite");
    }
  }

  // Scheme stability: diffusion number and total exit probability.
  const double tau = Tau(grid);
  double exit = 0.0;
  for (size_t d = 0; d < dims; ++d) {
    const double dx = grid.axes[d].dx();
    const double diff = grid.sigma * grid.sigma * tau / (dx * dx);
    if (diff > 0.5) {
      return ConfigError(absl::StrCat("CFL: sigma^2 tau / dx^2 = ", diff,
                                      " exceeds 0.5 on axis ", d));
    }
    double bmax = 0.0;
    for (double u : prob.controls[d]) bmax = std::max(bmax, std::abs(prob.drift[d](u)));
    exit += tau / dx * bmax + diff;
  }
  if (exit > grid.alpha + 1e-12) {
    return ConfigError(absl::StrCat("CFL: exit probability ", exit,
                                    " per step exceeds ", grid.alpha));
  }
  return absl::OkStatus();
}

absl::StatusOr<HjbStep> HjbBackwardStep(
    const MfgState& state, const MfgProblem& prob, const MfgGrid& grid,
    const std::vector<std::vector<double>>* history) {
  absl::Status st = ValidateMfg(prob, grid);
  if (!st.ok()) return st;
  const size_t cells = CellCount(grid);
  if (state.value.size() != cells) return ShapeError("value size mismatch");
  st = CheckMass(state.density, cells, "density");
  if (!st.ok()) return st;
  if (history != nullptr) {
    for (const auto& h : *history) {
      if (h.size() != cells) return ShapeError("history size mismatch");
    }
  }

  const Layout lay(grid);
  const double tau = Tau(grid);
  const double vol = CellVolume(grid);
  const bool joint = prob.mode == GameMode::kMinimax;
  const double pick = prob.mode == GameMode::kMax ? -1.0 : 1.0;
  const size_t na = prob.controls[0].size();
  const size_t nb = joint ? prob.controls[1].size() : 1;

  HjbStep out;
  out.value.assign(cells, 0.0);
  out.control.assign(cells, 0);
  for (size_t c = 0; c < cells; ++c) {
    const double base = prob.cost.constant +
                        StateCost(prob, grid, lay, c, prob.cost.state_weight) +
                        prob.cost.congestion * state.density[c] / vol;
    // Outer player minimizes (pick = 1) or maximizes (pick = -1); in joint
    // mode the inner player maximizes.
    double best = std::numeric_limits<double>::infinity();
    double best_mag = 0.0;
    int best_idx = 0;
    for (size_t a = 0; a < na; ++a) {
      double inner = -std::numeric_limits<double>::infinity();
      double inner_mag = 0.0;
      int inner_idx = 0;
      for (size_t b = 0; b < nb; ++b) {
        double drift[2] = {0.0, 0.0};
        const int idx = ControlsFor(prob, static_cast<int>(a * nb + b), drift);
        double cost = base + pick * Effort(prob, 0, prob.controls[0][a]);
        if (joint) cost -= Effort(prob, 1, prob.controls[1][b]);
        const Moves mv = MovesAt(grid, lay, c, drift);
        const double q = cost * tau + Expected(state.value, lay, c, mv);
        const double mag = std::abs(drift[1]);
        const double slack = kTieTol * (1.0 + std::abs(q));
        if (q > inner + slack || (q >= inner - slack && mag < inner_mag)) {
          inner = q;
          inner_mag = mag;
          inner_idx = idx;
        }
      }
      double drift[2] = {0.0, 0.0};
      ControlsFor(prob, inner_idx, drift);
      const double score = pick * inner;
      const double mag = std::abs(drift[0]) + std::abs(drift[1]);
      const double slack = kTieTol * (1.0 + std::abs(score));
      if (score < best - slack || (score <= best + slack && mag < best_mag)) {
        best = score;
        best_mag = mag;
        best_idx = inner_idx;
      }
    }
    out.value[c] = pick * best - state.value[c];  // increment for now
    out.control[c] = best_idx;
  }
  std::vector<double> inc = std::move(out.value);
  ApplyMemory(grid, history, state.value, inc);
  out.value = std::move(inc);
  return out;
}

absl::StatusOr<std::vector<double>> FpkFaceStep(const std::vector<double>& mass,
                                                const FaceRates& rates,
                                                const MfgGrid& grid) {
  const size_t cells = CellCount(grid);
  const size_t dims = grid.axes.size();
  if (dims < 1 || dims > 2) return ShapeError("grid must have 1 or 2 axes");
  if (mass.size() != cells) return ShapeError("mass size mismatch");
  if (rates.up.size() != dims || rates.down.size() != dims) {
    return ShapeError("need face rates for every axis");
  }
  const Layout lay(grid);
  for (size_t d = 0; d < dims; ++d) {
    if (rates.up[d].size() != cells || rates.down[d].size() != cells) {
      return ShapeError("face rate size mismatch");
    }
  }
  std::vector<double> out(cells, 0.0);
  for (size_t c = 0; c < cells; ++c) {
    double exit = 0.0;
    for (size_t d = 0; d < dims; ++d) {
      const double up = rates.up[d][c], down = rates.down[d][c];
      if (!(up >= 0.0) || !(down >= 0.0)) {
        return ValidationError("face rates must be nonnegative");
      }
      const size_t i = lay.Coord(c, d);
      if ((i + 1 == lay.n[d] && up > 0.0) || (i == 0 && down > 0.0)) {
        return ValidationError("flux through a wall");
      }
      exit += up + down;
      if (up > 0.0) out[c + lay.stride[d]] += up * mass[c];
      if (down > 0.0) out[c - lay.stride[d]] += down * mass[c];
    }
    if (exit > 1.0 + 1e-12) return ConfigError("CFL: exit probability above 1");
    out[c] += (1.0 - exit) * mass[c];
  }
  return out;
}

absl::StatusOr<std::vector<double>> FpkForwardStep(
    const MfgState& state, const MfgProblem& prob, const MfgGrid& grid,
    const std::vector<std::vector<double>>* history) {
  absl::Status st = ValidateMfg(prob, grid);
  if (!st.ok()) return st;
  const size_t cells = CellCount(grid);
  st = CheckMass(state.density, cells, "density");
  if (!st.ok()) return st;
  if (state.control.size() != cells) return ShapeError("control size mismatch");
  if (history != nullptr) {
    for (const auto& h : *history) {
      if (h.size() != cells) return ShapeError("history size mismatch");
    }
  }
  const size_t dims = grid.axes.size();
  const int ncontrols = static_cast<int>(
      prob.controls[0].size() * (dims == 2 ? prob.controls[1].size() : 1));
  const Layout lay(grid);
  FaceRates rates;
  rates.up.assign(dims, std::vector<double>(cells, 0.0));
  rates.down.assign(dims, std::vector<double>(cells, 0.0));
  for (size_t c = 0; c < cells; ++c) {
    const int k = state.control[c];
    if (k < 0 || k >= ncontrols) return ValidationError("control index out of range");
    double drift[2] = {0.0, 0.0};
    ControlsFor(prob, k, drift);
    const Moves mv = MovesAt(grid, lay, c, drift);
    for (size_t d = 0; d < dims; ++d) {
      rates.up[d][c] = mv.up[d];
      rates.down[d][c] = mv.down[d];
    }
  }
  absl::StatusOr<std::vector<double>> moved = FpkFaceStep(state.density, rates, grid);
  if (!moved.ok()) return moved.status();
  std::vector<double> inc(cells);
  for (size_t c = 0; c < cells; ++c) inc[c] = (*moved)[c] - state.density[c];
  ApplyMemory(grid, history, state.density, inc);
  for (double& v : inc) v = std::max(v, 0.0);  // clears -0 round-off only
  return inc;
}

absl::StatusOr<MfgSolution> SolveMfg(const MfgProblem& prob,
                                     const MfgGrid& grid,
                                     const std::vector<double>& initial_mass,
                                     const MfgOptions& opts) {
  absl::Status st = ValidateMfg(prob, grid);
  if (!st.ok()) return st;
  const size_t cells = CellCount(grid);
  st = CheckMass(initial_mass, cells, "initial mass");
  if (!st.ok()) return st;
  if (!(opts.tol > 0.0)) return ValidationError("tol must be positive");
  if (opts.max_sweeps < 1) return ValidationError("max_sweeps must be >= 1");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
    return ValidationError("damping must be in (0, 1]");
  }

  const size_t steps = grid.steps;
  const bool frac = grid.alpha < 1.0;
  const Layout lay(grid);
  std::vector<double> terminal(cells);
  for (size_t c = 0; c < cells; ++c) {
    terminal[c] = StateCost(prob, grid, lay, c, prob.cost.terminal_weight);
  }

  std::vector<std::vector<double>> belief(steps + 1, initial_mass);
  MfgSolution best;
  double best_res = std::numeric_limits<double>::infinity();
  std::vector<double> residuals;

  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    std::vector<std::vector<double>> values(steps + 1);
    std::vector<std::vector<int>> policy(steps);
    values[steps] = terminal;
    std::vector<std::vector<double>> vhist{terminal};
    for (size_t n = steps; n-- > 0;) {
      MfgState s{values[n + 1], belief[n], {}};
      absl::StatusOr<HjbStep> h =
          HjbBackwardStep(s, prob, grid, frac ? &vhist : nullptr);
      if (!h.ok()) return h.status();
      values[n] = std::move(h->value);
      policy[n] = std::move(h->control);
      if (frac) vhist.push_back(values[n]);
    }

    std::vector<std::vector<double>> fresh(steps + 1);
    fresh[0] = initial_mass;
    std::vector<std::vector<double>> mhist{initial_mass};
    for (size_t n = 0; n < steps; ++n) {
      MfgState s{{}, fresh[n], policy[n]};
      absl::StatusOr<std::vector<double>> m =
          FpkForwardStep(s, prob, grid, frac ? &mhist : nullptr);
      if (!m.ok()) return m.status();
      fresh[n + 1] = std::move(*m);
      if (frac) mhist.push_back(fresh[n + 1]);
    }

    double res = 0.0;
    for (size_t n = 0; n <= steps; ++n) {
      double l1 = 0.0;
      for (size_t c = 0; c < cells; ++c) l1 += std::abs(fresh[n][c] - belief[n][c]);
      res = std::max(res, l1);
    }
    residuals.push_back(res);
    if (res < best_res) {
      best_res = res;
      best.values = values;
      best.densities = fresh;
      best.policy = policy;
      best.sweeps = sweep;
    }
    if (res < opts.tol) {
      best.converged = true;
      best.sweeps = sweep;
      break;
    }
    for (size_t n = 0; n <= steps; ++n) {
      for (size_t c = 0; c < cells; ++c) {
        belief[n][c] += opts.damping * (fresh[n][c] - belief[n][c]);
      }
    }
  }
  if (!best.converged) best.sweeps = opts.max_sweeps;
  best.residuals = std::move(residuals);
  return best;
}

double AxisMean(const std::vector<double>& mass, const MfgGrid& grid,
                size_t axis) {
  const Layout lay(grid);
  double m = 0.0;
  for (size_t c = 0; c < mass.size(); ++c) {
    m += mass[c] * grid.axes[axis].x(lay.Coord(c, axis));
  }
  return m;
}

absl::StatusOr<SaddleResult> SaddleCheck(
    const std::vector<std::vector<double>>& payoff) {
  if (payoff.empty() || payoff[0].empty()) {
    return ValidationError("empty payoff matrix");
  }
  const size_t rows = payoff.size(), cols = payoff[0].size();
  for (const auto& r : payoff) {
    if (r.size() != cols) return ShapeError("ragged payoff matrix");
  }
  size_t r_star = 0, c_star = 0;
  double best_rowmax = std::numeric_limits<double>::infinity();
  for (size_t r = 0; r < rows; ++r) {
    double m = *std::max_element(payoff[r].begin(), payoff[r].end());
    if (m < best_rowmax) {
      best_rowmax = m;
      r_star = r;
    }
  }
  double best_colmin = -std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < cols; ++c) {
    double m = payoff[0][c];
    for (size_t r = 1; r < rows; ++r) m = std::min(m, payoff[r][c]);
    if (m > best_colmin) {
      best_colmin = m;
      c_star = c;
    }
  }
  SaddleResult out{r_star, c_star, payoff[r_star][c_star], true};
  const double eps = 1e-12 * (1.0 + std::abs(out.value));
  for (size_t c = 0; c < cols; ++c) {
    if (payoff[r_star][c] > out.value + eps) out.verified = false;
  }
  for (size_t r = 0; r < rows; ++r) {
    if (payoff[r][c_star] < out.value - eps) out.verified = false;
  }
  return out;
}

absl::StatusOr<double> ValueSumNonzero(const std::vector<double>& v_a,
                                       const std::vector<double>& v_b) {
  if (v_a.empty() || v_a.size() != v_b.size()) {
    return ShapeError("value fields must be nonempty and on the same grid");
  }
  double m = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < v_a.size(); ++i) m = std::min(m, std::abs(v_a[i] + v_b[i]));
  return m;
}

absl::StatusOr<double> StabilityCriterion(const std::vector<double>& f,
                                          double rho) {
  if (f.empty()) return ShapeError("empty trajectory");
  if (!(rho > 0.0)) return ValidationError("rho must be positive");
  double acc = 0.0;
  for (size_t n = 0; n + 1 < f.size(); ++n) {
    const double d = f[n + 1] - f[n];
    acc += std::exp(-rho * static_cast<double>(n)) * d * d;
  }
  return acc;
}

}  // namespace leakgame
