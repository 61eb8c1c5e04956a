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
#include "leakgame/nested.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "absl/strings/str_cat.h"
#include "leakgame/csv.h"
#include "leakgame/kuramoto.h"
#include "leakgame/prob.h"

namespace leakgame {
namespace {

constexpr double kKlFloor = 1e-12;

using Sparse = std::vector<std::pair<size_t, double>>;

double Binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

int Log2Ceil(int n) {
  int b = 0;
  while ((1 << b) < n) ++b;
  return b;
}

// Linear interpolation of a point onto the level grid.
void Snap(double x, const std::vector<double>& levels, double w, Sparse& out) {
  const size_t n = levels.size();
  if (n == 1) {
    out.emplace_back(0, w);
    return;
  }
  const double h = levels[1] - levels[0];
  double pos = std::clamp((x - levels[0]) / h, 0.0, static_cast<double>(n - 1));
  size_t i = static_cast<size_t>(std::floor(pos));
  if (i >= n - 1) {
    out.emplace_back(n - 1, w);
    return;
  }
  const double frac = pos - static_cast<double>(i);
  out.emplace_back(i, w * (1.0 - frac));
  if (frac > 0.0) out.emplace_back(i + 1, w * frac);
}

// Law of the next level after claiming level a.
std::vector<Sparse> Transitions(const NestedConfig& cfg,
                                const std::vector<double>& levels) {
  std::vector<Sparse> t(levels.size());
  for (size_t a = 0; a < levels.size(); ++a) {
    const double x = levels[a];
    if (cfg.sigma == 0.0) {
      Snap(x, levels, 1.0, t[a]);
    } else if (cfg.noise == LevelNoise::kBernoulli) {
      Snap(x + cfg.sigma, levels, 0.5, t[a]);
      Snap(x - cfg.sigma, levels, 0.5, t[a]);
    } else {
      double z = 0.0;
      std::vector<double> w(levels.size());
      for (size_t j = 0; j < levels.size(); ++j) {
        const double d = (levels[j] - x) / cfg.sigma;
        z += w[j] = std::exp(-0.5 * d * d);
      }
      for (size_t j = 0; j < levels.size(); ++j) {
        if (w[j] > 0.0) t[a].emplace_back(j, w[j] / z);
      }
    }
  }
  return t;
}

double Mean(const std::vector<double>& p, const std::vector<double>& levels) {
  double m = 0.0;
  for (size_t i = 0; i < p.size(); ++i) m += p[i] * levels[i];
  return m;
}

// KL(p || q) in nats; both sides get the floor when q misses mass of p.
double SmoothedKl(const std::vector<double>& p, const std::vector<double>& q,
                  bool& smoothed) {
  bool need = false;
  for (size_t i = 0; i < p.size(); ++i) need |= p[i] > 0.0 && q[i] <= 0.0;
  smoothed |= need;
  const double eps = need ? kKlFloor : 0.0;
  const double z = 1.0 + eps * static_cast<double>(p.size());
  double d = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const double pi = (p[i] + eps) / z, qi = (q[i] + eps) / z;
    if (pi > 0.0) d += pi * std::log(pi / qi);
  }
  return std::max(d, 0.0);
}

// State shared by both solvers: one best-response/propagation round and
// the outer bankruptcy layer.
class Population {
 public:
  Population(const NestedConfig& cfg, const BankruptcyInstance& inst)
      : cfg_(cfg), inst_(inst) {
    const int n = cfg.levels;
    for (int i = 0; i < n; ++i) {
      levels_.push_back(n == 1 ? cfg.theta_lo
                               : cfg.theta_lo + (cfg.theta_hi - cfg.theta_lo) * i / (n - 1));
    }
    trans_ = Transitions(cfg, levels_);
    const double cmax = *std::max_element(inst.claims.begin(), inst.claims.end());
    const double cmean = std::accumulate(inst.claims.begin(), inst.claims.end(), 0.0) /
                         static_cast<double>(inst.claims.size());
    outside_ = cfg.theta_lo + (cfg.theta_hi - cfg.theta_lo) * cmean / cmax;
    steps_ = cfg.k - cfg.kb;
    p0_ = InitialLaw(cfg, inst.claims);
    mu_ = cfg.major_measure;
    if (mu_.empty()) {
      mu_.assign(steps_ + 1, 0.0);
      mu_[0] = 1.0;
    }
  }

  size_t steps() const { return steps_; }
  const std::vector<double>& p0() const { return p0_; }

  // Best response to `belief`, then the law it produces from p0.
  void Round(const std::vector<std::vector<double>>& belief, DiscreteMfgState& s) {
    const size_t n = levels_.size();
    s.levels = levels_;
    s.utility.assign(steps_ + 1, std::vector<double>(n, 0.0));
    s.controls.assign(steps_, std::vector<double>(n, 0.0));
    std::vector<std::vector<size_t>> policy(steps_, std::vector<size_t>(n, 0));
    std::vector<double> share(n);
    for (size_t k = steps_; k-- > 0;) {
      const double bar = Mean(belief[k], levels_);
      for (size_t a = 0; a < n; ++a) {
        const double gap = levels_[a] - bar;
        share[a] = RepresentativeShare(levels_[a], bar, outside_, cfg_.l, cfg_.l0,
                                       cfg_.lambda) -
                   cfg_.gamma * levels_[a] * levels_[a] -
                   cfg_.envy * cfg_.lambda * gap * gap;
      }
      for (size_t i = 0; i < n; ++i) {
        double best = -INFINITY;
        size_t arg = 0;
        for (size_t a = 0; a < n; ++a) {
          const double move = levels_[a] - levels_[i];
          double q = share[a] - cfg_.kappa * move * move;
          for (const auto& [j, w] : trans_[a]) q += w * s.utility[k + 1][j];
          const bool tie = std::abs(q - best) <= 1e-12 * std::max(1.0, std::abs(q));
          if ((q > best && !tie) ||
              (tie && std::abs(levels_[a]) < std::abs(levels_[arg]))) {
            best = std::max(q, best);
            arg = a;
          }
        }
        s.utility[k][i] = best;
        policy[k][i] = arg;
        s.controls[k][i] = levels_[arg];
      }
    }
    s.pmf.assign(steps_ + 1, std::vector<double>(n, 0.0));
    s.pmf[0] = p0_;
    for (size_t k = 0; k < steps_; ++k) {
      for (size_t i = 0; i < n; ++i) {
        if (s.pmf[k][i] == 0.0) continue;
        for (const auto& [j, w] : trans_[policy[k][i]]) s.pmf[k + 1][j] += s.pmf[k][i] * w;
      }
    }
  }

  double Residual(const DiscreteMfgState& s, bool& smoothed) const {
    if (steps_ == 0) return 0.0;
    double r = 0.0;
    for (size_t k = 1; k <= steps_; ++k) r += SmoothedKl(s.pmf[k], s.belief[k], smoothed);
    return r / static_cast<double>(steps_);
  }

  absl::Status Outer(DiscreteMfgState& s) const {
    s.major_measure = mu_;
    absl::StatusOr<Allocation> base = Shapley(inst_);
    if (!base.ok()) return base.status();
    const double total = std::accumulate(inst_.claims.begin(), inst_.claims.end(), 0.0);
    const double avail = std::min(inst_.estate, total);
    s.estate.clear();
    s.allocations.clear();
    s.outer_objective = 0.0;
    for (size_t k = 0; k <= steps_; ++k) {
      const double m = cfg_.theta_hi > 0.0 ? Mean(s.pmf[k], levels_) / cfg_.theta_hi : 0.0;
      s.estate.push_back(avail * m);
      std::vector<double> alloc = base->payoffs;
      for (double& v : alloc) v *= m;
      s.allocations.push_back(std::move(alloc));
      s.outer_objective += mu_[k] * (total - avail) * m;
    }
    return absl::OkStatus();
  }

 private:
  const NestedConfig& cfg_;
  const BankruptcyInstance& inst_;
  std::vector<double> levels_;
  std::vector<Sparse> trans_;
  double outside_ = 0.0;
  size_t steps_ = 0;
  std::vector<double> p0_;
  std::vector<double> mu_;
};

void AddOps(OpCounts& total, const OpCounts& step) {
  total.hjb += step.hjb;
  total.fpk += step.fpk;
  total.consensus += step.consensus;
  total.sort += step.sort;
  total.pairwise += step.pairwise;
}

absl::Status CheckInputs(const NestedConfig& cfg, const BankruptcyInstance& inst,
                         const NestedOptions& opts) {
  absl::Status s = ValidateNestedConfig(cfg);
  if (s.ok()) s = ValidateInstance(inst);
  if (!s.ok()) return s;
  if (inst.claims.size() != static_cast<size_t>(cfg.l0)) {
    return ShapeError(absl::StrCat("instance has ", inst.claims.size(),
                                   " claimants, coalition size is ", cfg.l0));
  }
  if (!(*std::max_element(inst.claims.begin(), inst.claims.end()) > 0.0)) {
    return ValidationError("need a positive claim");
  }
  if (!opts.initial_belief.empty()) {
    if (opts.initial_belief.size() != static_cast<size_t>(cfg.k - cfg.kb + 1)) {
      return ShapeError("initial belief needs one law per time");
    }
    for (const auto& p : opts.initial_belief) {
      if (p.size() != static_cast<size_t>(cfg.levels)) {
        return ShapeError("initial belief law has the wrong size");
      }
      absl::Status st = CheckProbabilities(p);
      if (!st.ok()) return st;
    }
  }
  return absl::OkStatus();
}

std::vector<std::vector<double>> StartBelief(const Population& pop,
                                             const NestedOptions& opts) {
  if (!opts.initial_belief.empty()) return opts.initial_belief;
  return std::vector<std::vector<double>>(pop.steps() + 1, pop.p0());
}

}  // namespace

absl::Status ValidateNestedConfig(const NestedConfig& cfg) {
  if (!(cfg.kb > 0 && cfg.kb <= cfg.k)) return ConfigError("need 0 < K_b <= K");
  if (!(cfg.l0 >= 1 && cfg.l0 <= cfg.l)) return ConfigError("need 1 <= L0 <= L");
  if (!(cfg.lambda >= 0.0 && cfg.lambda < 1.0)) return ConfigError("need lambda in [0, 1)");
  if (!(cfg.sigma >= 0.0) || !std::isfinite(cfg.sigma)) return ConfigError("need sigma >= 0");
  if (!(cfg.admm_rho > 0.0)) return ConfigError("need admm_rho > 0");
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1) return ConfigError("need tol > 0, max_iter >= 1");
  if (cfg.levels < 1) return ConfigError("need at least one level");
  if (cfg.levels > 1 && !(cfg.theta_hi > cfg.theta_lo)) {
    return ConfigError("need theta_hi > theta_lo");
  }
  if (!(cfg.kappa >= 0.0) || !(cfg.gamma >= 0.0) || !(cfg.envy >= 0.0)) {
    return ConfigError("need kappa, gamma, envy >= 0");
  }
  if (!cfg.major_measure.empty()) {
    if (cfg.major_measure.size() != static_cast<size_t>(cfg.k - cfg.kb + 1)) {
      return ConfigError("major_measure needs K - K_b + 1 weights");
    }
    absl::Status s = CheckProbabilities(cfg.major_measure);
    if (!s.ok()) return ConfigError(s.message());
  }
  if (!std::isfinite(cfg.coupling)) return ConfigError("coupling must be finite");
  if (!(cfg.phase_dt >= 0.0) || cfg.phase_steps < 1 || !(cfg.coherence_tol > 0.0)) {
    return ConfigError("need phase_dt >= 0, phase_steps >= 1, coherence_tol > 0");
  }
  if (cfg.phase_dt > 0.0 && std::abs(cfg.coupling) * cfg.phase_dt > 0.1 + 1e-12) {
    return ConfigError("need |D| dt <= 0.1");
  }
  return absl::OkStatus();
}

double RepresentativeShare(double theta, double theta_bar, double outside,
                           int l, int l0, double lambda) {
  const int ins = l0 - 1, outs = l - l0;
  const double total = theta + ins * theta_bar + outs * outside;
  // The estate is fixed by the anticipated claims, so a deviation from
  // the belief mean competes for the same pie.
  const double estate = (1.0 - lambda) * (total - theta + theta_bar);
  auto worth = [&](double claims) {
    return std::min(claims, std::max(0.0, estate - (total - claims)));
  };
  double phi = 0.0;
  for (int a = 0; a <= ins; ++a) {
    for (int b = 0; b <= outs; ++b) {
      const int s = a + b;
      // Orders placing exactly these s others first, over all orders.
      const double weight = Binomial(ins, a) * Binomial(outs, b) /
                            (static_cast<double>(l) * Binomial(l - 1, s));
      const double c = a * theta_bar + b * outside;
      phi += weight * (worth(c + theta) - worth(c));
    }
  }
  return phi;
}

std::vector<double> InitialLaw(const NestedConfig& cfg,
                               const std::vector<double>& claims) {
  const int n = cfg.levels;
  if (n == 1) return {1.0};
  const double cmax = *std::max_element(claims.begin(), claims.end());
  std::vector<double> p(n, 0.0);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);
    for (double c : claims) {
      const double d = (x - c / cmax) / 0.05;
      p[i] += std::exp(-0.5 * d * d);
    }
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

OpCounts BilevelOpsPerIteration(int n) {
  OpCounts c;
  c.hjb = n;
  c.fpk = n;
  c.consensus = n;
  c.sort = static_cast<int64_t>(n) * Log2Ceil(n);
  c.pairwise = static_cast<int64_t>(n) * n;
  return c;
}

OpCounts TrilevelOpsPerIteration(int n) {
  OpCounts c = BilevelOpsPerIteration(n);
  c.consensus = 0;
  return c;
}

absl::StatusOr<NestedResult> SolveBilevelAdmm(const NestedConfig& cfg,
                                              const BankruptcyInstance& inst,
                                              const NestedOptions& opts) {
  absl::Status st = CheckInputs(cfg, inst, opts);
  if (!st.ok()) return st;
  Population pop(cfg, inst);
  NestedResult res;
  std::vector<std::vector<double>> z = StartBelief(pop, opts);
  std::vector<std::vector<double>> u(z.size(), std::vector<double>(cfg.levels, 0.0));
  const OpCounts per = BilevelOpsPerIteration(cfg.l0);
  NestedResult best;
  double best_res = INFINITY;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    res.mfg.belief = z;
    pop.Round(z, res.mfg);
    const double r = pop.Residual(res.mfg, res.smoothed);
    res.residuals.push_back(r);
    res.iterations = it;
    AddOps(res.ops, per);
    if (r < best_res) {
      best_res = r;
      best.mfg = res.mfg;
    }
    if (r < cfg.tol) {
      res.converged = true;
      break;
    }
    // Scaled ADMM on P = z in log coordinates, so the belief keeps full
    // support: log z <- (rho (log P + u) + log z) / (1 + rho), normalized,
    // then u <- u + log P - log z. P gets the 1e-12 floor first.
    for (size_t k = 1; k < z.size(); ++k) {
      const double floor_mass = 1.0 + kKlFloor * cfg.levels;
      std::vector<double> logp(cfg.levels), logz(cfg.levels);
      double top = -INFINITY;
      for (int i = 0; i < cfg.levels; ++i) {
        logp[i] = std::log((res.mfg.pmf[k][i] + kKlFloor) / floor_mass);
        logz[i] = (cfg.admm_rho * (logp[i] + u[k][i]) + std::log(std::max(z[k][i], kKlFloor))) /
                  (1.0 + cfg.admm_rho);
        top = std::max(top, logz[i]);
      }
      double mass = 0.0;
      for (int i = 0; i < cfg.levels; ++i) mass += std::exp(logz[i] - top);
      for (int i = 0; i < cfg.levels; ++i) {
        logz[i] -= top + std::log(mass);
        z[k][i] = std::exp(logz[i]);
        u[k][i] += logp[i] - logz[i];
      }
    }
  }
  if (!res.converged) res.mfg = std::move(best.mfg);
  st = pop.Outer(res.mfg);
  if (!st.ok()) return st;
  return res;
}

absl::StatusOr<NestedResult> SolveTrilevelKuramoto(
    const NestedConfig& cfg, const BankruptcyInstance& inst,
    const NestedOptions& opts) {
  absl::Status st = CheckInputs(cfg, inst, opts);
  if (!st.ok()) return st;
  Population pop(cfg, inst);
  NestedResult res;
  std::vector<std::vector<double>> z = StartBelief(pop, opts);

  // Phase game among the coalition: natural frequencies from the claims,
  // seeded starting phases, pairwise coupling.
  const int n = cfg.l0;
  const double cmax = *std::max_element(inst.claims.begin(), inst.claims.end());
  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);
  std::vector<double> phi(n), omega(n);
  for (int i = 0; i < n; ++i) {
    phi[i] = unif(rng);
    omega[i] = 0.2 * inst.claims[i] / cmax;
  }
  absl::StatusOr<OscillatorState> osc = MakeOscillators(
      phi, omega, cfg.coupling,
      std::vector<std::vector<double>>(n, std::vector<double>(n, 1.0)));
  if (!osc.ok()) return osc.status();
  const double dt = cfg.phase_dt > 0.0
                        ? cfg.phase_dt
                        : std::min(0.05, cfg.coupling == 0.0 ? 0.05
                                                             : 0.1 / std::abs(cfg.coupling));
  res.phase.major_measure.assign(n, 1.0 / n);

  const OpCounts per = TrilevelOpsPerIteration(n);
  NestedResult best;
  double best_res = INFINITY;
  double r_prev = Coherence(osc->phases).r;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    res.mfg.belief = z;
    pop.Round(z, res.mfg);
    const double resid = pop.Residual(res.mfg, res.smoothed);
    res.residuals.push_back(resid);
    res.iterations = it;
    AddOps(res.ops, per);

    for (int s = 0; s < cfg.phase_steps; ++s) {
      absl::StatusOr<OscillatorState> next = Step(*osc, dt);
      if (!next.ok()) return next.status();
      *osc = std::move(*next);
    }
    const double r = Coherence(osc->phases).r;
    res.phase.phases.push_back(osc->phases);
    res.phase.coherence.push_back(r);

    if (resid < best_res) {
      best_res = resid;
      best.mfg = res.mfg;
    }
    if (resid < cfg.tol && std::abs(r - r_prev) < cfg.coherence_tol) {
      res.converged = true;
      break;
    }
    r_prev = r;
    for (size_t k = 1; k < z.size(); ++k) {
      for (int i = 0; i < cfg.levels; ++i) {
        z[k][i] += r * (res.mfg.pmf[k][i] - z[k][i]);
      }
    }
  }
  if (!res.converged) res.mfg = std::move(best.mfg);
  res.phase.pdf = PhaseDensity(osc->phases);
  res.phase.utility = PhaseUtility(osc->phases, res.phase.major_measure);
  st = pop.Outer(res.mfg);
  if (!st.ok()) return st;
  return res;
}

std::vector<double> PhaseUtility(const std::vector<double>& phases,
                                 const std::vector<double>& mu) {
  std::vector<double> u(phases.size(), 0.0);
  for (size_t i = 0; i < phases.size(); ++i) {
    for (size_t j = 0; j < phases.size(); ++j) {
      u[i] -= mu[j] * std::abs(WrapDifference(phases[i] - phases[j]));
    }
  }
  return u;
}

std::vector<double> PhaseDensity(const std::vector<double>& phases,
                                 double concentration) {
  const double width = 2.0 * M_PI / kPhaseBins;
  std::vector<double> pdf(kPhaseBins, 0.0);
  if (phases.empty()) {
    std::fill(pdf.begin(), pdf.end(), 1.0 / (2.0 * M_PI));
    return pdf;
  }
  double mass = 0.0;
  for (int b = 0; b < kPhaseBins; ++b) {
    const double x = (b + 0.5) * width;
    for (double p : phases) pdf[b] += std::exp(concentration * (std::cos(x - p) - 1.0));
    mass += pdf[b] * width;
  }
  for (double& v : pdf) v /= mass;
  return pdf;
}

absl::StatusOr<ComplexityFit> FitComplexity(const std::vector<double>& n,
                                            const std::vector<double>& ops) {
  if (n.size() != ops.size()) return ShapeError("one op count per size");
  std::vector<double> distinct = n;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) {
    return ValidationError("fit needs at least 3 distinct sizes");
  }
  // Normal equations on max-scaled columns.
  double g[3][3] = {}, h[3] = {}, scale[3] = {};
  std::vector<std::array<double, 3>> x;
  for (double v : n) {
    if (!(v >= 1.0)) return ValidationError("sizes must be >= 1");
    x.push_back({v, v * std::log2(v), v * v});
  }
  for (int c = 0; c < 3; ++c) {
    for (const auto& row : x) scale[c] = std::max(scale[c], std::abs(row[c]));
  }
  for (size_t i = 0; i < x.size(); ++i) {
    for (int r = 0; r < 3; ++r) {
      h[r] += x[i][r] / scale[r] * ops[i];
      for (int c = 0; c < 3; ++c) g[r][c] += x[i][r] / scale[r] * x[i][c] / scale[c];
    }
  }
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(g[r][col]) > std::abs(g[piv][col])) piv = r;
    }
    if (std::abs(g[piv][col]) < 1e-12) return ValidationError("fit is degenerate");
    std::swap(g[col], g[piv]);
    std::swap(h[col], h[piv]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = g[r][col] / g[col][col];
      for (int c = col; c < 3; ++c) g[r][c] -= f * g[col][c];
      h[r] -= f * h[col];
    }
  }
  double coef[3];
  for (int r = 2; r >= 0; --r) {
    double s = h[r];
    for (int c = r + 1; c < 3; ++c) s -= g[r][c] * coef[c];
    coef[r] = s / g[r][r];
  }
  ComplexityFit fit;
  fit.a = coef[0] / scale[0];
  fit.b = coef[1] / scale[1];
  fit.c = coef[2] / scale[2];
  const double mean = std::accumulate(ops.begin(), ops.end(), 0.0) / ops.size();
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double pred = fit.a * x[i][0] + fit.b * x[i][1] + fit.c * x[i][2];
    ss_res += (ops[i] - pred) * (ops[i] - pred);
    ss_tot += (ops[i] - mean) * (ops[i] - mean);
    fit.max_residual = std::max(fit.max_residual, std::abs(ops[i] - pred));
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

absl::StatusOr<std::vector<std::pair<double, double>>> IterationCdf(
    const std::vector<double>& runs) {
  if (runs.empty()) return ValidationError("need at least one run");
  std::vector<double> v = runs;
  std::sort(v.begin(), v.end());
  std::vector<std::pair<double, double>> cdf;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
    cdf.emplace_back(v[i], static_cast<double>(i + 1) / static_cast<double>(v.size()));
  }
  return cdf;
}

double QuantileDominance(std::vector<double> a, std::vector<double> b, int m) {
  if (a.empty() || b.empty() || m < 1) return 0.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  auto quantile = [](const std::vector<double>& v, double q) {
    // Smallest value whose empirical CDF reaches q.
    size_t idx = static_cast<size_t>(std::ceil(q * v.size() - 1e-9));
    return v[std::clamp<size_t>(idx, 1, v.size()) - 1];
  };
  int hold = 0;
  for (int i = 1; i <= m; ++i) {
    const double q = static_cast<double>(i) / m;
    hold += quantile(a, q) <= quantile(b, q);
  }
  return static_cast<double>(hold) / m;
}

absl::Status WriteRunLog(const std::string& path,
                         const std::vector<RunLogRow>& rows) {
  std::string out = "seed,level,lambda,iterations,residual,ops\n";
  for (const RunLogRow& r : rows) {
    absl::StrAppend(&out, r.seed, ",", r.level, ",", FormatDouble(r.lambda), ",",
                    r.iterations, ",", FormatDouble(r.residual), ",", r.ops, "\n");
  }
  return WriteText(path, out);
}

absl::Status WriteCdfCsv(const std::string& path,
                         const std::vector<std::pair<double, double>>& cdf) {
  Matrix rows;
  for (const auto& [v, f] : cdf) rows.push_back({v, f});
  return WriteCsv(path, {"iterations", "cdf"}, rows);
}

}  // namespace leakgame
