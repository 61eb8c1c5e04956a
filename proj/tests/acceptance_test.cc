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
// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "funnel_oracle.h"
#include "leakgame/bankruptcy.h"
#include "leakgame/frac.h"
#include "leakgame/funnel.h"
#include "leakgame/fuzzy.h"
#include "leakgame/harness.h"
#include "leakgame/kuramoto.h"
#include "leakgame/mfg.h"
#include "leakgame/nested.h"
#include "leakgame/prob.h"
#include "mfg_oracle.h"
#include "shapley_oracle.h"
#include "test_util.h"

namespace leakgame {
namespace {

NestedOptions SeededOptions(uint64_t seed) {
  NestedOptions o;
  o.seed = seed;
  return o;
}

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct Verdict {
  bool pass = true;
  std::string detail;
  void Require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += why;
    }
  }
  // Measurements; failure reasons stay in front.
  void Describe(const std::string& text) { detail = pass ? text : detail + " | " + text; }
};

// 1. Funnel solver against the exhaustive channel grid.
Verdict FunnelOracle() {
  Verdict v;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, solve_time = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    JointPmf j = *JointPmf::Create(2, 2, testing::RandomSimplex(4, rng, true));
    const double rate = (0.1 + 0.8 * u(rng)) * Entropy(j.ColMarginal());
    FunnelProblem prob{j, 2, UtilityMode::kRate, rate};
    FunnelOptions opts;
    opts.seed = seed;
    const auto t0 = Clock::now();
    absl::StatusOr<FunnelSolution> sol = SolveFunnel(prob, opts);
    solve_time += Seconds(t0);
    if (!sol.ok()) {
      v.Require(false, std::string(sol.status().message()));
      continue;
    }
    const double oracle = testing::BoundaryGridOptimum(j, rate, 0.005);
    worst = std::max(worst, std::abs(sol->leakage - oracle));
    v.Require(sol->utility >= rate - 1e-9, absl::StrCat("seed ", seed, " infeasible"));
  }
  v.Require(worst <= 1e-3, absl::StrFormat("worst gap %.3g bits", worst));
  v.Require(solve_time < 10.0, absl::StrFormat("%.1f s", solve_time));
  if (v.pass) v.detail = absl::StrFormat("worst gap %.2e bits, %.2f s", worst, solve_time);
  return v;
}

// 2. Iteration CDFs: funnel vs greedy, and MFG sweeps at alpha 1 vs 0.6.
Verdict Fig1Shape() {
  Verdict v;
  std::vector<double> funnel, greedy, one, frac;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    FunnelProblem prob = Fig1FunnelProblem(seed);
    FunnelOptions opts;
    opts.seed = seed;
    absl::StatusOr<FunnelSolution> f = SolveFunnel(prob, opts);
    absl::StatusOr<FunnelSolution> g = GreedyBaseline(prob, opts);
    if (!f.ok() || !g.ok()) {
      v.Require(false, "solver error");
      return v;
    }
    funnel.push_back(f->iterations);
    greedy.push_back(g->iterations);
    for (auto [alpha, out] : {std::pair{1.0, &one}, std::pair{0.6, &frac}}) {
      MfgCase mc = Fig1MfgCase(seed, alpha);
      absl::StatusOr<MfgSolution> s = SolveMfg(mc.prob, mc.grid, mc.m0);
      if (!s.ok()) {
        v.Require(false, "mfg error");
        return v;
      }
      out->push_back(s->sweeps);
    }
  }
  const double dom = QuantileDominance(funnel, greedy, 20);
  v.Require(dom >= 0.8, absl::StrFormat("dominance at %.0f%% of quantiles", 100 * dom));
  v.Require(Median(one) < Median(frac),
            absl::StrFormat("median sweeps alpha=1 %g vs alpha=0.6 %g", Median(one),
                            Median(frac)));
  v.Describe(absl::StrFormat(
      "funnel dominates greedy at %.0f%% of quantiles (median %g vs %g); median sweeps "
      "alpha=1 %g < alpha=0.6 %g",
      100 * dom, Median(funnel), Median(greedy), Median(one), Median(frac)));
  return v;
}

// 3. Ten-point trade-off sweep.
Verdict Tradeoff() {
  Verdict v;
  const JointPmf j = Fig1FunnelProblem(0).p_sx;
  const double hx = Entropy(j.ColMarginal());
  std::vector<double> bounds;
  for (int k = 0; k < 10; ++k) bounds.push_back(hx * k / 9.0);
  absl::StatusOr<std::vector<TradeoffPoint>> pts = TradeoffSweep(j, 2, bounds);
  if (!pts.ok()) {
    v.Require(false, std::string(pts.status().message()));
    return v;
  }
  for (size_t k = 0; k < pts->size(); ++k) {
    v.Require((*pts)[k].ok, absl::StrCat("point ", k, " failed"));
    if (k > 0) {
      v.Require((*pts)[k].leakage >= (*pts)[k - 1].leakage,
                absl::StrCat("leakage drops at point ", k));
    }
  }
  const double lo = pts->front().leakage, hi = pts->back().leakage;
  const double isx = MutualInformation(j);
  v.Require(std::abs(lo) <= 1e-6, absl::StrFormat("first corner %.3g", lo));
  v.Require(std::abs(hi - isx) <= 1e-6, absl::StrFormat("last corner %.9g vs %.9g", hi, isx));
  if (v.pass) v.detail = absl::StrFormat("monotone, corners %.1e and I(S;X)-%.1e", lo, isx - hi);
  return v;
}

// 4. Fractional derivative against closed forms.
Verdict FracOracle() {
  Verdict v;
  const double dt = 1e-3;
  FracSignal f{{}, dt, 0.5};
  for (int k = 0; k <= 1000; ++k) f.samples.push_back(k * dt);
  absl::StatusOr<std::vector<double>> d = FracDerivative(f);
  double worst = 0.0;
  for (size_t k = 0; d.ok() && k < d->size(); ++k) {
    worst = std::max(worst, std::abs((*d)[k] - 2.0 / std::sqrt(M_PI) * std::sqrt(k * dt)));
  }
  v.Require(d.ok() && worst <= 5e-3, absl::StrFormat("half-order error %.3g", worst));

  // Order one vs forward differences: the gap halves with dt.
  auto gap = [](double h) {
    FracSignal s{{}, h, 1.0};
    for (double t = 0.0; t <= 2.0 + 1e-12; t += h) s.samples.push_back(std::sin(t));
    std::vector<double> dd = *FracDerivative(s);
    double g = 0.0;
    for (size_t k = 0; k + 1 < dd.size(); ++k) {
      g = std::max(g, std::abs(dd[k] - (s.samples[k + 1] - s.samples[k]) / h));
    }
    return g;
  };
  const double g1 = gap(1e-2), g2 = gap(5e-3);
  v.Require(g1 <= 2.0 * 1e-2 && std::abs(g1 / g2 - 2.0) < 0.1,
            absl::StrFormat("order-one gaps %.3g, %.3g", g1, g2));
  absl::StatusOr<double> gh = GammaFn(0.5);
  const double gerr = gh.ok() ? std::abs(*gh - std::sqrt(M_PI)) : INFINITY;
  v.Require(gerr <= 1e-12, absl::StrFormat("Gamma(0.5) error %.3g", gerr));
  if (v.pass) {
    v.detail = absl::StrFormat("half-order max error %.2e, order-one gap %.2e at dt=1e-2 "
                               "(ratio %.2f), Gamma(0.5) error %.1e",
                               worst, g1, g1 / g2, gerr);
  }
  return v;
}

// 5. Mass conservation of the FPK step.
Verdict FpkConservation() {
  Verdict v;
  testing::MfgInstance in = testing::LqInstance(3, 1.0);
  in.grid.axes = {Axis{0, 1, 64}};
  in.grid.dt = 1e-4;
  in.m0 = testing::GaussianBump(in.grid.axes[0], 0.3, 0.05);
  std::vector<int> pol(64);
  for (size_t i = 0; i < 64; ++i) pol[i] = static_cast<int>(i % 5);
  std::vector<double> m = in.m0;
  double low = 0.0;
  for (int step = 0; step < 10000; ++step) {
    absl::StatusOr<std::vector<double>> next = FpkForwardStep({{}, m, pol}, in.prob, in.grid);
    if (!next.ok()) {
      v.Require(false, std::string(next.status().message()));
      return v;
    }
    m = std::move(*next);
    low = std::min(low, *std::min_element(m.begin(), m.end()));
  }
  const double loss = std::abs(std::accumulate(m.begin(), m.end(), 0.0) - 1.0);
  v.Require(loss < 1e-9, absl::StrFormat("mass error %.3g", loss));
  v.Require(low >= 0.0, absl::StrFormat("negative mass %.3g", low));
  if (v.pass) v.detail = absl::StrFormat("mass error %.1e after 1e4 steps, min mass %.1e", loss, low);
  return v;
}

// 6. MFG fixed point against dynamic programming and particles.
Verdict MfgOracle() {
  Verdict v;
  const auto t0 = Clock::now();
  testing::MfgInstance in = testing::SmallDpInstance();
  absl::StatusOr<MfgSolution> sol = SolveMfg(in.prob, in.grid, in.m0);
  if (!sol.ok() || !sol->converged) {
    v.Require(false, "solver did not converge");
    return v;
  }
  double dv = 0.0;
  for (size_t n = 0; n <= in.grid.steps; ++n) {
    for (size_t i = 0; i < in.grid.axes[0].n; ++i) {
      dv = std::max(dv, std::abs(sol->values[n][i] - testing::DpValue(in, sol->densities, n, i)));
    }
  }
  const std::vector<double> mc = testing::ParticleMeans(in, sol->policy, 1000000, 99);
  double rel = 0.0;
  for (size_t n = 0; n <= in.grid.steps; ++n) {
    rel = std::max(rel, std::abs(AxisMean(sol->densities[n], in.grid, 0) - mc[n]) /
                            std::abs(mc[n]));
  }
  const double secs = Seconds(t0);
  v.Require(dv <= 1e-6, absl::StrFormat("value gap %.3g", dv));
  v.Require(rel <= 0.02, absl::StrFormat("first-moment gap %.2f%%", 100 * rel));
  v.Require(secs < 60.0, absl::StrFormat("%.1f s", secs));
  if (v.pass) {
    v.detail = absl::StrFormat("value gap %.1e, first-moment gap %.2f%%, %.1f s", dv, 100 * rel,
                               secs);
  }
  return v;
}

// 7. Shapley allocations.
Verdict ShapleyChecks() {
  Verdict v;
  absl::StatusOr<Allocation> two = Shapley({100.0, {60.0, 80.0}});
  v.Require(two.ok() && two->payoffs == std::vector<double>{40.0, 60.0},
            "two-creditor instance is not (40, 60)");
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<size_t> size(1, 12);
  int bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    BankruptcyInstance inst = testing::RandomBankruptcy(size(rng), rng);
    absl::StatusOr<Allocation> a = Shapley(inst);
    if (!a.ok()) {
      ++bad;
      continue;
    }
    absl::StatusOr<AllocationReport> r = ValidateAllocation(inst, *a);
    if (!r.ok() || !r->ok()) ++bad;
  }
  v.Require(bad == 0, absl::StrCat(bad, " of 1000 random instances violate a condition"));
  double worst = 0.0;
  for (size_t n = 1; n <= 8; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      BankruptcyInstance inst = testing::RandomBankruptcy(n, rng);
      const std::vector<double> want = testing::PermutationShapley(inst);
      const std::vector<double> got = Shapley(inst)->payoffs;
      for (size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
    }
  }
  v.Require(worst <= 1e-9, absl::StrFormat("enumeration gap %.3g", worst));
  if (v.pass) {
    v.detail = absl::StrFormat("(40, 60) exact, 1000 instances valid, enumeration gap %.1e", worst);
  }
  return v;
}

// 8 and 9 share the sweep runs.
struct NestedSweep {
  std::vector<double> bi, tri;                 // pooled iterations
  std::vector<std::vector<double>> bi_l, tri_l;  // per lambda
  int monotone = 0;
  int bi_capped = 0;  // bilevel runs stopped by max_iter
  double seconds = 0.0;
  std::string error;
};

NestedSweep RunNestedSweep() {
  NestedSweep s;
  const std::vector<double> lambdas = {0.1, 0.3, 0.5};
  s.bi_l.resize(3);
  s.tri_l.resize(3);
  const auto t0 = Clock::now();
  for (uint64_t seed = 0; seed < 50; ++seed) {
    int prev = 0;
    bool ok = true;
    for (size_t li = 0; li < lambdas.size(); ++li) {
      NestedConfig cfg;
      cfg.lambda = lambdas[li];
      const BankruptcyInstance inst = NestedCoalition(cfg.l0, seed, cfg.lambda);
      absl::StatusOr<NestedResult> b = SolveBilevelAdmm(cfg, inst, SeededOptions(seed));
      absl::StatusOr<NestedResult> t = SolveTrilevelKuramoto(cfg, inst, SeededOptions(seed));
      if (!b.ok() || !t.ok()) {
        s.error = "solver error";
        return s;
      }
      s.bi_capped += !b->converged;
      ok &= b->iterations >= prev;
      prev = b->iterations;
      s.bi.push_back(b->iterations);
      s.tri.push_back(t->iterations);
      s.bi_l[li].push_back(b->iterations);
      s.tri_l[li].push_back(t->iterations);
    }
    s.monotone += ok;
  }
  s.seconds = Seconds(t0);
  return s;
}

Verdict Fig2(const NestedSweep& s) {
  Verdict v;
  if (!s.error.empty()) {
    v.Require(false, s.error);
    return v;
  }
  v.Require(s.monotone >= 40, absl::StrCat("monotone on ", s.monotone, "/50 seeds"));
  v.Require(Median(s.tri) < Median(s.bi),
            absl::StrFormat("median trilevel %g vs bilevel %g", Median(s.tri), Median(s.bi)));
  v.Require(s.seconds < 300.0, absl::StrFormat("%.0f s", s.seconds));
  v.Describe(absl::StrFormat(
      "monotone on %d/50 seeds; median iterations trilevel %g < bilevel %g; per lambda "
      "(0.1, 0.3, 0.5) bilevel %g/%g/%g, trilevel %g/%g/%g; %d bilevel runs hit max_iter; "
      "%.1f s",
      s.monotone, Median(s.tri), Median(s.bi), Median(s.bi_l[0]), Median(s.bi_l[1]),
      Median(s.bi_l[2]), Median(s.tri_l[0]), Median(s.tri_l[1]), Median(s.tri_l[2]),
      s.bi_capped, s.seconds));
  return v;
}

Verdict Complexity(const NestedSweep& s) {
  Verdict v;
  if (!s.error.empty()) {
    v.Require(false, s.error);
    return v;
  }
  absl::StatusOr<ComplexityReport> rep =
      NestedComplexity({4, 8, 16, 32, 64}, 0, Median(s.bi), Median(s.tri));
  if (!rep.ok()) {
    v.Require(false, std::string(rep.status().message()));
    return v;
  }
  v.Require(rep->bilevel.r2 > 0.99, absl::StrFormat("bilevel R2 %.4f", rep->bilevel.r2));
  v.Require(rep->trilevel.r2 > 0.99, absl::StrFormat("trilevel R2 %.4f", rep->trilevel.r2));
  v.Require(rep->run_ratio >= 2.25 && rep->run_ratio <= 3.75,
            absl::StrFormat("ratio %.3f outside [2.25, 3.75]", rep->run_ratio));
  v.Describe(absl::StrFormat(
      "R2 %.6f / %.6f; bilevel a=%.4f b=%.4f c=%.4f, trilevel a=%.4f b=%.4f c=%.4f; raw ratio "
      "%.3f, ratio scaled by median iterations (%g/%g) %.3f",
      rep->bilevel.r2, rep->trilevel.r2, rep->bilevel.a, rep->bilevel.b, rep->bilevel.c,
      rep->trilevel.a, rep->trilevel.b, rep->trilevel.c, rep->raw_ratio, Median(s.bi),
      Median(s.tri), rep->run_ratio));
  return v;
}

// 10. Two-oscillator lock angle.
Verdict LockAngle() {
  Verdict v;
  absl::StatusOr<OscillatorState> s = MakeOscillators({0.0, 0.0}, {0.0, 0.5}, 1.0);
  for (int i = 0; s.ok() && i < 5000; ++i) s = Step(*s, 0.01);
  if (!s.ok()) {
    v.Require(false, std::string(s.status().message()));
    return v;
  }
  const double diff = WrapDifference(s->phases[1] - s->phases[0]);
  const double err = std::abs(diff - std::asin(0.5));
  v.Require(err <= 1e-3, absl::StrFormat("lock angle error %.3g rad", err));
  if (v.pass) v.detail = absl::StrFormat("lock angle error %.1e rad at t=50", err);
  return v;
}

// 11. Fuzzy descent and a separable instance.
Verdict FuzzyDescent() {
  Verdict v;
  int broken = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    FuzzyInstance inst;
    const size_t k = 6 + seed % 10, dim = 2 + seed % 4;
    for (size_t j = 0; j < k; ++j) inst.data.push_back(testing::RandomSimplex(dim, rng));
    inst.clusters = 2 + seed % 3;
    inst.fuzzifier = 1.5 + 0.1 * (seed % 10);
    absl::StatusOr<FuzzyFit> fit = FitFuzzy(inst, {.seed = seed});
    if (!fit.ok()) {
      ++broken;
      continue;
    }
    for (size_t i = 1; i < fit->trace.size(); ++i) {
      if (fit->trace[i] > fit->trace[i - 1] * (1.0 + 1e-12)) {
        ++broken;
        break;
      }
    }
  }
  v.Require(broken == 0, absl::StrCat(broken, " of 100 traces increase"));

  FuzzyInstance sep;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> jitter(0.0, 0.02);
  for (int g = 0; g < 2; ++g) {
    for (int i = 0; i < 10; ++i) {
      std::vector<double> p = g ? std::vector<double>{0.05, 0.05, 0.9}
                                : std::vector<double>{0.9, 0.05, 0.05};
      double z = 0.0;
      for (double& x : p) z += (x += jitter(rng));
      for (double& x : p) x /= z;
      sep.data.push_back(p);
    }
  }
  absl::StatusOr<FuzzyFit> fit = FitFuzzy(sep, {.seed = 1});
  double weakest = 1.0;
  for (size_t j = 0; fit.ok() && j < sep.data.size(); ++j) {
    weakest = std::min(weakest, std::max(fit->state.memberships[0][j],
                                         fit->state.memberships[1][j]));
  }
  v.Require(fit.ok() && weakest > 0.95, absl::StrFormat("weakest max membership %.3f", weakest));
  if (v.pass) {
    v.detail = absl::StrFormat("100 traces non-increasing; separable weakest max membership %.4f",
                               weakest);
  }
  return v;
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// 12. Every pipeline twice with one seed.
Verdict Determinism() {
  Verdict v;
  const std::string root = std::filesystem::temp_directory_path() / "leakgame_acceptance";
  std::filesystem::remove_all(root);
  int files = 0;
  for (const char* command :
       {"funnel", "mfg", "bankruptcy", "nested", "kuramoto", "fuzzy", "report", "gen"}) {
    std::vector<RunResult> runs;
    for (int rep = 0; rep < 2; ++rep) {
      ExperimentConfig cfg;
      cfg.command = command;
      cfg.seed = 17;
      cfg.seeds = 4;
      cfg.out = absl::StrCat(root, "/", command, rep);
      runs.push_back(RunExperiment(cfg));
      v.Require(runs.back().status.ok(), absl::StrCat(command, " failed"));
    }
    if (runs[0].manifest.size() != runs[1].manifest.size()) {
      v.Require(false, absl::StrCat(command, " file lists differ"));
      continue;
    }
    for (size_t i = 0; i < runs[0].manifest.size(); ++i) {
      const std::string& f = runs[0].manifest[i].file;
      const bool same = Slurp(absl::StrCat(root, "/", command, "0/", f)) ==
                        Slurp(absl::StrCat(root, "/", command, "1/", f));
      v.Require(same, absl::StrCat(command, "/", f, " differs"));
      ++files;
    }
  }
  std::filesystem::remove_all(root);
  if (v.pass) v.detail = absl::StrCat(files, " CSVs byte-identical across reruns");
  return v;
}

}  // namespace
}  // namespace leakgame

int main() {
  using leakgame::Verdict;
  int failed = 0;
  auto report = [&](int id, const char* name, const Verdict& v) {
    std::printf("%s %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  };
  report(1, "funnel oracle equivalence", leakgame::FunnelOracle());
  report(2, "iteration CDF shape", leakgame::Fig1Shape());
  report(3, "trade-off monotonicity", leakgame::Tradeoff());
  report(4, "fractional calculus oracle", leakgame::FracOracle());
  report(5, "FPK conservation", leakgame::FpkConservation());
  report(6, "MFG fixed point vs DP", leakgame::MfgOracle());
  report(7, "Shapley correctness", leakgame::ShapleyChecks());
  const leakgame::NestedSweep sweep = leakgame::RunNestedSweep();
  report(8, "dissatisfaction sweep", leakgame::Fig2(sweep));
  report(9, "complexity fit", leakgame::Complexity(sweep));
  report(10, "Kuramoto lock angle", leakgame::LockAngle());
  report(11, "fuzzy descent", leakgame::FuzzyDescent());
  report(12, "determinism", leakgame::Determinism());
  std::printf("%d of 12 criteria passed\n", 12 - failed);
  return failed == 0 ? 0 : 1;
}
