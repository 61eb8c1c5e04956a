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
#include "leakgame/harness.h"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "leakgame/bankruptcy.h"
#include "leakgame/csv.h"
#include "leakgame/fuzzy.h"
#include "leakgame/kuramoto.h"

namespace leakgame {
namespace {

NestedOptions SeededOptions(uint64_t seed) {
  NestedOptions o;
  o.seed = seed;
  return o;
}

constexpr const char* kCommands[] = {"funnel", "mfg",   "bankruptcy", "nested",
                                     "kuramoto", "fuzzy", "report",    "gen"};

// Settings that take a value, in the order --help lists them.
constexpr const char* kKeys[] = {
    "seed", "out", "seeds", "alpha", "lambda", "estate", "claims", "grid",
    "max-iter", "tol", "workers", "p", "rho", "n", "oscillators", "coupling",
    "dt", "steps", "data", "clusters", "fuzzifier"};

absl::Status Bad(const std::string& key, const std::string& why) {
  return ConfigError(absl::StrCat(key, ": ", why));
}

template <typename T>
absl::Status ParseNumber(const std::string& key, const std::string& v, T& out) {
  bool ok = false;
  if constexpr (std::is_same_v<T, double>) {
    ok = absl::SimpleAtod(v, &out) && std::isfinite(out);
  } else {
    ok = absl::SimpleAtoi(v, &out);
  }
  return ok ? absl::OkStatus() : Bad(key, absl::StrCat("cannot parse '", v, "'"));
}

// Collects the files of one run and hashes them at the end.
class Writer {
 public:
  explicit Writer(std::string dir) : dir_(std::move(dir)) {}

  absl::Status Csv(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
    std::string text = absl::StrJoin(header, ",") + "\n";
    for (const auto& r : rows) absl::StrAppend(&text, absl::StrJoin(r, ","), "\n");
    absl::Status s = WriteText(Path(name), text);
    if (s.ok()) files_.push_back(name);
    return s;
  }
  // For module writers that take a path.
  absl::Status Adopt(const std::string& name, absl::Status written) {
    if (written.ok()) files_.push_back(name);
    return written;
  }
  std::string Path(const std::string& name) const { return dir_ + "/" + name; }

  std::vector<ManifestEntry> Manifest() const {
    std::vector<ManifestEntry> m;
    for (const std::string& f : files_) {
      absl::StatusOr<std::string> h = Sha256File(Path(f));
      std::error_code ec;
      const uint64_t bytes = std::filesystem::file_size(Path(f), ec);
      m.push_back({f, h.ok() ? *h : "unreadable", ec ? 0 : bytes});
    }
    return m;
  }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

std::string D(double v) { return FormatDouble(v); }

absl::Status Validate(const ExperimentConfig& c) {
  if (std::find(std::begin(kCommands), std::end(kCommands), c.command) ==
      std::end(kCommands)) {
    return Bad("command", absl::StrCat("unknown command '", c.command, "'"));
  }
  if (c.out.empty()) return Bad("out", "empty output directory");
  if (c.seeds < 1) return Bad("seeds", "need at least 1");
  if (c.alpha.empty()) return Bad("alpha", "empty list");
  for (double a : c.alpha) {
    if (!(a > 0.0 && a <= 1.0)) return Bad("alpha", "values must lie in (0, 1]");
  }
  if (c.lambda.empty()) return Bad("lambda", "empty list");
  for (double l : c.lambda) {
    if (!(l >= 0.0 && l < 1.0)) return Bad("lambda", "values must lie in [0, 1)");
  }
  if (!(c.estate >= 0.0)) return Bad("estate", "must be >= 0");
  if (c.claims.empty()) return Bad("claims", "empty list");
  if (!(c.grid > 0.0 && c.grid <= 0.5)) return Bad("grid", "step must lie in (0, 0.5]");
  if (c.max_iter < 0) return Bad("max-iter", "must be >= 0");
  if (!(c.tol >= 0.0)) return Bad("tol", "must be >= 0");
  if (c.workers < 0) return Bad("workers", "must be >= 0");
  if (!(c.p >= 0.0 && c.p <= 1.0)) return Bad("p", "must lie in [0, 1]");
  if (!(c.rho >= 0.0 && c.rho <= 1.0)) return Bad("rho", "must lie in [0, 1]");
  if (c.n < 1) return Bad("n", "need at least 1 sample");
  if (c.oscillators < 1) return Bad("oscillators", "need at least 1");
  if (!(c.dt > 0.0)) return Bad("dt", "must be > 0");
  if (c.steps < 1) return Bad("steps", "need at least 1");
  if (c.clusters < 1) return Bad("clusters", "need at least 1");
  if (!(c.fuzzifier > 1.0)) return Bad("fuzzifier", "must be > 1");
  return absl::OkStatus();
}

int Workers(const ExperimentConfig& c) {
  if (c.workers > 0) return c.workers;
  return static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 4u));
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void AppendCdf(std::vector<std::vector<std::string>>& rows,
               const std::vector<std::string>& key, const std::vector<double>& runs) {
  for (const auto& [v, f] : RunCdf(runs)) {
    std::vector<std::string> r = key;
    r.push_back(D(v));
    r.push_back(D(f));
    rows.push_back(std::move(r));
  }
}

// Relative excess leakage over the grid oracle, in percent.
double LossPct(double leak, double opt) {
  if (opt > 1e-12) return 100.0 * (leak - opt) / opt;
  return leak > 1e-12 ? INFINITY : 0.0;
}

absl::Status RunFunnel(const ExperimentConfig& c, Writer& w) {
  struct Run {
    absl::Status status;
    std::optional<FunnelSolution> funnel, greedy;
    double oracle = 0.0;
  };
  std::vector<Run> runs(c.seeds);
  ParallelFor(c.seeds, Workers(c), [&](int i) {
    const uint64_t seed = c.seed + i;
    FunnelProblem prob = Fig1FunnelProblem(seed);
    FunnelOptions opts;
    opts.seed = seed;
    if (c.max_iter > 0) opts.max_iter = c.max_iter;
    if (c.tol > 0.0) opts.tol = c.tol;
    Run& r = runs[i];
    absl::StatusOr<FunnelSolution> f = SolveFunnel(prob, opts);
    absl::StatusOr<FunnelSolution> g = GreedyBaseline(prob, opts);
    absl::StatusOr<double> o = BinaryGridOptimum(prob.p_sx, prob.bound, c.grid);
    if (!f.ok()) r.status = f.status();
    else if (!g.ok()) r.status = g.status();
    else if (!o.ok()) r.status = o.status();
    if (!r.status.ok()) return;
    r.funnel = std::move(*f);
    r.greedy = std::move(*g);
    r.oracle = *o;
  });
  for (const Run& r : runs) {
    if (!r.status.ok()) return r.status;
  }

  // MFG sweeps per order.
  std::vector<std::vector<double>> sweeps(c.alpha.size(), std::vector<double>(c.seeds));
  std::vector<absl::Status> mfg_status(c.alpha.size() * c.seeds);
  ParallelFor(static_cast<int>(mfg_status.size()), Workers(c), [&](int job) {
    const size_t a = job / c.seeds, i = job % c.seeds;
    MfgCase mc = Fig1MfgCase(c.seed + i, c.alpha[a]);
    MfgOptions opts;
    if (c.max_iter > 0) opts.max_sweeps = c.max_iter;
    if (c.tol > 0.0) opts.tol = c.tol;
    absl::StatusOr<MfgSolution> s = SolveMfg(mc.prob, mc.grid, mc.m0, opts);
    if (!s.ok()) {
      mfg_status[job] = s.status();
      return;
    }
    sweeps[a][i] = s->sweeps;
  });
  for (const absl::Status& s : mfg_status) {
    if (!s.ok()) return s;
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<double> fi, gi;
  for (const Run& r : runs) {
    fi.push_back(r.funnel->iterations);
    gi.push_back(r.greedy->iterations);
  }
  // The funnel and greedy solvers are integer order.
  AppendCdf(rows, {"funnel", D(1.0)}, fi);
  AppendCdf(rows, {"greedy", D(1.0)}, gi);
  for (size_t a = 0; a < c.alpha.size(); ++a) AppendCdf(rows, {"mfg", D(c.alpha[a])}, sweeps[a]);
  absl::Status s = w.Csv("fig1a.csv", {"algorithm", "alpha", "iterations", "cdf"}, rows);
  if (!s.ok()) return s;

  rows.clear();
  for (size_t i = 0; i < runs.size(); ++i) {
    const Run& r = runs[i];
    rows.push_back({std::to_string(c.seed + i), std::to_string(r.funnel->iterations),
                    std::to_string(r.greedy->iterations), D(r.funnel->leakage),
                    D(r.greedy->leakage), D(r.oracle)});
  }
  s = w.Csv("funnel_runs.csv",
            {"seed", "funnel_iterations", "greedy_iterations", "funnel_leakage_bits",
             "greedy_leakage_bits", "oracle_leakage_bits"},
            rows);
  if (!s.ok()) return s;

  // Trade-off curve on the first seed's source.
  const FunnelProblem base = Fig1FunnelProblem(c.seed);
  const double hx = Entropy(base.p_sx.ColMarginal());
  std::vector<double> bounds;
  for (int k = 0; k < 10; ++k) bounds.push_back(hx * k / 9.0);
  FunnelOptions topts;
  topts.seed = c.seed;
  if (c.max_iter > 0) topts.max_iter = c.max_iter;
  if (c.tol > 0.0) topts.tol = c.tol;
  absl::StatusOr<std::vector<TradeoffPoint>> pts =
      TradeoffSweep(base.p_sx, base.y_size, bounds, topts);
  if (!pts.ok()) return pts.status();
  rows.clear();
  for (const TradeoffPoint& p : *pts) {
    rows.push_back({D(hx > 0.0 ? p.utility / hx : 0.0), D(p.bound), D(p.utility),
                    D(p.leakage), p.ok ? "1" : "0"});
  }
  s = w.Csv("fig1b.csv",
            {"utility_norm", "bound_bits", "utility_bits", "leakage_bits", "ok"}, rows);
  if (!s.ok()) return s;

  rows.clear();
  const int cap = c.max_iter > 0 ? c.max_iter : FunnelOptions{}.max_iter;
  for (size_t i = 0; i < runs.size(); ++i) {
    for (const auto& [name, sol] : {std::pair<const char*, const FunnelSolution*>{
                                        "funnel", &*runs[i].funnel},
                                    {"greedy", &*runs[i].greedy}}) {
      for (const FunnelTracePoint& t : sol->trace) {
        rows.push_back({name, std::to_string(c.seed + i),
                        D(static_cast<double>(t.iter) / cap),
                        D(LossPct(t.leakage, runs[i].oracle))});
      }
    }
  }
  return w.Csv("fig1c.csv", {"algorithm", "seed", "iteration_norm", "loss_pct"}, rows);
}

absl::Status RunMfg(const ExperimentConfig& c, Writer& w) {
  const size_t jobs = c.alpha.size() * c.seeds;
  std::vector<absl::StatusOr<MfgSolution>> out(jobs, absl::UnknownError("not run"));
  ParallelFor(static_cast<int>(jobs), Workers(c), [&](int job) {
    MfgCase mc = Fig1MfgCase(c.seed + job % c.seeds, c.alpha[job / c.seeds]);
    MfgOptions opts;
    if (c.max_iter > 0) opts.max_sweeps = c.max_iter;
    if (c.tol > 0.0) opts.tol = c.tol;
    out[job] = SolveMfg(mc.prob, mc.grid, mc.m0, opts);
  });
  std::vector<std::vector<std::string>> rows, cdf;
  for (size_t a = 0; a < c.alpha.size(); ++a) {
    std::vector<double> sweeps;
    for (int i = 0; i < c.seeds; ++i) {
      const auto& s = out[a * c.seeds + i];
      if (!s.ok()) return s.status();
      rows.push_back({D(c.alpha[a]), std::to_string(c.seed + i), std::to_string(s->sweeps),
                      s->converged ? "1" : "0",
                      D(s->residuals.empty() ? 0.0 : s->residuals.back())});
      sweeps.push_back(s->sweeps);
    }
    AppendCdf(cdf, {D(c.alpha[a])}, sweeps);
  }
  absl::Status st = w.Csv("mfg_runs.csv",
                          {"alpha", "seed", "sweeps", "converged", "residual_l1"}, rows);
  if (!st.ok()) return st;
  st = w.Csv("mfg_cdf.csv", {"alpha", "sweeps", "cdf"}, cdf);
  if (!st.ok()) return st;

  // Density path of the first run.
  const MfgSolution& first = *out[0];
  const MfgCase mc = Fig1MfgCase(c.seed, c.alpha[0]);
  rows.clear();
  for (size_t k = 0; k < first.densities.size(); ++k) {
    for (size_t i = 0; i < first.densities[k].size(); ++i) {
      rows.push_back({std::to_string(k), D(mc.grid.axes[0].x(i)), D(first.densities[k][i]),
                      D(first.values[k][i])});
    }
  }
  return w.Csv("mfg_path.csv", {"step", "x", "mass", "value"}, rows);
}

absl::Status RunBankruptcy(const ExperimentConfig& c, Writer& w, std::ostream& log) {
  BankruptcyInstance inst{c.estate, c.claims};
  absl::StatusOr<Allocation> a = Shapley(inst, {.seed = c.seed});
  if (!a.ok()) return a.status();
  for (size_t i = 0; i < a->payoffs.size(); ++i) {
    log << "player " << i << ": " << FormatDouble(a->payoffs[i]) << "\n";
  }
  return w.Adopt("allocation.csv", WriteAllocationCsv(w.Path("allocation.csv"), inst, *a));
}

absl::Status RunNested(const ExperimentConfig& c, Writer& w) {
  const size_t nl = c.lambda.size();
  std::vector<absl::StatusOr<NestedResult>> bi(nl * c.seeds, absl::UnknownError("not run")),
      tri = bi;
  ParallelFor(static_cast<int>(nl * c.seeds), Workers(c), [&](int job) {
    const size_t li = job / c.seeds;
    const uint64_t seed = c.seed + job % c.seeds;
    NestedConfig cfg;
    cfg.lambda = c.lambda[li];
    if (c.max_iter > 0) cfg.max_iter = c.max_iter;
    if (c.tol > 0.0) cfg.tol = c.tol;
    const BankruptcyInstance inst = NestedCoalition(cfg.l0, seed, cfg.lambda);
    bi[job] = SolveBilevelAdmm(cfg, inst, SeededOptions(seed));
    tri[job] = SolveTrilevelKuramoto(cfg, inst, SeededOptions(seed));
  });
  std::vector<RunLogRow> log;
  std::vector<std::vector<std::string>> cdf;
  std::vector<double> all_bi, all_tri;
  for (const auto& [name, res, pool] :
       {std::tuple{"bilevel", &bi, &all_bi}, std::tuple{"trilevel", &tri, &all_tri}}) {
    for (size_t li = 0; li < nl; ++li) {
      std::vector<double> its;
      for (int i = 0; i < c.seeds; ++i) {
        const auto& r = (*res)[li * c.seeds + i];
        if (!r.ok()) return r.status();
        log.push_back({c.seed + i, name, c.lambda[li], r->iterations, r->residuals.back(),
                       r->ops.total()});
        its.push_back(r->iterations);
        pool->push_back(r->iterations);
      }
      AppendCdf(cdf, {name, D(c.lambda[li])}, its);
    }
  }
  absl::Status s = w.Adopt("nested_runs.csv", WriteRunLog(w.Path("nested_runs.csv"), log));
  if (!s.ok()) return s;
  s = w.Csv("fig2.csv", {"level", "lambda", "iterations", "cdf"}, cdf);
  if (!s.ok()) return s;

  absl::StatusOr<ComplexityReport> cx =
      NestedComplexity({4, 8, 16, 32, 64}, c.seed, Median(all_bi), Median(all_tri));
  if (!cx.ok()) return cx.status();
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : cx->traces) {
    rows.push_back({t.level, std::to_string(t.n), std::to_string(t.iteration),
                    std::to_string(t.ops)});
  }
  s = w.Csv("fig3.csv", {"level", "n", "iteration", "ops"}, rows);
  if (!s.ok()) return s;
  rows.clear();
  for (const auto& [name, f] : {std::pair<const char*, const ComplexityFit*>{"bilevel", &cx->bilevel},
                                {"trilevel", &cx->trilevel}}) {
    rows.push_back({name, D(f->a), D(f->b), D(f->c), D(f->r2), D(f->max_residual)});
  }
  s = w.Csv("fig3_fit.csv",
            {"level", "a_ops_per_n", "b_ops_per_nlog2n", "c_ops_per_n2", "r2",
             "max_residual_ops"},
            rows);
  if (!s.ok()) return s;
  return w.Csv("fig3_ratio.csv",
               {"raw_ratio", "run_ratio", "median_iterations_bilevel",
                "median_iterations_trilevel"},
               {{D(cx->raw_ratio), D(cx->run_ratio), D(Median(all_bi)), D(Median(all_tri))}});
}

absl::Status RunKuramoto(const ExperimentConfig& c, Writer& w) {
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI), freq(-0.5, 0.5);
  std::vector<double> phi(c.oscillators), omega(c.oscillators);
  for (int i = 0; i < c.oscillators; ++i) {
    phi[i] = phase(rng);
    omega[i] = freq(rng);
  }
  absl::StatusOr<OscillatorState> st = MakeOscillators(phi, omega, c.coupling);
  if (!st.ok()) return st.status();
  absl::StatusOr<std::vector<std::vector<double>>> rows =
      Simulate(*st, c.dt, c.steps, std::max(1, c.steps / 500));
  if (!rows.ok()) return rows.status();
  return w.Adopt("kuramoto.csv", WriteTrajectoryCsv(w.Path("kuramoto.csv"), *rows));
}

// Two groups of points on the 3-simplex, near opposite corners.
std::vector<std::vector<double>> TwoGroups(uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.0, 0.05);
  std::vector<std::vector<double>> data;
  for (int g = 0; g < 2; ++g) {
    for (int i = 0; i < 20; ++i) {
      std::vector<double> p = g == 0 ? std::vector<double>{0.8, 0.1, 0.1}
                                     : std::vector<double>{0.1, 0.1, 0.8};
      double z = 0.0;
      for (double& v : p) z += (v += jitter(rng));
      for (double& v : p) v /= z;
      data.push_back(std::move(p));
    }
  }
  return data;
}

absl::Status RunFuzzy(const ExperimentConfig& c, Writer& w) {
  FuzzyInstance inst;
  if (c.data.empty()) {
    inst.data = TwoGroups(c.seed);
  } else {
    absl::StatusOr<std::vector<std::vector<double>>> d = ReadFuzzyData(c.data);
    if (!d.ok()) return d.status();
    inst.data = std::move(*d);
  }
  inst.clusters = c.clusters;
  inst.fuzzifier = c.fuzzifier;
  FuzzyOptions opts;
  opts.seed = c.seed;
  opts.restarts = 5;
  if (c.max_iter > 0) opts.max_iter = c.max_iter;
  if (c.tol > 0.0) opts.tol = c.tol;
  absl::StatusOr<FuzzyFit> fit = FitFuzzy(inst, opts);
  if (!fit.ok()) return fit.status();
  absl::Status s = WriteFuzzyState(w.Path("fuzzy"), fit->state);
  if (!s.ok()) return s;
  w.Adopt("fuzzy_centers.csv", s).IgnoreError();
  w.Adopt("fuzzy_memberships.csv", s).IgnoreError();
  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < fit->trace.size(); ++i) {
    rows.push_back({std::to_string(i), D(fit->trace[i])});
  }
  return w.Csv("fuzzy_trace.csv", {"iteration", "objective_nats"}, rows);
}

absl::Status RunReport(Writer& w, std::ostream& log) {
  std::vector<std::vector<std::string>> rows;
  size_t width = 0;
  for (const ReportRow& r : ReportTable()) width = std::max(width, r.component.size());
  for (const ReportRow& r : ReportTable()) {
    rows.push_back({r.component, r.module, r.operation});
    log << std::left << std::setw(static_cast<int>(width) + 2) << r.component
        << std::setw(18) << r.module << r.operation << "\n";
  }
  return w.Csv("report.csv", {"component", "module", "operation"}, rows);
}

absl::Status RunGen(const ExperimentConfig& c, Writer& w) {
  absl::StatusOr<BernoulliSample> b = GenBernoulliSource(c.p, c.n, c.seed, c.rho);
  if (!b.ok()) return b.status();
  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < b->s.size(); ++i) {
    rows.push_back({std::to_string(b->s[i]), std::to_string(b->x[i])});
  }
  absl::Status s = w.Csv("bernoulli_samples.csv", {"s", "x"}, rows);
  if (!s.ok()) return s;
  rows.clear();
  for (size_t a = 0; a < 2; ++a) {
    for (size_t x = 0; x < 2; ++x) {
      rows.push_back({std::to_string(a), std::to_string(x), D(b->target.at(a, x)),
                      D(b->empirical.at(a, x))});
    }
  }
  return w.Csv("bernoulli_joint.csv", {"s", "x", "target_prob", "empirical_prob"}, rows);
}

}  // namespace

absl::StatusOr<std::vector<double>> ParseList(const std::string& text) {
  std::vector<double> out;
  for (absl::string_view part : absl::StrSplit(text, ',')) {
    part = absl::StripAsciiWhitespace(part);
    double v;
    if (!absl::SimpleAtod(part, &v) || !std::isfinite(v)) {
      return ConfigError(absl::StrCat("cannot parse list entry '", part, "'"));
    }
    out.push_back(v);
  }
  return out;
}

absl::Status ApplySetting(ExperimentConfig& cfg, const std::string& key,
                          const std::string& raw) {
  const std::string v(absl::StripAsciiWhitespace(raw));
  auto list = [&](std::vector<double>& dst) {
    absl::StatusOr<std::vector<double>> l = ParseList(v);
    if (!l.ok()) return Bad(key, std::string(l.status().message()));
    dst = std::move(*l);
    return absl::OkStatus();
  };
  if (key == "command") {
    cfg.command = v;
    return absl::OkStatus();
  }
  if (key == "out") {
    cfg.out = v;
    return absl::OkStatus();
  }
  if (key == "data") {
    cfg.data = v;
    return absl::OkStatus();
  }
  if (key == "alpha") return list(cfg.alpha);
  if (key == "lambda") return list(cfg.lambda);
  if (key == "claims") return list(cfg.claims);
  if (key == "seed") return ParseNumber(key, v, cfg.seed);
  if (key == "seeds") return ParseNumber(key, v, cfg.seeds);
  if (key == "estate") return ParseNumber(key, v, cfg.estate);
  if (key == "grid") return ParseNumber(key, v, cfg.grid);
  if (key == "max-iter") return ParseNumber(key, v, cfg.max_iter);
  if (key == "tol") return ParseNumber(key, v, cfg.tol);
  if (key == "workers") return ParseNumber(key, v, cfg.workers);
  if (key == "p") return ParseNumber(key, v, cfg.p);
  if (key == "rho") return ParseNumber(key, v, cfg.rho);
  if (key == "n") return ParseNumber(key, v, cfg.n);
  if (key == "oscillators") return ParseNumber(key, v, cfg.oscillators);
  if (key == "coupling") return ParseNumber(key, v, cfg.coupling);
  if (key == "dt") return ParseNumber(key, v, cfg.dt);
  if (key == "steps") return ParseNumber(key, v, cfg.steps);
  if (key == "clusters") return ParseNumber(key, v, cfg.clusters);
  if (key == "fuzzifier") return ParseNumber(key, v, cfg.fuzzifier);
  return ConfigError(absl::StrCat("unknown key '", key, "'"));
}

absl::Status ApplyConfigText(ExperimentConfig& cfg, const std::string& text) {
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != absl::string_view::npos) line = line.substr(0, hash);
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return ConfigError(absl::StrCat("line ", line_no, ": expected key = value"));
    }
    const std::string key(absl::StripAsciiWhitespace(line.substr(0, eq)));
    absl::Status s = ApplySetting(cfg, key, std::string(line.substr(eq + 1)));
    if (!s.ok()) {
      return ConfigError(absl::StrCat("line ", line_no, ": ",
                                      absl::StripPrefix(s.message(), "config: ")));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> Sha256File(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return hex.str();
}

absl::StatusOr<BernoulliSample> GenBernoulliSource(double p, int n, uint64_t seed,
                                                   double rho) {
  if (!(p >= 0.0 && p <= 1.0)) return ValidationError("need p in [0, 1]");
  if (!(rho >= 0.0 && rho <= 1.0)) return ValidationError("need rho in [0, 1]");
  if (n < 1) return ValidationError("need n >= 1");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bit(p), copy(rho);
  std::vector<int> s(n), x(n);
  std::vector<double> counts(4, 0.0);
  for (int i = 0; i < n; ++i) {
    x[i] = bit(rng);
    const bool same = copy(rng);
    const int other = bit(rng);
    s[i] = same ? x[i] : other;
    counts[2 * s[i] + x[i]] += 1.0;
  }
  for (double& v : counts) v /= n;
  // P(S = a, X = b) = P(X = b) (rho [a == b] + (1 - rho) P(S' = a)).
  std::vector<double> target(4);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double pb = b ? p : 1.0 - p, pa = a ? p : 1.0 - p;
      target[2 * a + b] = pb * (rho * (a == b) + (1.0 - rho) * pa);
    }
  }
  absl::StatusOr<JointPmf> emp = JointPmf::Create(2, 2, counts);
  absl::StatusOr<JointPmf> tgt = JointPmf::Create(2, 2, target);
  if (!emp.ok()) return emp.status();
  if (!tgt.ok()) return tgt.status();
  return BernoulliSample{std::move(s), std::move(x), std::move(*emp), std::move(*tgt)};
}

const std::vector<ReportRow>& ReportTable() {
  static const std::vector<ReportRow> table = {
      {"release Y from X to minimize leakage I(S;Y) under a utility bound", "privacy-funnel",
       "SolveFunnel"},
      {"leakage as the gap I(S;X) - I(S;Y) or an expected posterior KL", "prob-core",
       "DistortionGap; ExpectedPosteriorKl"},
      {"Markov chain S -> X -> Y", "prob-core", "ComposeMarkov"},
      {"fractional-order time derivative", "frac-calc", "FracDerivative; GammaFn"},
      {"fractional-order gradient operator", "frac-calc", "FracGradient"},
      {"non-cooperative non-zero-sum game diagnostic (header rows)", "privacy-funnel",
       "HeaderRows"},
      {"control laws and value functions (HJB)", "mfg-solver", "HjbBackwardStep"},
      {"population density transport (FPK)", "mfg-solver", "FpkForwardStep; FpkFaceStep"},
      {"normalisation of the exponential control law", "privacy-funnel", "SolveFunnel"},
      {"joint two-dimensional mean-field game", "mfg-solver", "SolveMfg (minimax mode)"},
      {"nonzero value sum", "mfg-solver", "ValueSumNonzero"},
      {"saddle condition", "mfg-solver", "SaddleCheck"},
      {"stability criterion", "mfg-solver", "StabilityCriterion"},
      {"agent movement on a directed neighbour graph", "mfg-solver",
       "HjbBackwardStep; FpkForwardStep"},
      {"federated funnel iteration exchanging the shared posterior", "privacy-funnel",
       "SolveFunnel"},
      {"greedy baseline", "privacy-funnel", "GreedyBaseline"},
      {"fuzzy clustering objective under KL", "hypergame-fuzzy",
       "FuzzyObjective; UpdateMemberships; UpdateCenters; FitFuzzy"},
      {"multi-user bankruptcy game", "bankruptcy", "CoalitionWorth; BankruptcyEventProbability"},
      {"Shapley weighted pay-off", "bankruptcy", "Shapley; ValidateAllocation"},
      {"bilevel discrete mean-field game with ADMM consensus", "nested-games",
       "SolveBilevelAdmm"},
      {"trilevel nested game with phase coupling", "nested-games", "SolveTrilevelKuramoto"},
      {"Kuramoto law with coupling gain D", "kuramoto", "Step; Coherence; Simulate"},
      {"complexity orders of the two solvers", "nested-games",
       "FitComplexity; BilevelOpsPerIteration; TrilevelOpsPerIteration"},
      {"iteration CDFs while changing alpha", "harness-cli", "funnel; mfg commands"},
      {"dissatisfaction-rate sweep", "harness-cli", "nested command"},
      {"Bernoulli-distributed data sets", "harness-cli", "GenBernoulliSource; gen command"},
  };
  return table;
}

FunnelProblem Fig1FunnelProblem(uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double p = 0.2 + 0.6 * u(rng), rho = 0.3 + 0.6 * u(rng);
  // Seeds for the source never collide with the caller's own seed.
  absl::StatusOr<BernoulliSample> b = GenBernoulliSource(p, 10000, rng(), rho);
  FunnelProblem prob{b->empirical, 2, UtilityMode::kRate, 0.0};
  prob.bound = 0.5 * Entropy(prob.p_sx.ColMarginal());
  return prob;
}

MfgCase Fig1MfgCase(uint64_t seed, double alpha) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  const double center = u(rng), target = u(rng);
  MfgCase mc;
  mc.grid.axes = {Axis{0.0, 1.0, 21}};
  mc.grid.dt = 0.01;
  mc.grid.steps = 20;
  mc.grid.sigma = 0.1;
  mc.grid.alpha = alpha;
  mc.prob.drift = {DriftSpec{DriftKind::kLinear, 0.25, 0.0, 1.0}};
  mc.prob.controls = {{-1.0, -0.5, 0.0, 0.5, 1.0}};
  mc.prob.cost.state_weight = 1.0;
  mc.prob.cost.target = {target};
  mc.prob.cost.control_weight = 0.5;
  mc.prob.cost.congestion = 0.01;
  mc.prob.cost.terminal_weight = 1.0;
  const Axis& ax = mc.grid.axes[0];
  double z = 0.0;
  for (size_t i = 0; i < ax.n; ++i) {
    const double d = (ax.x(i) - center) / 0.1;
    mc.m0.push_back(std::exp(-0.5 * d * d));
    z += mc.m0.back();
  }
  for (double& v : mc.m0) v /= z;
  return mc;
}

BankruptcyInstance NestedCoalition(int n, uint64_t seed, double lambda) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(10.0, 100.0);
  BankruptcyInstance inst;
  for (int i = 0; i < n; ++i) inst.claims.push_back(u(rng));
  inst.estate =
      (1.0 - lambda) * std::accumulate(inst.claims.begin(), inst.claims.end(), 0.0);
  return inst;
}

std::vector<std::pair<double, double>> RunCdf(std::vector<double> runs) {
  std::sort(runs.begin(), runs.end());
  std::vector<std::pair<double, double>> cdf;
  for (size_t i = 0; i < runs.size(); ++i) {
    cdf.emplace_back(runs[i], static_cast<double>(i + 1) / static_cast<double>(runs.size()));
  }
  return cdf;
}

void ParallelFor(int n, int workers, const std::function<void(int)>& body) {
  const int k = std::clamp(workers, 1, std::max(n, 1));
  if (k == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < k; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) body(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

absl::StatusOr<ComplexityReport> NestedComplexity(const std::vector<int>& sizes,
                                                  uint64_t seed,
                                                  double median_iter_bilevel,
                                                  double median_iter_trilevel) {
  ComplexityReport rep;
  std::vector<double> n, bi, tri;
  for (int size : sizes) {
    NestedConfig cfg;
    cfg.l0 = size;
    cfg.l = size + 4;
    const BankruptcyInstance inst = NestedCoalition(size, seed, cfg.lambda);
    absl::StatusOr<NestedResult> b = SolveBilevelAdmm(cfg, inst, SeededOptions(seed));
    if (!b.ok()) return b.status();
    absl::StatusOr<NestedResult> t = SolveTrilevelKuramoto(cfg, inst, SeededOptions(seed));
    if (!t.ok()) return t.status();
    n.push_back(size);
    const int64_t pb = b->ops.total() / b->iterations, pt = t->ops.total() / t->iterations;
    bi.push_back(static_cast<double>(pb));
    tri.push_back(static_cast<double>(pt));
    for (int i = 1; i <= b->iterations; ++i) rep.traces.push_back({"bilevel", size, i, i * pb});
    for (int i = 1; i <= t->iterations; ++i) rep.traces.push_back({"trilevel", size, i, i * pt});
  }
  absl::StatusOr<ComplexityFit> fb = FitComplexity(n, bi);
  if (!fb.ok()) return fb.status();
  absl::StatusOr<ComplexityFit> ft = FitComplexity(n, tri);
  if (!ft.ok()) return ft.status();
  rep.bilevel = *fb;
  rep.trilevel = *ft;
  rep.raw_ratio = fb->a / ft->a;
  rep.run_ratio = median_iter_trilevel > 0.0
                      ? rep.raw_ratio * median_iter_bilevel / median_iter_trilevel
                      : 0.0;
  return rep;
}

RunResult RunExperiment(const ExperimentConfig& cfg, std::ostream* log_out) {
  RunResult res;
  res.status = Validate(cfg);
  if (!res.status.ok()) return res;
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) {
    res.status = absl::InternalError(absl::StrCat("cannot create ", cfg.out, ": ", ec.message()));
    return res;
  }
  Writer w(cfg.out);
  std::ostringstream log;
  const std::string& c = cfg.command;
  if (c == "funnel") res.status = RunFunnel(cfg, w);
  else if (c == "mfg") res.status = RunMfg(cfg, w);
  else if (c == "bankruptcy") res.status = RunBankruptcy(cfg, w, log);
  else if (c == "nested") res.status = RunNested(cfg, w);
  else if (c == "kuramoto") res.status = RunKuramoto(cfg, w);
  else if (c == "fuzzy") res.status = RunFuzzy(cfg, w);
  else if (c == "report") res.status = RunReport(w, log);
  else res.status = RunGen(cfg, w);

  if (log_out != nullptr) *log_out << log.str();
  res.manifest = w.Manifest();
  std::string text = "file,sha256,bytes\n";
  for (const ManifestEntry& m : res.manifest) {
    absl::StrAppend(&text, m.file, ",", m.sha256, ",", m.bytes, "\n");
  }
  absl::Status ms = WriteText(w.Path("manifest.csv"), text);
  if (res.status.ok()) res.status = ms;
  return res;
}

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"leakgame experiment runner"};
  std::string command, config_path;
  app.add_option("command", command,
                 "funnel | mfg | bankruptcy | nested | kuramoto | fuzzy | report | gen");
  app.add_option("--config", config_path, "key = value file; flags override it");
  std::vector<std::string> values(std::size(kKeys));
  std::vector<CLI::Option*> opts;
  for (size_t i = 0; i < std::size(kKeys); ++i) {
    opts.push_back(app.add_option(absl::StrCat("--", kKeys[i]), values[i]));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage: " << e.what() << "\n";
    return kExitUsage;
  }

  ExperimentConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      err << "usage: cannot read config " << config_path << "\n";
      return kExitUsage;
    }
    std::stringstream text;
    text << in.rdbuf();
    absl::Status s = ApplyConfigText(cfg, text.str());
    if (!s.ok()) {
      err << "usage: " << config_path << ": " << absl::StripPrefix(s.message(), "config: ")
          << "\n";
      return kExitUsage;
    }
  }
  if (!command.empty()) cfg.command = command;
  for (size_t i = 0; i < opts.size(); ++i) {
    if (opts[i]->count() == 0) continue;
    absl::Status s = ApplySetting(cfg, kKeys[i], values[i]);
    if (!s.ok()) {
      err << "usage: --" << absl::StripPrefix(s.message(), "config: ") << "\n";
      return kExitUsage;
    }
  }
  if (cfg.command.empty()) {
    err << "usage: missing command\n" << app.help();
    return kExitUsage;
  }
  absl::Status valid = Validate(cfg);
  if (!valid.ok()) {
    err << "usage: " << absl::StripPrefix(valid.message(), "config: ") << "\n";
    return kExitUsage;
  }

  RunResult r = RunExperiment(cfg, &out);
  for (const ManifestEntry& m : r.manifest) {
    out << m.sha256 << "  " << cfg.out << "/" << m.file << "\n";
  }
  if (!r.status.ok()) {
    err << cfg.command << " failed: " << r.status << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace leakgame
