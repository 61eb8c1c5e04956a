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
#include "leakgame/funnel.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "absl/strings/str_cat.h"

namespace leakgame {
namespace {

constexpr double kLn2 = 0.69314718055994530942;
// Round-off allowance when testing a constraint value against its bound.
constexpr double kFeasSlack = 1e-12;
constexpr int kBisections = 60;

// Channel stored row-major, nx * ny.
using Rows = std::vector<double>;

struct Instance {
  size_t ns, nx, ny;
  std::vector<double> psx;  // ns * nx
  std::vector<double> px;   // nx
  std::vector<double> ps;   // ns
  std::vector<double> s_given_x;  // nx * ns
  UtilityMode mode;
  double threshold;  // constraint is f(q) >= threshold, f in bits
};

double MiBits(const std::vector<double>& joint, size_t r, size_t c) {
  std::vector<double> a(r, 0.0), b(c, 0.0);
  for (size_t i = 0; i < r; ++i) {
    for (size_t j = 0; j < c; ++j) {
      a[i] += joint[i * c + j];
      b[j] += joint[i * c + j];
    }
  }
  double mi = 0.0;
  for (size_t i = 0; i < r; ++i) {
    for (size_t j = 0; j < c; ++j) {
      double p = joint[i * c + j];
      if (p > 0.0) mi += p * std::log(p / (a[i] * b[j]));
    }
  }
  mi /= kLn2;
  return mi < 0.0 ? 0.0 : mi;
}

FunnelStats Stats(const Instance& in, const Rows& q) {
  std::vector<double> sy(in.ns * in.ny, 0.0), xy(in.nx * in.ny, 0.0);
  for (size_t x = 0; x < in.nx; ++x) {
    for (size_t y = 0; y < in.ny; ++y) {
      double w = q[x * in.ny + y];
      xy[x * in.ny + y] = in.px[x] * w;
      for (size_t s = 0; s < in.ns; ++s) {
        sy[s * in.ny + y] += in.psx[s * in.nx + x] * w;
      }
    }
  }
  return {MiBits(sy, in.ns, in.ny), MiBits(xy, in.nx, in.ny)};
}

double ConstraintValue(const Instance& in, const FunnelStats& st) {
  return in.mode == UtilityMode::kRate ? st.utility : st.leakage;
}

bool Feasible(const Instance& in, const Rows& q) {
  return ConstraintValue(in, Stats(in, q)) >= in.threshold - kFeasSlack;
}

// One majorize-minimize update. The leakage I(S;Y) is bounded above by a
// surrogate that is tight at q and separable over rows; the constraint
// function (convex in q) is bounded below by its tangent. Minimizing the
// surrogate under the linearized constraint gives rows of the form
// exp(base + beta * h), with beta >= 0 set by bisection.
Rows Step(const Instance& in, const Rows& q) {
  const size_t ns = in.ns, nx = in.nx, ny = in.ny;
  std::vector<double> qy(ny, 0.0), ysy(ns * ny, 0.0);
  for (size_t x = 0; x < nx; ++x) {
    for (size_t y = 0; y < ny; ++y) {
      double w = q[x * ny + y];
      qy[y] += in.px[x] * w;
      for (size_t s = 0; s < ns; ++s) {
        if (in.ps[s] > 0.0) ysy[s * ny + y] += in.psx[s * nx + x] * w / in.ps[s];
      }
    }
  }
  std::vector<double> base(nx * ny, 0.0), h(nx * ny, 0.0);
  for (size_t x = 0; x < nx; ++x) {
    if (in.px[x] == 0.0) continue;
    for (size_t y = 0; y < ny; ++y) {
      double w = q[x * ny + y];
      if (w <= 0.0) continue;
      double cross = 0.0;
      for (size_t s = 0; s < ns; ++s) {
        double post = in.s_given_x[x * ns + s];
        if (post > 0.0) cross += post * std::log(ysy[s * ny + y]);
      }
      double lqy = std::log(qy[y]);
      base[x * ny + y] = lqy + std::log(w) - cross;
      h[x * ny + y] = in.mode == UtilityMode::kRate ? std::log(w) - lqy
                                                    : cross - lqy;
    }
  }
  auto rows = [&](double beta) {
    Rows out(q);
    for (size_t x = 0; x < nx; ++x) {
      if (in.px[x] == 0.0) continue;
      double top = -std::numeric_limits<double>::infinity();
      for (size_t y = 0; y < ny; ++y) {
        if (q[x * ny + y] > 0.0) {
          top = std::max(top, base[x * ny + y] + beta * h[x * ny + y]);
        }
      }
      double z = 0.0;
      for (size_t y = 0; y < ny; ++y) {
        double& o = out[x * ny + y];
        o = q[x * ny + y] > 0.0
                ? std::exp(base[x * ny + y] + beta * h[x * ny + y] - top)
                : 0.0;
        z += o;
      }
      for (size_t y = 0; y < ny; ++y) out[x * ny + y] /= z;
    }
    return out;
  };
  auto lin = [&](const Rows& r) {
    double v = 0.0;
    for (size_t x = 0; x < nx; ++x) {
      for (size_t y = 0; y < ny; ++y) v += in.px[x] * r[x * ny + y] * h[x * ny + y];
    }
    return v / kLn2;
  };
  Rows free = rows(0.0);
  if (lin(free) >= in.threshold) return free;
  double lo = 0.0, hi = 1.0;
  while (lin(rows(hi)) < in.threshold) {
    hi *= 2.0;
    if (hi > 1e8) return q;
  }
  for (int i = 0; i < kBisections; ++i) {
    double mid = 0.5 * (lo + hi);
    if (lin(rows(mid)) >= in.threshold) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  Rows out = rows(hi);
  // The tangent bound guarantees feasibility in exact arithmetic; guard
  // against round-off at an active constraint.
  return Feasible(in, out) ? out : q;
}

Rows Mix(const Rows& a, const Rows& b, double t) {
  Rows out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - t) * a[i] + t * b[i];
  return out;
}

// Slides q toward each constant channel while the constraint holds and
// keeps the lowest-leakage result. Along such a segment both I(S;Y) and the
// constraint function are convex and vanish at the far end, hence
// non-increasing, so the feasible part is an interval found by bisection.
Rows ProjectToBoundary(const Instance& in, const Rows& q) {
  FunnelStats st = Stats(in, q);
  if (ConstraintValue(in, st) <= in.threshold) return q;
  Rows best = q;
  double best_leak = st.leakage;
  for (size_t y = 0; y < in.ny; ++y) {
    Rows target(q.size(), 0.0);
    for (size_t x = 0; x < in.nx; ++x) target[x * in.ny + y] = 1.0;
    double t;
    if (in.threshold <= 0.0) {
      t = 1.0;
    } else {
      double lo = 0.0, hi = 1.0;
      for (int i = 0; i < kBisections; ++i) {
        double mid = 0.5 * (lo + hi);
        if (ConstraintValue(in, Stats(in, Mix(q, target, mid))) >=
            in.threshold) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      t = lo;
    }
    Rows cand = Mix(q, target, t);
    FunnelStats cs = Stats(in, cand);
    if (cs.leakage < best_leak && ConstraintValue(in, cs) >= in.threshold) {
      best = std::move(cand);
      best_leak = cs.leakage;
    }
  }
  return best;
}

// Deterministic map from inputs to outputs that spreads input mass evenly
// over the outputs (largest input first into the lightest output).
Rows BalancedMap(const Instance& in) {
  std::vector<size_t> order(in.nx);
  for (size_t x = 0; x < in.nx; ++x) order[x] = x;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return in.px[a] > in.px[b]; });
  std::vector<double> load(in.ny, 0.0);
  Rows map(in.nx * in.ny, 0.0);
  for (size_t x : order) {
    size_t y = std::min_element(load.begin(), load.end()) - load.begin();
    load[y] += in.px[x];
    map[x * in.ny + y] = 1.0;
  }
  return map;
}

// Moves an infeasible start toward a balanced deterministic map just far
// enough to meet the constraint.
absl::StatusOr<Rows> MakeFeasible(const Instance& in, const Rows& q) {
  if (Feasible(in, q)) return q;
  Rows map = BalancedMap(in);
  if (!Feasible(in, map)) {
    return InfeasibleError(
        "no feasible channel found for this output alphabet size");
  }
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < kBisections; ++i) {
    double mid = 0.5 * (lo + hi);
    if (Feasible(in, Mix(q, map, mid))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return Mix(q, map, hi);
}

Rows NoiseRows(size_t nx, size_t ny, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Rows n(nx * ny);
  for (size_t x = 0; x < nx; ++x) {
    double z = 0.0;
    for (size_t y = 0; y < ny; ++y) z += (n[x * ny + y] = u(rng));
    for (size_t y = 0; y < ny; ++y) n[x * ny + y] /= z;
  }
  return n;
}

// Starting channels. With enough outputs: the identity with one agent's row
// perturbed, once per agent, plus the identity with every row perturbed.
// The perturbation starts at 5% and is halved until the start is feasible.
// With fewer outputs than inputs: uniform rows plus 1% noise.
absl::StatusOr<std::vector<Rows>> Starts(const Instance& in, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const size_t nx = in.nx, ny = in.ny;
  std::vector<Rows> out;
  if (ny < nx) {
    Rows noise = NoiseRows(nx, ny, rng);
    Rows q(nx * ny);
    for (size_t x = 0; x < nx; ++x) {
      double z = 0.0;
      for (size_t y = 0; y < ny; ++y) {
        z += (q[x * ny + y] = 1.0 / ny + 0.01 * noise[x * ny + y]);
      }
      for (size_t y = 0; y < ny; ++y) q[x * ny + y] /= z;
    }
    absl::StatusOr<Rows> f = MakeFeasible(in, q);
    if (!f.ok()) return f.status();
    out.push_back(*std::move(f));
    return out;
  }
  Rows ident = Channel::Identity(nx, ny).probs();
  Rows noise = NoiseRows(nx, ny, rng);
  for (size_t agent = 0; agent <= nx; ++agent) {
    Rows q;
    for (double d = 0.05; d > 1e-12; d *= 0.5) {
      q = ident;
      for (size_t x = 0; x < nx; ++x) {
        if (agent < nx && x != agent) continue;
        for (size_t y = 0; y < ny; ++y) {
          q[x * ny + y] = (1.0 - d) * ident[x * ny + y] + d * noise[x * ny + y];
        }
      }
      if (Feasible(in, q)) break;
      q.clear();
    }
    if (q.empty()) q = ident;
    if (!Feasible(in, q)) return InfeasibleError("identity is infeasible");
    out.push_back(std::move(q));
  }
  return out;
}

absl::StatusOr<Instance> MakeInstance(const FunnelProblem& prob) {
  absl::Status s = ValidateProblem(prob);
  if (!s.ok()) return s;
  Instance in;
  in.ns = prob.p_sx.rows();
  in.nx = prob.p_sx.cols();
  in.ny = prob.y_size;
  in.psx = prob.p_sx.probs();
  in.px = prob.p_sx.ColMarginal().probs();
  in.ps = prob.p_sx.RowMarginal().probs();
  in.s_given_x.assign(in.nx * in.ns, 0.0);
  for (size_t x = 0; x < in.nx; ++x) {
    if (in.px[x] == 0.0) continue;
    for (size_t s = 0; s < in.ns; ++s) {
      in.s_given_x[x * in.ns + s] = in.psx[s * in.nx + x] / in.px[x];
    }
  }
  in.mode = prob.mode;
  in.threshold = prob.mode == UtilityMode::kRate
                     ? prob.bound
                     : MutualInformation(prob.p_sx) - prob.bound;
  return in;
}

FunnelSolution Finish(const Instance& in, const Rows& q, int iterations,
                      bool converged, std::vector<FunnelTracePoint> trace) {
  FunnelStats st = Stats(in, q);
  return FunnelSolution{*Channel::Create(in.nx, in.ny, q), st.leakage,
                        st.utility, iterations, converged, std::move(trace)};
}

}  // namespace

absl::Status ValidateProblem(const FunnelProblem& prob) {
  if (prob.y_size == 0) return ValidationError("y_size must be positive");
  if (!std::isfinite(prob.bound) || prob.bound < 0.0) {
    return ValidationError("bound must be a nonnegative number");
  }
  if (prob.mode == UtilityMode::kRate) {
    double hx = Entropy(prob.p_sx.ColMarginal());
    if (prob.bound > hx + kFeasSlack) {
      return InfeasibleError(
          absl::StrCat("rate ", prob.bound, " exceeds H(X) = ", hx));
    }
    double cap = std::log2(static_cast<double>(prob.y_size));
    if (prob.bound > cap + kFeasSlack) {
      return InfeasibleError(
          absl::StrCat("rate ", prob.bound, " exceeds log2 |Y| = ", cap));
    }
  } else {
    double isx = MutualInformation(prob.p_sx);
    if (prob.bound > isx + kFeasSlack) {
      return ValidationError(
          absl::StrCat("gap bound ", prob.bound, " exceeds I(S;X) = ", isx));
    }
  }
  return absl::OkStatus();
}

std::vector<size_t> HeaderRows(const JointPmf& p_sx, double threshold) {
  Pmf ps = p_sx.RowMarginal();
  Pmf px = p_sx.ColMarginal();
  std::vector<size_t> out;
  for (size_t x = 0; x < p_sx.cols(); ++x) {
    if (px[x] == 0.0) continue;
    double contrib = 0.0;
    for (size_t s = 0; s < p_sx.rows(); ++s) {
      double joint = p_sx.at(s, x);
      if (joint > 0.0) contrib += joint * std::log2(joint / (px[x] * ps[s]));
    }
    if (contrib > threshold) out.push_back(x);
  }
  return out;
}

absl::StatusOr<FunnelStats> Evaluate(const JointPmf& p_sx,
                                     const Channel& ch) {
  absl::StatusOr<JointPmf> sy = ComposeMarkov(p_sx, ch);
  if (!sy.ok()) return sy.status();
  absl::StatusOr<JointPmf> xy = InputOutputJoint(p_sx.ColMarginal(), ch);
  if (!xy.ok()) return xy.status();
  return FunnelStats{MutualInformation(*sy), MutualInformation(*xy)};
}

absl::StatusOr<FunnelSolution> SolveFunnel(const FunnelProblem& prob,
                                           const FunnelOptions& opts) {
  if (!(opts.tol > 0.0)) return ValidationError("tol must be positive");
  absl::StatusOr<Instance> inst = MakeInstance(prob);
  if (!inst.ok()) return inst.status();
  const Instance& in = *inst;

  std::vector<Rows> cands;
  if (opts.init.has_value()) {
    if (opts.init->inputs() != in.nx || opts.init->outputs() != in.ny) {
      return ShapeError("initial channel has the wrong shape");
    }
    absl::StatusOr<Rows> f = MakeFeasible(in, opts.init->probs());
    if (!f.ok()) return f.status();
    cands.push_back(*std::move(f));
  } else {
    absl::StatusOr<std::vector<Rows>> s = Starts(in, opts.seed);
    if (!s.ok()) return s.status();
    cands = *std::move(s);
  }
  for (const Channel& c : opts.extra_starts) {
    if (c.inputs() == in.nx && c.outputs() == in.ny &&
        Feasible(in, c.probs())) {
      cands.push_back(c.probs());
    }
  }

  // Independent inputs: nothing leaks, so keep the most useful start.
  if (HeaderRows(prob.p_sx, opts.header_threshold).empty()) {
    Rows q = in.ny >= in.nx ? Channel::Identity(in.nx, in.ny).probs()
                            : cands.front();
    FunnelStats st = Stats(in, q);
    return Finish(in, q, 0, true, {{0, st.leakage, st.utility}});
  }

  std::vector<double> leak(cands.size());
  std::vector<bool> done(cands.size(), false);
  size_t best = 0;
  for (size_t i = 0; i < cands.size(); ++i) {
    leak[i] = Stats(in, cands[i]).leakage;
    if (leak[i] < leak[best]) best = i;
  }
  std::vector<FunnelTracePoint> trace;
  trace.push_back({0, leak[best], Stats(in, cands[best]).utility});

  int it = 0;
  bool converged = false;
  while (it < opts.max_iter) {
    ++it;
    for (size_t i = 0; i < cands.size(); ++i) {
      if (done[i]) continue;
      Rows q = ProjectToBoundary(in, Step(in, cands[i]));
      double l = Stats(in, q).leakage;
      if (l > leak[i]) {
        // Round-off only; keep the previous iterate.
        done[i] = true;
        continue;
      }
      if (leak[i] - l < opts.tol) done[i] = true;
      cands[i] = std::move(q);
      leak[i] = l;
    }
    for (size_t i = 0; i < cands.size(); ++i) {
      if (leak[i] < leak[best]) best = i;
    }
    trace.push_back({it, leak[best], Stats(in, cands[best]).utility});
    if (std::all_of(done.begin(), done.end(), [](bool d) { return d; })) {
      converged = true;
      break;
    }
  }
  return Finish(in, cands[best], it, converged, std::move(trace));
}

absl::StatusOr<FunnelSolution> GreedyBaseline(const FunnelProblem& prob,
                                              const FunnelOptions& opts) {
  if (!(opts.tol > 0.0)) return ValidationError("tol must be positive");
  absl::StatusOr<Instance> inst = MakeInstance(prob);
  if (!inst.ok()) return inst.status();
  const Instance& in = *inst;

  Rows q;
  if (opts.init.has_value()) {
    if (opts.init->inputs() != in.nx || opts.init->outputs() != in.ny) {
      return ShapeError("initial channel has the wrong shape");
    }
    absl::StatusOr<Rows> f = MakeFeasible(in, opts.init->probs());
    if (!f.ok()) return f.status();
    q = *std::move(f);
  } else {
    absl::StatusOr<std::vector<Rows>> s = Starts(in, opts.seed);
    if (!s.ok()) return s.status();
    q = s->back();  // every row perturbed
  }

  FunnelStats st = Stats(in, q);
  double cur = st.leakage;
  std::vector<FunnelTracePoint> trace{{0, cur, st.utility}};
  double d = 0.1;
  int it = 0;
  while (d >= opts.tol && it < opts.max_iter) {
    ++it;
    bool improved = false;
    for (size_t x = 0; x < in.nx; ++x) {
      for (size_t y = 0; y < in.ny; ++y) {
        for (size_t y2 = 0; y2 < in.ny; ++y2) {
          if (y == y2) continue;
          double mv = std::min(d, q[x * in.ny + y]);
          if (mv <= 0.0) continue;
          Rows cand = q;
          cand[x * in.ny + y] -= mv;
          cand[x * in.ny + y2] += mv;
          FunnelStats cs = Stats(in, cand);
          if (ConstraintValue(in, cs) >= in.threshold - kFeasSlack &&
              cs.leakage < cur) {
            q = std::move(cand);
            cur = cs.leakage;
            improved = true;
          }
        }
      }
    }
    if (!improved) d *= 0.5;
    st = Stats(in, q);
    trace.push_back({it, st.leakage, st.utility});
  }
  return Finish(in, q, it, d < opts.tol, std::move(trace));
}

absl::StatusOr<std::vector<TradeoffPoint>> TradeoffSweep(
    const JointPmf& p_sx, size_t y_size, const std::vector<double>& bounds,
    const FunnelOptions& opts) {
  if (!std::is_sorted(bounds.begin(), bounds.end())) {
    return ValidationError("bounds must be sorted ascending");
  }
  std::vector<TradeoffPoint> out(bounds.size());
  std::optional<Channel> prev;
  for (size_t k = bounds.size(); k-- > 0;) {
    FunnelProblem prob{p_sx, y_size, UtilityMode::kRate, bounds[k]};
    FunnelOptions o = opts;
    if (prev.has_value()) o.extra_starts.push_back(*prev);
    absl::StatusOr<FunnelSolution> sol = SolveFunnel(prob, o);
    if (!sol.ok()) {
      out[k] = {bounds[k], std::nan(""), std::nan(""), false,
                std::string(sol.status().message())};
      continue;
    }
    out[k] = {bounds[k], sol->leakage, sol->utility, true, ""};
    prev = sol->channel;
  }
  return out;
}

absl::StatusOr<double> BinaryGridOptimum(const JointPmf& p_sx, double rate,
                                         double step) {
  if (p_sx.cols() != 2) return ShapeError("binary X required");
  if (!(step > 0.0 && step <= 0.5)) return ValidationError("bad grid step");
  FunnelProblem prob{p_sx, 2, UtilityMode::kRate, rate};
  absl::StatusOr<Instance> inst = MakeInstance(prob);
  if (!inst.ok()) return inst.status();
  const Instance& in = *inst;
  auto channel = [](int fixed, double a, double b) {
    Rows r(4);
    r[fixed * 2] = a;
    r[fixed * 2 + 1] = 1.0 - a;
    r[(1 - fixed) * 2] = b;
    r[(1 - fixed) * 2 + 1] = 1.0 - b;
    return r;
  };
  double best = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(std::llround(1.0 / step));
  for (int fixed = 0; fixed < 2; ++fixed) {
    for (int i = 0; i <= n; ++i) {
      double a = std::min(1.0, i * step);
      // I(X;Y) is convex in the free row b with its minimum at b = a, so
      // each side of a is a monotone branch.
      for (auto [lo, hi] : {std::pair{0.0, a}, std::pair{a, 1.0}}) {
        double ulo = Stats(in, channel(fixed, a, lo)).utility;
        double uhi = Stats(in, channel(fixed, a, hi)).utility;
        double end = ulo > uhi ? lo : hi;
        double inner = ulo > uhi ? hi : lo;
        if (Stats(in, channel(fixed, a, end)).utility < rate) continue;
        double x0 = inner, x1 = end;
        for (int k = 0; k < kBisections; ++k) {
          double m = 0.5 * (x0 + x1);
          if (Stats(in, channel(fixed, a, m)).utility >= rate) {
            x1 = m;
          } else {
            x0 = m;
          }
        }
        best = std::min(best, Stats(in, channel(fixed, a, x1)).leakage);
      }
    }
  }
  return best;
}

}  // namespace leakgame
