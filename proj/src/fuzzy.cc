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
#include "leakgame/fuzzy.h"

#include <cmath>
#include <limits>
#include <random>

#include "absl/strings/str_cat.h"
#include "leakgame/csv.h"
#include "leakgame/prob.h"

namespace leakgame {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// KL values at rounding level count as coincidence; otherwise a center that
// is the mean of identical points can lose its tie by one ulp.
constexpr double kZeroDistance = 1e-14;

// KL(s || c) in nats; infinite when c misses mass of s.
double Kl(const std::vector<double>& s, const std::vector<double>& c) {
  double d = 0.0;
  for (size_t x = 0; x < s.size(); ++x) {
    if (s[x] <= 0.0) continue;
    if (c[x] <= 0.0) return kInf;
    d += s[x] * std::log(s[x] / c[x]);
  }
  return std::max(d, 0.0);
}

double Penalty(const FuzzyInstance& inst,
               const std::vector<std::vector<double>>& centers) {
  if (inst.l2_penalty == 0.0) return 0.0;
  double p = 0.0;
  for (const auto& c : centers) {
    const double u = 1.0 / static_cast<double>(c.size());
    for (double v : c) p += (v - u) * (v - u);
  }
  return inst.l2_penalty * p;
}

absl::Status CheckCenters(const FuzzyInstance& inst,
                          const std::vector<std::vector<double>>& centers) {
  if (centers.size() != inst.clusters) return ShapeError("one center per cluster");
  for (const auto& c : centers) {
    if (c.size() != inst.data[0].size()) return ShapeError("center dimension");
    absl::Status s = CheckProbabilities(c);
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

absl::Status CheckMemberships(const FuzzyInstance& inst,
                              const std::vector<std::vector<double>>& u) {
  const size_t k = inst.data.size();
  if (u.size() != inst.clusters) return ShapeError("one membership row per cluster");
  for (const auto& row : u) {
    if (row.size() != k) return ShapeError("one membership column per point");
  }
  for (size_t j = 0; j < k; ++j) {
    double col = 0.0;
    for (size_t i = 0; i < inst.clusters; ++i) {
      if (!(u[i][j] >= 0.0 && u[i][j] <= 1.0)) {
        return ValidationError("memberships must lie in [0, 1]");
      }
      col += u[i][j];
    }
    if (std::abs(col - 1.0) > 1e-9) {
      return ValidationError(absl::StrCat("membership column ", j, " sums to ", col));
    }
  }
  return absl::OkStatus();
}

// Penalized center: minimize W sum_x -a(x) log c(x) + lambda ||c - u||^2 on
// the simplex. Stationarity gives 2 lambda c^2 + (nu - 2 lambda u) c = W a.
std::vector<double> PenalizedCenter(const std::vector<double>& a, double w,
                                    double lambda) {
  const size_t n = a.size();
  const double u = 1.0 / static_cast<double>(n);
  auto coords = [&](double nu, std::vector<double>& c) {
    double sum = 0.0;
    for (size_t x = 0; x < n; ++x) {
      const double b = nu - 2.0 * lambda * u;
      c[x] = (-b + std::sqrt(b * b + 8.0 * lambda * w * a[x])) / (4.0 * lambda);
      sum += c[x];
    }
    return sum;
  };
  std::vector<double> c(n);
  // The total is decreasing in nu: bracket a total of 1.
  double lo = -1.0, hi = 1.0;
  while (coords(lo, c) < 1.0) lo *= 2.0;
  while (coords(hi, c) > 1.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (coords(mid, c) > 1.0 ? lo : hi) = mid;
  }
  double sum = coords(0.5 * (lo + hi), c);
  for (double& v : c) v /= sum;
  return c;
}

}  // namespace

absl::Status ValidateFuzzy(const FuzzyInstance& inst) {
  const size_t k = inst.data.size();
  if (k < 2) return ValidationError("need at least 2 points");
  if (inst.clusters < 1 || inst.clusters >= k) {
    return ValidationError(absl::StrCat("need 1 <= q < k, got q = ", inst.clusters,
                                        ", k = ", k));
  }
  if (!(inst.fuzzifier > 1.0) || !std::isfinite(inst.fuzzifier)) {
    return ValidationError("fuzzifier must be > 1");
  }
  if (!(inst.l2_penalty >= 0.0)) return ValidationError("penalty must be >= 0");
  const size_t dim = inst.data[0].size();
  if (dim < 1) return ShapeError("empty data point");
  for (const auto& s : inst.data) {
    if (s.size() != dim) return ShapeError("data points differ in dimension");
    absl::Status st = CheckProbabilities(s);
    if (!st.ok()) return st;
  }
  return absl::OkStatus();
}

absl::StatusOr<double> FuzzyObjective(const FuzzyInstance& inst,
                                      const FuzzyState& state) {
  absl::Status st = ValidateFuzzy(inst);
  if (st.ok()) st = CheckCenters(inst, state.centers);
  if (st.ok()) st = CheckMemberships(inst, state.memberships);
  if (!st.ok()) return st;
  double j = 0.0;
  for (size_t i = 0; i < inst.clusters; ++i) {
    for (size_t p = 0; p < inst.data.size(); ++p) {
      const double mu = state.memberships[i][p];
      if (mu == 0.0) continue;
      const double d = Kl(inst.data[p], state.centers[i]);
      if (std::isinf(d)) {
        return DomainError(absl::StrCat("center ", i, " is zero where point ", p,
                                        " has mass"));
      }
      j += std::pow(mu, inst.fuzzifier) * d;
    }
  }
  return j + Penalty(inst, state.centers);
}

absl::StatusOr<std::vector<std::vector<double>>> UpdateMemberships(
    const FuzzyInstance& inst, const std::vector<std::vector<double>>& centers) {
  absl::Status st = ValidateFuzzy(inst);
  if (st.ok()) st = CheckCenters(inst, centers);
  if (!st.ok()) return st;
  const size_t q = inst.clusters, k = inst.data.size();
  const double power = -1.0 / (inst.fuzzifier - 1.0);
  std::vector<std::vector<double>> u(q, std::vector<double>(k, 0.0));
  std::vector<double> d(q);
  for (size_t j = 0; j < k; ++j) {
    size_t zeros = 0, finite = 0;
    double dmin = kInf;
    for (size_t i = 0; i < q; ++i) {
      d[i] = Kl(inst.data[j], centers[i]);
      if (d[i] <= kZeroDistance) d[i] = 0.0;
      zeros += d[i] == 0.0;
      finite += std::isfinite(d[i]);
      dmin = std::min(dmin, d[i]);
    }
    if (finite == 0) {
      return DomainError(absl::StrCat("point ", j, " is unreachable from every center"));
    }
    if (zeros > 0) {
      for (size_t i = 0; i < q; ++i) u[i][j] = d[i] == 0.0 ? 1.0 / zeros : 0.0;
      continue;
    }
    // Scale by the nearest distance so the powers stay in range.
    double z = 0.0;
    for (size_t i = 0; i < q; ++i) {
      u[i][j] = std::isfinite(d[i]) ? std::pow(d[i] / dmin, power) : 0.0;
      z += u[i][j];
    }
    for (size_t i = 0; i < q; ++i) u[i][j] /= z;
  }
  return u;
}

absl::StatusOr<std::vector<std::vector<double>>> UpdateCenters(
    const FuzzyInstance& inst, const std::vector<std::vector<double>>& u) {
  absl::Status st = ValidateFuzzy(inst);
  if (st.ok()) st = CheckMemberships(inst, u);
  if (!st.ok()) return st;
  const size_t dim = inst.data[0].size();
  std::vector<std::vector<double>> centers;
  for (size_t i = 0; i < inst.clusters; ++i) {
    std::vector<double> a(dim, 0.0);
    double w = 0.0;
    for (size_t j = 0; j < inst.data.size(); ++j) {
      const double wij = std::pow(u[i][j], inst.fuzzifier);
      w += wij;
      for (size_t x = 0; x < dim; ++x) a[x] += wij * inst.data[j][x];
    }
    if (!(w > 0.0)) {
      return ValidationError(absl::StrCat("cluster ", i, " has no membership"));
    }
    for (double& v : a) v /= w;
    centers.push_back(inst.l2_penalty > 0.0 ? PenalizedCenter(a, w, inst.l2_penalty)
                                            : a);
  }
  return centers;
}

absl::StatusOr<FuzzyFit> FitFuzzy(const FuzzyInstance& inst,
                                  const FuzzyOptions& opts) {
  absl::Status st = ValidateFuzzy(inst);
  if (!st.ok()) return st;
  if (!(opts.tol > 0.0) || opts.max_iter < 1 || opts.restarts < 1) {
    return ValidationError("need tol > 0, max_iter >= 1, restarts >= 1");
  }
  const size_t q = inst.clusters, k = inst.data.size();
  FuzzyFit best;
  double best_j = kInf;
  for (int r = 0; r < opts.restarts; ++r) {
    std::mt19937_64 rng(opts.seed + static_cast<uint64_t>(r));
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    FuzzyFit fit;
    FuzzyState& s = fit.state;
    s.memberships.assign(q, std::vector<double>(k));
    for (size_t j = 0; j < k; ++j) {
      double z = 0.0;
      for (size_t i = 0; i < q; ++i) z += s.memberships[i][j] = unif(rng);
      for (size_t i = 0; i < q; ++i) s.memberships[i][j] /= z;
    }
    absl::StatusOr<std::vector<std::vector<double>>> c = UpdateCenters(inst, s.memberships);
    if (!c.ok()) return c.status();
    s.centers = std::move(*c);
    absl::StatusOr<double> j = FuzzyObjective(inst, s);
    if (!j.ok()) return j.status();
    fit.trace.push_back(*j);
    for (int it = 1; it <= opts.max_iter; ++it) {
      absl::StatusOr<std::vector<std::vector<double>>> u = UpdateMemberships(inst, s.centers);
      if (!u.ok()) return u.status();
      c = UpdateCenters(inst, *u);
      if (!c.ok()) return c.status();
      s.memberships = std::move(*u);
      s.centers = std::move(*c);
      j = FuzzyObjective(inst, s);
      if (!j.ok()) return j.status();
      fit.trace.push_back(*j);
      fit.iterations = it;
      if (std::abs(fit.trace[it] - fit.trace[it - 1]) < opts.tol) {
        fit.converged = true;
        break;
      }
    }
    if (fit.trace.back() < best_j) {
      best_j = fit.trace.back();
      best = std::move(fit);
    }
  }
  return best;
}

absl::StatusOr<std::vector<std::vector<double>>> ReadFuzzyData(
    const std::string& path) {
  absl::StatusOr<Matrix> m = ReadCsv(path);
  if (!m.ok()) return m.status();
  for (const auto& row : *m) {
    absl::Status s = CheckProbabilities(row);
    if (!s.ok()) return s;
  }
  return *m;
}

absl::Status WriteFuzzyState(const std::string& prefix, const FuzzyState& s) {
  if (s.centers.empty() || s.memberships.empty()) return ShapeError("empty state");
  std::vector<std::string> ch, mh;
  for (size_t x = 0; x < s.centers[0].size(); ++x) ch.push_back(absl::StrCat("p", x));
  for (size_t j = 0; j < s.memberships[0].size(); ++j) {
    mh.push_back(absl::StrCat("mu_point", j));
  }
  absl::Status st = WriteCsv(prefix + "_centers.csv", ch, s.centers);
  if (!st.ok()) return st;
  return WriteCsv(prefix + "_memberships.csv", mh, s.memberships);
}

}  // namespace leakgame
