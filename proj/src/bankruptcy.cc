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
#include "leakgame/bankruptcy.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "absl/strings/str_cat.h"
#include "leakgame/csv.h"
#include "leakgame/prob.h"

namespace leakgame {
namespace {

double Worth(double estate, double total, double inside) {
  return std::min(inside, std::max(0.0, estate - (total - inside)));
}

double Total(const BankruptcyInstance& inst) {
  return std::accumulate(inst.claims.begin(), inst.claims.end(), 0.0);
}

void FillRights(const BankruptcyInstance& inst, Allocation& a) {
  const size_t n = inst.claims.size();
  const double total = Total(inst);
  const double grand = Worth(inst.estate, total, total);
  a.min_right.resize(n);
  a.max_right.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double c = inst.claims[i];
    a.min_right[i] = Worth(inst.estate, total, c);
    a.max_right[i] = grand - Worth(inst.estate, total, total - c);
  }
}

}  // namespace

absl::Status ValidateInstance(const BankruptcyInstance& inst) {
  if (inst.claims.empty()) return ValidationError("no claimants");
  if (!(inst.estate >= 0.0) || !std::isfinite(inst.estate)) {
    return ValidationError("estate must be finite and >= 0");
  }
  for (double c : inst.claims) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      return ValidationError("claims must be finite and >= 0");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<double> CoalitionWorth(const BankruptcyInstance& inst,
                                      Coalition s) {
  absl::Status st = ValidateInstance(inst);
  if (!st.ok()) return st;
  const size_t n = inst.claims.size();
  if (n > 64) return ValidationError("bit-mask coalitions hold at most 64 claimants");
  if (n < 64 && (s >> n) != 0) {
    return ValidationError(absl::StrCat("coalition has players beyond ", n));
  }
  double inside = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (s >> i & 1) inside += inst.claims[i];
  }
  return Worth(inst.estate, Total(inst), inside);
}

absl::StatusOr<double> CoalitionWorth(const BankruptcyInstance& inst,
                                      const std::vector<size_t>& members) {
  Coalition s = 0;
  for (size_t i : members) {
    if (i >= inst.claims.size()) {
      return ValidationError(absl::StrCat("unknown claimant ", i));
    }
    s |= Coalition{1} << i;
  }
  return CoalitionWorth(inst, s);
}

absl::StatusOr<Allocation> Shapley(const BankruptcyInstance& inst,
                                   const ShapleyOptions& opts) {
  absl::Status st = ValidateInstance(inst);
  if (!st.ok()) return st;
  const size_t n = inst.claims.size();
  const double total = Total(inst);
  Allocation a;
  a.payoffs.assign(n, 0.0);
  a.std_error.assign(n, 0.0);
  FillRights(inst, a);

  if (n <= kExactShapleyLimit) {
    // phi_i = sum_{S without i} |S|! (n-|S|-1)! / n! (v(S + i) - v(S)).
    std::vector<double> weight(n);
    weight[0] = 1.0 / static_cast<double>(n);
    for (size_t k = 1; k < n; ++k) {
      weight[k] = weight[k - 1] * static_cast<double>(k) / static_cast<double>(n - k);
    }
    const Coalition full = (Coalition{1} << n) - 1;
    std::vector<double> inside(size_t{1} << n, 0.0);
    for (Coalition s = 1; s <= full; ++s) {
      const int low = std::countr_zero(s);
      inside[s] = inside[s & (s - 1)] + inst.claims[low];
    }
    for (Coalition s = 0; s <= full; ++s) {
      const double vs = Worth(inst.estate, total, inside[s]);
      const size_t k = static_cast<size_t>(std::popcount(s));
      for (size_t i = 0; i < n; ++i) {
        if (s >> i & 1) continue;
        const double with = Worth(inst.estate, total, inside[s] + inst.claims[i]);
        a.payoffs[i] += weight[k] * (with - vs);
      }
    }
    return a;
  }

  if (opts.permutations < 2) {
    return ValidationError("sampling needs at least 2 permutations");
  }
  a.approximate = true;
  std::mt19937_64 rng(opts.seed);
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> sum(n, 0.0), sq(n, 0.0);
  for (size_t p = 0; p < opts.permutations; ++p) {
    std::shuffle(order.begin(), order.end(), rng);
    double in = 0.0, prev = 0.0;
    for (size_t i : order) {
      in += inst.claims[i];
      const double v = Worth(inst.estate, total, in);
      sum[i] += v - prev;
      sq[i] += (v - prev) * (v - prev);
      prev = v;
    }
  }
  const double m = static_cast<double>(opts.permutations);
  for (size_t i = 0; i < n; ++i) {
    a.payoffs[i] = sum[i] / m;
    const double var = std::max(0.0, (sq[i] - m * a.payoffs[i] * a.payoffs[i]) / (m - 1));
    a.std_error[i] = std::sqrt(var / m);
  }
  return a;
}

absl::StatusOr<Allocation> WithRights(const BankruptcyInstance& inst,
                                      std::vector<double> payoffs) {
  absl::Status st = ValidateInstance(inst);
  if (!st.ok()) return st;
  if (payoffs.size() != inst.claims.size()) {
    return ShapeError("one payoff per claimant");
  }
  Allocation a;
  a.payoffs = std::move(payoffs);
  a.std_error.assign(a.payoffs.size(), 0.0);
  FillRights(inst, a);
  return a;
}

absl::StatusOr<AllocationReport> ValidateAllocation(
    const BankruptcyInstance& inst, const Allocation& alloc, double tol) {
  absl::Status st = ValidateInstance(inst);
  if (!st.ok()) return st;
  const size_t n = inst.claims.size();
  if (alloc.payoffs.size() != n) return ShapeError("one payoff per claimant");
  Allocation rights;
  FillRights(inst, rights);
  const double total = Total(inst);
  const double grand = Worth(inst.estate, total, total);

  AllocationReport r;
  const double paid = std::accumulate(alloc.payoffs.begin(), alloc.payoffs.end(), 0.0);
  r.efficient = std::abs(paid - grand) <= tol * std::max(1.0, grand);
  r.within_claims = true;
  r.within_rights = true;
  r.player_ok.assign(n, true);
  for (size_t i = 0; i < n; ++i) {
    const double x = alloc.payoffs[i];
    const double slack = tol * std::max(1.0, inst.claims[i]);
    bool claims_ok = x >= -slack && x <= inst.claims[i] + slack;
    bool rights_ok = x >= rights.min_right[i] - slack &&
                     x <= rights.max_right[i] + slack;
    r.within_claims = r.within_claims && claims_ok;
    r.within_rights = r.within_rights && rights_ok;
    r.player_ok[i] = claims_ok && rights_ok;
  }
  return r;
}

absl::StatusOr<double> BankruptcyEvent(const std::vector<double>& rates,
                                       size_t kb) {
  // The event needs at least one sample on each side of kb.
  if (kb < 1 || kb >= rates.size()) {
    return ValidationError(absl::StrCat("K_b = ", kb, " outside [1, ",
                                        rates.size(), ")"));
  }
  for (size_t k = 0; k < rates.size(); ++k) {
    if ((k < kb) != (rates[k] > 0.0)) return 0.0;
  }
  return 1.0;
}

absl::StatusOr<double> BankruptcyEventProbability(
    const std::vector<std::vector<double>>& trajectories, size_t kb) {
  if (trajectories.empty()) return ValidationError("no trajectories");
  double hits = 0.0;
  for (const auto& t : trajectories) {
    absl::StatusOr<double> e = BankruptcyEvent(t, kb);
    if (!e.ok()) return e.status();
    hits += *e;
  }
  return hits / static_cast<double>(trajectories.size());
}

absl::StatusOr<BankruptcyInstance> ReadBankruptcyCsv(const std::string& path) {
  absl::StatusOr<Matrix> m = ReadCsv(path);
  if (!m.ok()) return m.status();
  if (m->size() != 2 || (*m)[0].size() != 1) {
    return ShapeError("expected a row with the estate and a row of claims");
  }
  BankruptcyInstance inst{(*m)[0][0], (*m)[1]};
  absl::Status st = ValidateInstance(inst);
  if (!st.ok()) return st;
  return inst;
}

absl::Status WriteAllocationCsv(const std::string& path,
                                const BankruptcyInstance& inst,
                                const Allocation& alloc) {
  absl::StatusOr<AllocationReport> r = ValidateAllocation(inst, alloc);
  if (!r.ok()) return r.status();
  Matrix rows;
  for (size_t i = 0; i < inst.claims.size(); ++i) {
    rows.push_back({static_cast<double>(i), inst.claims[i], alloc.payoffs[i],
                    alloc.min_right[i], alloc.max_right[i],
                    alloc.std_error.empty() ? 0.0 : alloc.std_error[i],
                    r->player_ok[i] ? 1.0 : 0.0, r->efficient ? 1.0 : 0.0});
  }
  return WriteCsv(path,
                  {"player", "claim", "payoff", "min_right", "max_right",
                   "std_error", "bounds_ok", "efficient"},
                  rows);
}

}  // namespace leakgame
