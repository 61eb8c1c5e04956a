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
#ifndef LEAKGAME_TESTS_SHAPLEY_ORACLE_H_
#define LEAKGAME_TESTS_SHAPLEY_ORACLE_H_

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "leakgame/bankruptcy.h"

namespace leakgame {
namespace testing {

// Estate drawn below the total claim most of the time, sometimes above.
inline BankruptcyInstance RandomBankruptcy(size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BankruptcyInstance inst;
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    inst.claims.push_back(100.0 * u(rng));
    total += inst.claims.back();
  }
  inst.estate = total * 1.2 * u(rng);
  return inst;
}

// Average marginal contribution over all n! arrival orders, with the
// worth written out directly.
inline std::vector<double> PermutationShapley(const BankruptcyInstance& inst) {
  const size_t n = inst.claims.size();
  const double total = std::accumulate(inst.claims.begin(), inst.claims.end(), 0.0);
  auto worth = [&](double inside) {
    return std::min(inside, std::max(0.0, inst.estate - (total - inside)));
  };
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(n, 0.0);
  double count = 0.0;
  do {
    double in = 0.0;
    for (size_t i : order) {
      const double before = worth(in);
      in += inst.claims[i];
      phi[i] += worth(in) - before;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& v : phi) v /= count;
  return phi;
}

}  // namespace testing
}  // namespace leakgame

#endif  // LEAKGAME_TESTS_SHAPLEY_ORACLE_H_
