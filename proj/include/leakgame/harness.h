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
#ifndef LEAKGAME_HARNESS_H_
#define LEAKGAME_HARNESS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "leakgame/funnel.h"
#include "leakgame/mfg.h"
#include "leakgame/nested.h"
#include "leakgame/prob.h"

namespace leakgame {

// Exit codes of the command-line runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct ExperimentConfig {
  std::string command;  // funnel|mfg|bankruptcy|nested|kuramoto|fuzzy|report|gen
  uint64_t seed = 0;
  std::string out = "out";
  int seeds = 50;
  std::vector<double> alpha = {1.0, 0.8, 0.6};
  std::vector<double> lambda = {0.1, 0.3, 0.5};
  double estate = 100.0;
  std::vector<double> claims = {60.0, 80.0};
  double grid = 0.005;  // oracle grid step for loss reporting
  int max_iter = 0;     // 0 keeps each solver's own cap
  double tol = 0.0;     // 0 keeps each solver's own tolerance
  int workers = 0;      // 0 picks min(hardware threads, 4)

  // gen
  double p = 0.5;
  double rho = 0.6;  // correlation of S with X
  int n = 10000;

  // kuramoto
  int oscillators = 8;
  double coupling = 1.0;
  double dt = 0.01;
  int steps = 5000;

  // fuzzy
  std::string data;  // CSV of points; empty generates two groups
  int clusters = 2;
  double fuzzifier = 2.0;
};

// Applies one key = value setting. Keys are the long flag names
// (max-iter, not max_iter). List values are comma separated.
absl::Status ApplySetting(ExperimentConfig& cfg, const std::string& key,
                          const std::string& value);

// Flat key = value text; '#' starts a comment. Errors name the line.
absl::Status ApplyConfigText(ExperimentConfig& cfg, const std::string& text);

absl::StatusOr<std::vector<double>> ParseList(const std::string& text);

struct ManifestEntry {
  std::string file;  // relative to the output directory
  std::string sha256;
  uint64_t bytes = 0;
};

// Runs the named pipeline and writes its CSVs under cfg.out, then
// manifest.csv. On failure the manifest lists what was written so far.
struct RunResult {
  absl::Status status;
  std::vector<ManifestEntry> manifest;
};
// Human-readable output (allocations, the report table) goes to `log`.
RunResult RunExperiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// Parses argv (argv[0] is the program), runs, and returns the exit code.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

absl::StatusOr<std::string> Sha256File(const std::string& path);

// Seeded (S, X) samples: X ~ Bernoulli(p); S copies X with probability
// rho and is otherwise an independent Bernoulli(p) draw.
struct BernoulliSample {
  std::vector<int> s, x;
  JointPmf empirical;  // rows S, columns X
  JointPmf target;
};
absl::StatusOr<BernoulliSample> GenBernoulliSource(double p, int n,
                                                   uint64_t seed,
                                                   double rho = 0.6);

// Model component -> module and operation, one row per in-scope item.
struct ReportRow {
  std::string component;
  std::string module;
  std::string operation;
};
const std::vector<ReportRow>& ReportTable();

// Experiment instances shared by the pipelines and the acceptance checks.
FunnelProblem Fig1FunnelProblem(uint64_t seed);
struct MfgCase {
  MfgProblem prob;
  MfgGrid grid;
  std::vector<double> m0;
};
MfgCase Fig1MfgCase(uint64_t seed, double alpha);
// Coalition claims in [10, 100) with estate (1 - lambda) sum(claims).
BankruptcyInstance NestedCoalition(int n, uint64_t seed, double lambda);

// One row per run, sorted: the empirical CDF stepping 1/n at each run.
std::vector<std::pair<double, double>> RunCdf(std::vector<double> runs);

// Order-preserving parallel map over [0, n) on at most `workers` threads.
void ParallelFor(int n, int workers, const std::function<void(int)>& body);

// Complexity fits of per-iteration op counts at the given coalition
// sizes. raw_ratio is a_bilevel / a_trilevel; run_ratio scales it by the
// median iteration counts of the two solvers.
struct ComplexityReport {
  ComplexityFit bilevel, trilevel;
  double raw_ratio = 0.0;
  double run_ratio = 0.0;
  // cumulative ops at each iteration of one instrumented run per size
  struct Trace {
    std::string level;
    int n;
    int iteration;
    int64_t ops;
  };
  std::vector<Trace> traces;
};
absl::StatusOr<ComplexityReport> NestedComplexity(
    const std::vector<int>& sizes, uint64_t seed, double median_iter_bilevel,
    double median_iter_trilevel);

}  // namespace leakgame

#endif  // LEAKGAME_HARNESS_H_
