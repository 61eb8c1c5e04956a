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
#ifndef LEAKGAME_PROB_H_
#define LEAKGAME_PROB_H_

#include <cstddef>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace leakgame {

// Tolerance on the total mass of a distribution.
inline constexpr double kMassTolerance = 1e-9;

// Error constructors. The status code identifies the error family:
//   validation -> kInvalidArgument
//   domain     -> kOutOfRange
//   shape      -> kFailedPrecondition
//   config     -> kInvalidArgument (message prefixed "config:")
//   infeasible -> kOutOfRange (message prefixed "infeasible:")
absl::Status ValidationError(absl::string_view msg);
absl::Status DomainError(absl::string_view msg);
absl::Status ShapeError(absl::string_view msg);
absl::Status ConfigError(absl::string_view msg);
absl::Status InfeasibleError(absl::string_view msg);

// Checks a probability vector: entries >= 0 and finite, sum within
// kMassTolerance of 1.
absl::Status CheckProbabilities(const std::vector<double>& p);

// Probability mass function over {0, ..., n-1}.
class Pmf {
 public:
  static absl::StatusOr<Pmf> Create(std::vector<double> probs);
  // Divides by the total. Fails on negative entries or zero total.
  static absl::StatusOr<Pmf> Renormalized(std::vector<double> weights);
  static Pmf Uniform(size_t n);
  static Pmf PointMass(size_t n, size_t at);

  size_t size() const { return probs_.size(); }
  double operator[](size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  friend class JointPmf;
  explicit Pmf(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

// Joint distribution of (A, B), row-major with rows indexed by A.
class JointPmf {
 public:
  static absl::StatusOr<JointPmf> Create(size_t rows, size_t cols,
                                         std::vector<double> probs);
  static absl::StatusOr<JointPmf> FromRows(
      const std::vector<std::vector<double>>& rows);
  static JointPmf Product(const Pmf& a, const Pmf& b);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  double at(size_t a, size_t b) const { return probs_[a * cols_ + b]; }
  const std::vector<double>& probs() const { return probs_; }

  Pmf RowMarginal() const;  // law of A
  Pmf ColMarginal() const;  // law of B
  JointPmf Transposed() const;

 private:
  JointPmf(size_t rows, size_t cols, std::vector<double> probs)
      : rows_(rows), cols_(cols), probs_(std::move(probs)) {}
  size_t rows_;
  size_t cols_;
  std::vector<double> probs_;
};

// Row-stochastic matrix: row x is the law of the output given input x.
class Channel {
 public:
  static absl::StatusOr<Channel> Create(size_t inputs, size_t outputs,
                                        std::vector<double> probs);
  static absl::StatusOr<Channel> FromRows(
      const std::vector<std::vector<double>>& rows);
  // Identity when outputs >= inputs (extra outputs unused).
  static Channel Identity(size_t inputs, size_t outputs);
  // Every input maps to the same law.
  static Channel Constant(size_t inputs, const Pmf& row);

  size_t inputs() const { return inputs_; }
  size_t outputs() const { return outputs_; }
  double at(size_t x, size_t y) const { return probs_[x * outputs_ + y]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  Channel(size_t inputs, size_t outputs, std::vector<double> probs)
      : inputs_(inputs), outputs_(outputs), probs_(std::move(probs)) {}
  size_t inputs_;
  size_t outputs_;
  std::vector<double> probs_;
};

// All information measures are in bits.
double Entropy(const Pmf& p);
double MutualInformation(const JointPmf& j);
// Fails with a domain error when p(x) > 0 and q(x) = 0.
absl::StatusOr<double> KlDivergence(const Pmf& p, const Pmf& q);

// p(s, y) = sum_x p(s, x) ch(y | x).
absl::StatusOr<JointPmf> ComposeMarkov(const JointPmf& p_sx,
                                       const Channel& ch_yx);

// I(S;X) - I(S;Y) for S -> X -> Y.
absl::StatusOr<double> DistortionGap(const JointPmf& p_sx,
                                     const Channel& ch_yx);
// E_{X,Y}[ KL(P(S|X) || P(S|Y)) ]; equals DistortionGap on the chain.
absl::StatusOr<double> ExpectedPosteriorKl(const JointPmf& p_sx,
                                           const Channel& ch_yx);

// Joint law of (X, Y) given the input marginal and the channel.
absl::StatusOr<JointPmf> InputOutputJoint(const Pmf& p_x,
                                          const Channel& ch_yx);

}  // namespace leakgame

#endif  // LEAKGAME_PROB_H_
