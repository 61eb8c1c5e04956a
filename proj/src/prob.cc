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
#include "leakgame/prob.h"

#include <cmath>
#include <numeric>
#include <string>

#include "absl/strings/str_cat.h"

namespace leakgame {

absl::Status ValidationError(absl::string_view msg) {
  return absl::InvalidArgumentError(msg);
}
absl::Status DomainError(absl::string_view msg) {
  return absl::OutOfRangeError(msg);
}
absl::Status ShapeError(absl::string_view msg) {
  return absl::FailedPreconditionError(msg);
}
absl::Status ConfigError(absl::string_view msg) {
  return absl::InvalidArgumentError(absl::StrCat("config: ", msg));
}
absl::Status InfeasibleError(absl::string_view msg) {
  return absl::OutOfRangeError(absl::StrCat("infeasible: ", msg));
}

absl::Status CheckProbabilities(const std::vector<double>& p) {
  if (p.empty()) return ValidationError("empty distribution");
  double total = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) {
      return ValidationError(
          absl::StrCat("entry ", i, " is negative or not finite: ", p[i]));
    }
    total += p[i];
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    return ValidationError(absl::StrCat("entries sum to ", total));
  }
  return absl::OkStatus();
}

absl::StatusOr<Pmf> Pmf::Create(std::vector<double> probs) {
  absl::Status s = CheckProbabilities(probs);
  if (!s.ok()) return s;
  return Pmf(std::move(probs));
}

absl::StatusOr<Pmf> Pmf::Renormalized(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      return ValidationError("negative or non-finite weight");
    }
    total += w;
  }
  if (total <= 0.0) return ValidationError("weights sum to zero");
  for (double& w : weights) w /= total;
  return Pmf(std::move(weights));
}

Pmf Pmf::Uniform(size_t n) {
  return Pmf(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Pmf Pmf::PointMass(size_t n, size_t at) {
  std::vector<double> p(n, 0.0);
  p[at] = 1.0;
  return Pmf(std::move(p));
}

absl::StatusOr<JointPmf> JointPmf::Create(size_t rows, size_t cols,
                                          std::vector<double> probs) {
  if (rows == 0 || cols == 0 || probs.size() != rows * cols) {
    return ShapeError(absl::StrCat("joint of ", rows, "x", cols, " given ",
                                   probs.size(), " entries"));
  }
  absl::Status s = CheckProbabilities(probs);
  if (!s.ok()) return s;
  return JointPmf(rows, cols, std::move(probs));
}

absl::StatusOr<JointPmf> JointPmf::FromRows(
    const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return ShapeError("no rows");
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != rows[0].size()) return ShapeError("ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Create(rows.size(), rows[0].size(), std::move(flat));
}

JointPmf JointPmf::Product(const Pmf& a, const Pmf& b) {
  std::vector<double> p(a.size() * b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) p[i * b.size() + j] = a[i] * b[j];
  }
  return JointPmf(a.size(), b.size(), std::move(p));
}

Pmf JointPmf::RowMarginal() const {
  std::vector<double> m(rows_, 0.0);
  for (size_t a = 0; a < rows_; ++a) {
    for (size_t b = 0; b < cols_; ++b) m[a] += at(a, b);
  }
  return Pmf(std::move(m));
}

Pmf JointPmf::ColMarginal() const {
  std::vector<double> m(cols_, 0.0);
  for (size_t a = 0; a < rows_; ++a) {
    for (size_t b = 0; b < cols_; ++b) m[b] += at(a, b);
  }
  return Pmf(std::move(m));
}

JointPmf JointPmf::Transposed() const {
  std::vector<double> t(probs_.size());
  for (size_t a = 0; a < rows_; ++a) {
    for (size_t b = 0; b < cols_; ++b) t[b * rows_ + a] = at(a, b);
  }
  return JointPmf(cols_, rows_, std::move(t));
}

absl::StatusOr<Channel> Channel::Create(size_t inputs, size_t outputs,
                                        std::vector<double> probs) {
  if (inputs == 0 || outputs == 0 || probs.size() != inputs * outputs) {
    return ShapeError(absl::StrCat("channel of ", inputs, "x", outputs,
                                   " given ", probs.size(), " entries"));
  }
  for (size_t x = 0; x < inputs; ++x) {
    std::vector<double> row(probs.begin() + x * outputs,
                            probs.begin() + (x + 1) * outputs);
    absl::Status s = CheckProbabilities(row);
    if (!s.ok()) {
      return ValidationError(absl::StrCat("row ", x, ": ", s.message()));
    }
  }
  return Channel(inputs, outputs, std::move(probs));
}

absl::StatusOr<Channel> Channel::FromRows(
    const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return ShapeError("no rows");
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != rows[0].size()) return ShapeError("ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Create(rows.size(), rows[0].size(), std::move(flat));
}

Channel Channel::Identity(size_t inputs, size_t outputs) {
  std::vector<double> p(inputs * outputs, 0.0);
  for (size_t x = 0; x < inputs; ++x) p[x * outputs + (x % outputs)] = 1.0;
  return Channel(inputs, outputs, std::move(p));
}

Channel Channel::Constant(size_t inputs, const Pmf& row) {
  std::vector<double> p;
  p.reserve(inputs * row.size());
  for (size_t x = 0; x < inputs; ++x) {
    p.insert(p.end(), row.probs().begin(), row.probs().end());
  }
  return Channel(inputs, row.size(), std::move(p));
}

double Entropy(const Pmf& p) {
  double h = 0.0;
  for (double v : p.probs()) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h < 0.0 ? 0.0 : h;
}

double MutualInformation(const JointPmf& j) {
  Pmf a = j.RowMarginal();
  Pmf b = j.ColMarginal();
  double mi = 0.0;
  for (size_t r = 0; r < j.rows(); ++r) {
    for (size_t c = 0; c < j.cols(); ++c) {
      double p = j.at(r, c);
      if (p > 0.0) mi += p * std::log2(p / (a[r] * b[c]));
    }
  }
  return mi < 0.0 ? 0.0 : mi;
}

absl::StatusOr<double> KlDivergence(const Pmf& p, const Pmf& q) {
  if (p.size() != q.size()) {
    return ShapeError(absl::StrCat("alphabet sizes ", p.size(), " and ",
                                   q.size()));
  }
  double kl = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) {
      return DomainError(
          absl::StrCat("p(", i, ") > 0 but q(", i, ") = 0"));
    }
    kl += p[i] * std::log2(p[i] / q[i]);
  }
  return kl < 0.0 ? 0.0 : kl;
}

absl::StatusOr<JointPmf> ComposeMarkov(const JointPmf& p_sx,
                                       const Channel& ch_yx) {
  if (p_sx.cols() != ch_yx.inputs()) {
    return ShapeError(absl::StrCat("joint has ", p_sx.cols(),
                                   " X symbols, channel has ",
                                   ch_yx.inputs(), " inputs"));
  }
  const size_t ns = p_sx.rows(), nx = p_sx.cols(), ny = ch_yx.outputs();
  std::vector<double> out(ns * ny, 0.0);
  for (size_t s = 0; s < ns; ++s) {
    for (size_t x = 0; x < nx; ++x) {
      double w = p_sx.at(s, x);
      if (w == 0.0) continue;
      for (size_t y = 0; y < ny; ++y) out[s * ny + y] += w * ch_yx.at(x, y);
    }
  }
  return JointPmf::Create(ns, ny, std::move(out));
}

absl::StatusOr<double> DistortionGap(const JointPmf& p_sx,
                                     const Channel& ch_yx) {
  absl::StatusOr<JointPmf> p_sy = ComposeMarkov(p_sx, ch_yx);
  if (!p_sy.ok()) return p_sy.status();
  double gap = MutualInformation(p_sx) - MutualInformation(*p_sy);
  return gap < 0.0 ? 0.0 : gap;
}

absl::StatusOr<double> ExpectedPosteriorKl(const JointPmf& p_sx,
                                           const Channel& ch_yx) {
  absl::StatusOr<JointPmf> p_sy = ComposeMarkov(p_sx, ch_yx);
  if (!p_sy.ok()) return p_sy.status();
  const size_t ns = p_sx.rows(), nx = p_sx.cols(), ny = ch_yx.outputs();
  Pmf p_x = p_sx.ColMarginal();
  Pmf p_y = p_sy->ColMarginal();
  double total = 0.0;
  for (size_t x = 0; x < nx; ++x) {
    if (p_x[x] == 0.0) continue;
    for (size_t y = 0; y < ny; ++y) {
      double pxy = p_x[x] * ch_yx.at(x, y);
      if (pxy == 0.0) continue;
      for (size_t s = 0; s < ns; ++s) {
        double post_x = p_sx.at(s, x) / p_x[x];
        if (post_x == 0.0) continue;
        double post_y = p_sy->at(s, y) / p_y[y];
        total += pxy * post_x * std::log2(post_x / post_y);
      }
    }
  }
  return total < 0.0 ? 0.0 : total;
}

absl::StatusOr<JointPmf> InputOutputJoint(const Pmf& p_x,
                                          const Channel& ch_yx) {
  if (p_x.size() != ch_yx.inputs()) {
    return ShapeError("input law does not match channel inputs");
  }
  std::vector<double> out(p_x.size() * ch_yx.outputs());
  for (size_t x = 0; x < p_x.size(); ++x) {
    for (size_t y = 0; y < ch_yx.outputs(); ++y) {
      out[x * ch_yx.outputs() + y] = p_x[x] * ch_yx.at(x, y);
    }
  }
  return JointPmf::Create(p_x.size(), ch_yx.outputs(), std::move(out));
}

}  // namespace leakgame
