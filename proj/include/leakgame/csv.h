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
#ifndef LEAKGAME_CSV_H_
#define LEAKGAME_CSV_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "leakgame/prob.h"

namespace leakgame {

using Matrix = std::vector<std::vector<double>>;

// Plain numeric CSV. Lines starting with '#' and a first line containing
// letters are treated as headers and skipped.
absl::StatusOr<Matrix> ParseCsv(const std::string& text);
absl::StatusOr<Matrix> ReadCsv(const std::string& path);

// Fixed "%.17g" formatting so that reruns produce identical bytes.
std::string FormatDouble(double v);
std::string FormatCsv(const std::vector<std::string>& header,
                      const Matrix& rows);
absl::Status WriteCsv(const std::string& path,
                      const std::vector<std::string>& header,
                      const Matrix& rows);
absl::Status WriteText(const std::string& path, const std::string& text);

// Distribution round trips. Validation runs on load.
absl::StatusOr<JointPmf> ReadJointPmf(const std::string& path);
absl::StatusOr<Channel> ReadChannel(const std::string& path);
absl::Status WriteJointPmf(const std::string& path, const JointPmf& j);
absl::Status WriteChannel(const std::string& path, const Channel& ch);

}  // namespace leakgame

#endif  // LEAKGAME_CSV_H_
