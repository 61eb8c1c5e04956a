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
#include "leakgame/csv.h"

#include <cctype>
#include <fstream>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace leakgame {

absl::StatusOr<Matrix> ParseCsv(const std::string& text) {
  Matrix out;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty() || line[0] == '#') continue;
    bool has_alpha = false;
    for (char c : line) {
      if (std::isalpha(static_cast<unsigned char>(c)) && c != 'e' &&
          c != 'E') {
        has_alpha = true;
      }
    }
    if (has_alpha && out.empty()) continue;
    std::vector<double> row;
    for (absl::string_view cell : absl::StrSplit(line, ',')) {
      double v;
      if (!absl::SimpleAtod(absl::StripAsciiWhitespace(cell), &v)) {
        return ValidationError(
            absl::StrCat("line ", line_no, ": not a number: '", cell, "'"));
      }
      row.push_back(v);
    }
    out.push_back(std::move(row));
  }
  return out;
}

absl::StatusOr<Matrix> ReadCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseCsv(ss.str());
}

std::string FormatDouble(double v) { return absl::StrFormat("%.17g", v); }

std::string FormatCsv(const std::vector<std::string>& header,
                      const Matrix& rows) {
  std::string out = absl::StrJoin(header, ",");
  out += "\n";
  for (const auto& r : rows) {
    out += absl::StrJoin(r, ",", [](std::string* o, double v) {
      o->append(FormatDouble(v));
    });
    out += "\n";
  }
  return out;
}

absl::Status WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  out << text;
  return out ? absl::OkStatus()
             : absl::InternalError(absl::StrCat("write failed: ", path));
}

absl::Status WriteCsv(const std::string& path,
                      const std::vector<std::string>& header,
                      const Matrix& rows) {
  return WriteText(path, FormatCsv(header, rows));
}

absl::StatusOr<JointPmf> ReadJointPmf(const std::string& path) {
  absl::StatusOr<Matrix> m = ReadCsv(path);
  if (!m.ok()) return m.status();
  return JointPmf::FromRows(*m);
}

absl::StatusOr<Channel> ReadChannel(const std::string& path) {
  absl::StatusOr<Matrix> m = ReadCsv(path);
  if (!m.ok()) return m.status();
  return Channel::FromRows(*m);
}

absl::Status WriteJointPmf(const std::string& path, const JointPmf& j) {
  Matrix rows(j.rows(), std::vector<double>(j.cols()));
  std::vector<std::string> header;
  for (size_t b = 0; b < j.cols(); ++b) header.push_back(absl::StrCat("b", b));
  for (size_t a = 0; a < j.rows(); ++a) {
    for (size_t b = 0; b < j.cols(); ++b) rows[a][b] = j.at(a, b);
  }
  return WriteCsv(path, header, rows);
}

absl::Status WriteChannel(const std::string& path, const Channel& ch) {
  Matrix rows(ch.inputs(), std::vector<double>(ch.outputs()));
  std::vector<std::string> header;
  for (size_t y = 0; y < ch.outputs(); ++y) {
    header.push_back(absl::StrCat("y", y));
  }
  for (size_t x = 0; x < ch.inputs(); ++x) {
    for (size_t y = 0; y < ch.outputs(); ++y) rows[x][y] = ch.at(x, y);
  }
  return WriteCsv(path, header, rows);
}

}  // namespace leakgame
