// Copyright 2026 The rvvt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Line-oriented CSV helpers shared by the file formats. Private to src/.

#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace rvvt::csv {

std::vector<std::string_view> split(std::string_view line, char sep = ',');

/// Formats with 17 significant digits; infinities as "inf"/"-inf".
std::string format_double(double value);

class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  /// Next non-empty line with any trailing '\r' removed.
  bool next(std::string& line);

  std::size_t line_no() const noexcept { return line_no_; }
  const std::string& source() const noexcept { return source_; }

  /// "<source>:<line>: " prefix for error messages.
  std::string where() const;

  double parse_double(std::string_view field) const;
  long long parse_int(std::string_view field) const;

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
};

}  // namespace rvvt::csv
