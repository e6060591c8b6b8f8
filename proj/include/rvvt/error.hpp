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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rvvt {

/// Every failure the library reports. Values are stable: the C API exposes
/// them verbatim as status codes.
enum class ErrorCode : int {
  // ELF ingestion
  BadMagic = 1,
  Unsupported = 2,
  Truncated = 3,
  MachineMismatch = 4,
  // decoding
  WidthMismatch = 10,
  // static features and models
  InvalidN = 20,
  EmptyVocabulary = 21,
  EmptyClass = 22,
  ShapeMismatch = 23,
  NonFiniteLoss = 24,
  // traces
  RaggedRow = 30,
  NonMonotonicTime = 31,
  NegativeCount = 32,
  NonUniformPeriod = 33,
  UnknownEvent = 34,
  WindowTooLong = 35,
  BadHeader = 36,
  // feature selection and detectors
  SingleClass = 40,
  LengthMismatch = 41,
  ConstantInput = 42,
  InvalidK = 43,
  TooFewSamples = 44,
  EmptyEnsemble = 45,
  // synthesis and evaluation
  SpanOutOfRange = 50,
  UnknownPositiveClass = 51,
  // generic
  InvalidArgument = 60,
  Io = 61,
  Format = 62,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// True for errors caused by malformed input files (as opposed to a caller
/// breaking an operation's precondition).
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace rvvt
