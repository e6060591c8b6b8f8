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

#include "rvvt/error.hpp"

namespace rvvt {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::MachineMismatch: return "MachineMismatch";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::InvalidN: return "InvalidN";
    case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::NonUniformPeriod: return "NonUniformPeriod";
    case ErrorCode::UnknownEvent: return "UnknownEvent";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::SpanOutOfRange: return "SpanOutOfRange";
    case ErrorCode::UnknownPositiveClass: return "UnknownPositiveClass";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Format: return "Format";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadMagic:
    case ErrorCode::Unsupported:
    case ErrorCode::Truncated:
    case ErrorCode::MachineMismatch:
    case ErrorCode::RaggedRow:
    case ErrorCode::NonMonotonicTime:
    case ErrorCode::NegativeCount:
    case ErrorCode::NonUniformPeriod:
    case ErrorCode::BadHeader:
    case ErrorCode::Io:
    case ErrorCode::Format:
      return true;
    default:
      return false;
  }
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(error_code_name(code)) + ": " + message);
}

}  // namespace rvvt
