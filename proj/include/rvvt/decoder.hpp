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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rvvt/elf.hpp"

namespace rvvt::rv {

/// One decoded instruction. Operands are not retained: the feature pipeline
/// works on opcode identity only.
struct Instruction {
  std::string_view mnemonic;  // points into the static vocabulary
  std::uint8_t width = 0;     // 2 or 4
  std::uint32_t raw = 0;
};

struct OpcodeSequence {
  std::vector<std::string> tokens;
  std::string source_id;

  friend bool operator==(const OpcodeSequence&, const OpcodeSequence&) = default;
};

/// Tokens for undecodable parcels and a trailing odd byte.
inline constexpr std::string_view kUnknown32 = "unk32";
inline constexpr std::string_view kUnknown16 = "unk16";
inline constexpr std::string_view kPad8 = "pad8";

/// The closed mnemonic vocabulary: RV64 I, M, A, F, D, C, Zicsr and
/// Zifencei, followed by the three placeholder tokens. Sorted by extension,
/// stable across releases (new tokens are appended).
std::span<const std::string_view> vocabulary() noexcept;
bool in_vocabulary(std::string_view token) noexcept;

/// Byte width of a token when it was produced by the decoder.
std::size_t token_width(std::string_view token) noexcept;

/// Decodes a single parcel. `width` must be 2 or 4 and agree with the low
/// two bits of `raw` (0b11 means 32-bit); otherwise WidthMismatch.
Instruction decode_one(std::uint32_t raw, unsigned width);

/// Linear sweep over one contiguous byte range.
void decode_bytes(std::span<const std::uint8_t> bytes, std::vector<std::string>& tokens);

/// Linear sweep over each chunk in order. Never fails.
OpcodeSequence decode_stream(std::span<const elf::CodeChunk> chunks,
                             std::string source_id = {});

/// One token per line, newline terminated.
std::string format_tokens(const OpcodeSequence& seq);
OpcodeSequence parse_tokens(std::string_view text, std::string source_id = {});

void write_token_file(const std::string& path, const OpcodeSequence& seq);
OpcodeSequence read_token_file(const std::string& path);

}  // namespace rvvt::rv
