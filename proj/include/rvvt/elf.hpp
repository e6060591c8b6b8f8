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
#include <vector>

namespace rvvt::elf {

inline constexpr std::uint16_t kMachineRiscV = 243;

enum SectionFlag : std::uint32_t {
  kAlloc = 1u << 0,
  kExec = 1u << 1,
  kWrite = 1u << 2,
};

struct Section {
  std::string name;
  std::uint32_t type = 0;  // raw sh_type
  std::uint64_t addr = 0;
  std::uint64_t size = 0;
  std::uint32_t flags = 0;  // SectionFlag bits
  std::vector<std::uint8_t> bytes;  // empty for NOBITS

  bool alloc() const noexcept { return (flags & kAlloc) != 0; }
  bool exec() const noexcept { return (flags & kExec) != 0; }
  bool write() const noexcept { return (flags & kWrite) != 0; }
};

struct ElfImage {
  std::uint8_t elf_class = 0;   // 2 == ELF64
  std::uint8_t endianness = 0;  // 1 == little
  std::uint16_t type = 0;       // e_type
  std::uint16_t machine = 0;
  std::uint64_t entry = 0;
  std::vector<Section> sections;  // ascending addr, ties in header order

  /// False only for images parsed with strict checking off.
  bool is_riscv() const noexcept { return machine == kMachineRiscV; }
};

struct CodeChunk {
  std::uint64_t addr = 0;
  std::vector<std::uint8_t> bytes;
};

/// Parses an ELF64 little-endian image. Reads are bounds-checked against
/// `bytes`; malformed input yields rvvt::Error, never undefined behaviour.
/// The exec flag is reported only for allocated, non-NOBITS sections.
ElfImage parse_elf(std::span<const std::uint8_t> bytes, bool strict = true);

ElfImage load_elf_file(const std::string& path, bool strict = true);

/// Executable sections in ascending address order.
std::vector<CodeChunk> code_bytes(const ElfImage& image);

std::string describe(const ElfImage& image);

}  // namespace rvvt::elf
