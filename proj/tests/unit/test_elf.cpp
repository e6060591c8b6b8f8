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

#include <cstring>

#include "rvvt/elf.hpp"
#include "test_support.hpp"

using namespace rvvt;
using rvvt::testing::code_of;
using rvvt::testing::data_path;
using rvvt::testing::read_bytes;

namespace {

template <typename T>
T get(const std::vector<std::uint8_t>& b, std::size_t off) {
  T v{};
  std::memcpy(&v, b.data() + off, sizeof v);
  return v;
}

// Offsets of the section headers flagged SHF_EXECINSTR.
std::vector<std::size_t> exec_headers(const std::vector<std::uint8_t>& b) {
  auto shoff = get<std::uint64_t>(b, 0x28);
  auto shentsize = get<std::uint16_t>(b, 0x3A);
  auto shnum = get<std::uint16_t>(b, 0x3C);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < shnum; ++i) {
    std::size_t h = shoff + i * shentsize;
    if (get<std::uint64_t>(b, h + 8) & 0x4) out.push_back(h);
  }
  return out;
}

}  // namespace

TEST_CASE("minimal fixture has one 4-byte exec section") {
  auto image = elf::load_elf_file(data_path("min_rv64.elf"));
  CHECK(image.is_riscv());
  CHECK(image.elf_class == 2);
  CHECK(image.endianness == 1);
  std::size_t exec = 0;
  for (const auto& s : image.sections) {
    if (!s.exec()) continue;
    ++exec;
    CHECK(s.alloc());
    CHECK(s.size == 4);
    CHECK(s.bytes == std::vector<std::uint8_t>{0x13, 0x00, 0x00, 0x00});
  }
  CHECK(exec == 1);
  auto chunks = elf::code_bytes(image);
  REQUIRE(chunks.size() == 1);
  CHECK(chunks[0].bytes.size() == 4);
  CHECK(chunks[0].addr == image.entry);
}

TEST_CASE("sections are sorted by address and both code sections are found") {
  auto image = elf::load_elf_file(data_path("two_sections_rv64.elf"));
  for (std::size_t i = 1; i < image.sections.size(); ++i)
    CHECK(image.sections[i - 1].addr <= image.sections[i].addr);
  auto chunks = elf::code_bytes(image);
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0].addr < chunks[1].addr);
  CHECK(elf::describe(image).find("RISC-V") != std::string::npos);
}

TEST_CASE("code_bytes orders hand-built images") {
  elf::ElfImage image;
  image.machine = elf::kMachineRiscV;
  CHECK(elf::code_bytes(image).empty());
  image.sections.push_back({".b", 1, 0x2000, 2, elf::kAlloc | elf::kExec, {1, 0}});
  image.sections.push_back({".a", 1, 0x1000, 2, elf::kAlloc | elf::kExec, {2, 0}});
  image.sections.push_back({".d", 1, 0x3000, 2, elf::kAlloc | elf::kWrite, {3, 0}});
  auto chunks = elf::code_bytes(image);
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0].addr == 0x1000);
  CHECK(chunks[1].addr == 0x2000);
}

TEST_CASE("malformed input is rejected with the right code") {
  std::vector<std::uint8_t> zeros(4, 0);
  CHECK(code_of([&] { elf::parse_elf(zeros); }) == ErrorCode::BadMagic);
  CHECK(code_of([&] { elf::parse_elf({}); }) == ErrorCode::BadMagic);

  auto good = read_bytes(data_path("min_rv64.elf"));
  auto cut = good;
  cut.resize(40);
  CHECK(code_of([&] { elf::parse_elf(cut); }) == ErrorCode::Truncated);
  cut = good;
  cut.resize(good.size() - 8);  // section header table is last
  CHECK(code_of([&] { elf::parse_elf(cut); }) == ErrorCode::Truncated);

  auto elf32 = good;
  elf32[4] = 1;
  CHECK(code_of([&] { elf::parse_elf(elf32); }) == ErrorCode::Unsupported);
  auto big = good;
  big[5] = 2;
  CHECK(code_of([&] { elf::parse_elf(big); }) == ErrorCode::Unsupported);

  CHECK(code_of([] { elf::load_elf_file(data_path("does_not_exist.elf")); }) == ErrorCode::Io);
}

TEST_CASE("foreign machine only passes with strict checking off") {
  auto path = data_path("min_x86_64.elf");
  CHECK(code_of([&] { elf::load_elf_file(path); }) == ErrorCode::MachineMismatch);
  auto image = elf::load_elf_file(path, false);
  CHECK(image.machine == 62);
  CHECK_FALSE(image.is_riscv());
}

TEST_CASE("overlapping code sections are rejected") {
  auto bytes = read_bytes(data_path("two_sections_rv64.elf"));
  auto heads = exec_headers(bytes);
  REQUIRE(heads.size() == 2);
  auto addr = get<std::uint64_t>(bytes, heads[0] + 0x10);
  std::memcpy(bytes.data() + heads[1] + 0x10, &addr, sizeof addr);
  CHECK(code_of([&] { elf::parse_elf(bytes); }) == ErrorCode::Truncated);
}
