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

#include "rvvt/elf.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "rvvt/error.hpp"

namespace rvvt::elf {

namespace {

constexpr std::size_t kIdentSize = 16;
constexpr std::size_t kHeaderSize = 64;
constexpr std::size_t kSectionHeaderSize = 64;

constexpr std::uint32_t kShtNull = 0;
constexpr std::uint32_t kShtNobits = 8;
constexpr std::uint64_t kShfWrite = 0x1;
constexpr std::uint64_t kShfAlloc = 0x2;
constexpr std::uint64_t kShfExecInstr = 0x4;
constexpr std::uint16_t kShnXindex = 0xffff;

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool contains(std::uint64_t offset, std::uint64_t length) const noexcept {
    return offset <= bytes_.size() && length <= bytes_.size() - offset;
  }

  template <typename T>
  T load(std::uint64_t offset, const std::string& what) const {
    if (!contains(offset, sizeof(T)))
      fail(ErrorCode::Truncated, what + " lies past end of buffer");
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      value |= static_cast<T>(static_cast<T>(bytes_[offset + i]) << (8 * i));
    return value;
  }

  std::span<const std::uint8_t> slice(std::uint64_t offset, std::uint64_t length,
                                      const std::string& what) const {
    if (!contains(offset, length))
      fail(ErrorCode::Truncated, what + " lies past end of buffer");
    return bytes_.subspan(offset, length);
  }

 private:
  std::span<const std::uint8_t> bytes_;
};

struct RawSection {
  std::uint32_t name = 0;
  std::uint32_t type = 0;
  std::uint64_t flags = 0;
  std::uint64_t addr = 0;
  std::uint64_t offset = 0;
  std::uint64_t size = 0;
  std::uint32_t link = 0;
};

RawSection read_section_header(const Reader& in, std::uint64_t at) {
  RawSection s;
  s.name = in.load<std::uint32_t>(at + 0, "section header");
  s.type = in.load<std::uint32_t>(at + 4, "section header");
  s.flags = in.load<std::uint64_t>(at + 8, "section header");
  s.addr = in.load<std::uint64_t>(at + 16, "section header");
  s.offset = in.load<std::uint64_t>(at + 24, "section header");
  s.size = in.load<std::uint64_t>(at + 32, "section header");
  s.link = in.load<std::uint32_t>(at + 40, "section header");
  return s;
}

std::string read_name(std::span<const std::uint8_t> strtab, std::uint32_t offset) {
  if (strtab.empty()) return {};
  if (offset >= strtab.size()) fail(ErrorCode::Truncated, "section name offset out of range");
  auto begin = strtab.begin() + offset;
  auto end = std::find(begin, strtab.end(), std::uint8_t{0});
  if (end == strtab.end()) fail(ErrorCode::Truncated, "unterminated section name");
  return std::string(begin, end);
}

}  // namespace

ElfImage parse_elf(std::span<const std::uint8_t> bytes, bool strict) {
  if (bytes.size() < 4 || bytes[0] != 0x7f || bytes[1] != 'E' || bytes[2] != 'L' ||
      bytes[3] != 'F')
    fail(ErrorCode::BadMagic, "not an ELF image");
  if (bytes.size() < kIdentSize) fail(ErrorCode::Truncated, "ELF identification truncated");

  ElfImage image;
  image.elf_class = bytes[4];
  image.endianness = bytes[5];
  if (image.elf_class != 2)
    fail(ErrorCode::Unsupported, "only ELF64 is supported (class " +
                                     std::to_string(image.elf_class) + ")");
  if (image.endianness != 1)
    fail(ErrorCode::Unsupported, "only little-endian ELF is supported");
  if (bytes.size() < kHeaderSize) fail(ErrorCode::Truncated, "ELF header truncated");

  const Reader in(bytes);
  image.type = in.load<std::uint16_t>(16, "e_type");
  image.machine = in.load<std::uint16_t>(18, "e_machine");
  image.entry = in.load<std::uint64_t>(24, "e_entry");
  const auto shoff = in.load<std::uint64_t>(40, "e_shoff");
  const auto shentsize = in.load<std::uint16_t>(58, "e_shentsize");
  std::uint64_t shnum = in.load<std::uint16_t>(60, "e_shnum");
  std::uint32_t shstrndx = in.load<std::uint16_t>(62, "e_shstrndx");

  if (strict && image.machine != kMachineRiscV)
    fail(ErrorCode::MachineMismatch,
         "machine id " + std::to_string(image.machine) + " is not RISC-V (243)");

  if (shoff == 0) fail(ErrorCode::Truncated, "no section header table");
  if (shentsize != kSectionHeaderSize)
    fail(ErrorCode::Truncated, "unexpected section header size " + std::to_string(shentsize));

  // Extended numbering: counts that do not fit the header live in section 0.
  const RawSection null_section = read_section_header(in, shoff);
  if (shnum == 0) shnum = null_section.size;
  if (shstrndx == kShnXindex) shstrndx = null_section.link;
  if (shnum == 0) fail(ErrorCode::Truncated, "empty section header table");
  if (shnum > std::numeric_limits<std::uint64_t>::max() / kSectionHeaderSize ||
      !in.contains(shoff, shnum * kSectionHeaderSize))
    fail(ErrorCode::Truncated, "section header table lies past end of buffer");
  if (shstrndx >= shnum) fail(ErrorCode::Truncated, "section name table index out of range");

  std::vector<RawSection> raw;
  raw.reserve(shnum);
  for (std::uint64_t i = 0; i < shnum; ++i)
    raw.push_back(read_section_header(in, shoff + i * kSectionHeaderSize));

  std::span<const std::uint8_t> strtab;
  if (shstrndx != 0) {
    const RawSection& s = raw[shstrndx];
    if (s.type != kShtNobits) strtab = in.slice(s.offset, s.size, "section name table");
  }

  for (std::uint64_t i = 1; i < shnum; ++i) {
    const RawSection& s = raw[i];
    Section out;
    out.name = read_name(strtab, s.name);
    out.type = s.type;
    out.addr = s.addr;
    out.size = s.size;
    if (s.flags & kShfAlloc) out.flags |= kAlloc;
    if (s.flags & kShfWrite) out.flags |= kWrite;
    if ((s.flags & kShfExecInstr) && (s.flags & kShfAlloc) && s.type != kShtNobits)
      out.flags |= kExec;
    if (s.type != kShtNobits && s.type != kShtNull) {
      auto content = in.slice(s.offset, s.size, "section '" + out.name + "' contents");
      out.bytes.assign(content.begin(), content.end());
    }
    if (out.exec() && s.size > std::numeric_limits<std::uint64_t>::max() - s.addr)
      fail(ErrorCode::Truncated, "section '" + out.name + "' wraps the address space");
    image.sections.push_back(std::move(out));
  }

  std::stable_sort(image.sections.begin(), image.sections.end(),
                   [](const Section& a, const Section& b) { return a.addr < b.addr; });

  const Section* prev = nullptr;
  for (const Section& s : image.sections) {
    if (!s.exec() || s.size == 0) continue;
    if (prev != nullptr && s.addr < prev->addr + prev->size)
      fail(ErrorCode::Truncated,
           "executable sections '" + prev->name + "' and '" + s.name + "' overlap");
    prev = &s;
  }
  return image;
}

ElfImage load_elf_file(const std::string& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::vector<std::uint8_t> buffer((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return parse_elf(buffer, strict);
}

std::vector<CodeChunk> code_bytes(const ElfImage& image) {
  std::vector<CodeChunk> chunks;
  for (const Section& s : image.sections)
    if (s.exec()) chunks.push_back({s.addr, s.bytes});
  // Images built by hand may not be sorted; parse_elf output already is.
  std::stable_sort(chunks.begin(), chunks.end(),
                   [](const CodeChunk& a, const CodeChunk& b) { return a.addr < b.addr; });
  return chunks;
}

std::string describe(const ElfImage& image) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "class: ELF64\nendianness: little\nmachine: %u%s\nentry: 0x%llx\n",
                image.machine, image.is_riscv() ? " (RISC-V)" : " (not RISC-V)",
                static_cast<unsigned long long>(image.entry));
  out << buf << "sections: " << image.sections.size() << '\n';
  for (const Section& s : image.sections) {
    std::snprintf(buf, sizeof buf, "  %-24s addr=0x%016llx size=%-8llu flags=%c%c%c\n",
                  s.name.c_str(), static_cast<unsigned long long>(s.addr),
                  static_cast<unsigned long long>(s.size), s.alloc() ? 'A' : '-',
                  s.write() ? 'W' : '-', s.exec() ? 'X' : '-');
    out << buf;
  }
  return out.str();
}

}  // namespace rvvt::elf
