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

#include "rvvt/decoder.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "rvvt/error.hpp"

namespace rvvt::rv {

namespace {

constexpr std::string_view kVocabulary[] = {
    // RV64I
    "lui", "auipc", "jal", "jalr", "beq", "bne", "blt", "bge", "bltu", "bgeu",
    "lb", "lh", "lw", "ld", "lbu", "lhu", "lwu", "sb", "sh", "sw", "sd",
    "addi", "slti", "sltiu", "xori", "ori", "andi", "slli", "srli", "srai",
    "add", "sub", "sll", "slt", "sltu", "xor", "srl", "sra", "or", "and",
    "addiw", "slliw", "srliw", "sraiw", "addw", "subw", "sllw", "srlw", "sraw",
    "fence", "fence.i", "ecall", "ebreak",
    // Zicsr
    "csrrw", "csrrs", "csrrc", "csrrwi", "csrrsi", "csrrci",
    // M
    "mul", "mulh", "mulhsu", "mulhu", "div", "divu", "rem", "remu",
    "mulw", "divw", "divuw", "remw", "remuw",
    // A
    "lr.w", "sc.w", "amoswap.w", "amoadd.w", "amoxor.w", "amoand.w", "amoor.w",
    "amomin.w", "amomax.w", "amominu.w", "amomaxu.w",
    "lr.d", "sc.d", "amoswap.d", "amoadd.d", "amoxor.d", "amoand.d", "amoor.d",
    "amomin.d", "amomax.d", "amominu.d", "amomaxu.d",
    // F
    "flw", "fsw", "fmadd.s", "fmsub.s", "fnmsub.s", "fnmadd.s",
    "fadd.s", "fsub.s", "fmul.s", "fdiv.s", "fsqrt.s",
    "fsgnj.s", "fsgnjn.s", "fsgnjx.s", "fmin.s", "fmax.s",
    "fcvt.w.s", "fcvt.wu.s", "fcvt.l.s", "fcvt.lu.s", "fmv.x.w", "fclass.s",
    "feq.s", "flt.s", "fle.s",
    "fcvt.s.w", "fcvt.s.wu", "fcvt.s.l", "fcvt.s.lu", "fmv.w.x",
    // D
    "fld", "fsd", "fmadd.d", "fmsub.d", "fnmsub.d", "fnmadd.d",
    "fadd.d", "fsub.d", "fmul.d", "fdiv.d", "fsqrt.d",
    "fsgnj.d", "fsgnjn.d", "fsgnjx.d", "fmin.d", "fmax.d",
    "fcvt.s.d", "fcvt.d.s", "feq.d", "flt.d", "fle.d", "fclass.d",
    "fcvt.w.d", "fcvt.wu.d", "fcvt.l.d", "fcvt.lu.d", "fmv.x.d",
    "fcvt.d.w", "fcvt.d.wu", "fcvt.d.l", "fcvt.d.lu", "fmv.d.x",
    // C (RV64)
    "c.addi4spn", "c.fld", "c.lw", "c.ld", "c.fsd", "c.sw", "c.sd",
    "c.nop", "c.addi", "c.addiw", "c.li", "c.addi16sp", "c.lui",
    "c.srli", "c.srai", "c.andi", "c.sub", "c.xor", "c.or", "c.and", "c.subw", "c.addw",
    "c.j", "c.beqz", "c.bnez",
    "c.slli", "c.fldsp", "c.lwsp", "c.ldsp", "c.jr", "c.mv", "c.ebreak", "c.jalr", "c.add",
    "c.fsdsp", "c.swsp", "c.sdsp",
    // placeholders
    "unk32", "unk16", "pad8",
};

constexpr std::uint32_t bits(std::uint32_t v, unsigned hi, unsigned lo) {
  return (v >> lo) & ((1u << (hi - lo + 1)) - 1);
}

constexpr bool valid_rm(std::uint32_t rm) { return rm != 5 && rm != 6; }

std::string_view pick(std::initializer_list<std::string_view> table, std::uint32_t index) {
  if (index >= table.size()) return kUnknown32;
  std::string_view s = *(table.begin() + index);
  return s.empty() ? kUnknown32 : s;
}

std::string_view decode_amo(std::uint32_t raw) {
  const std::uint32_t f3 = bits(raw, 14, 12);
  if (f3 != 2 && f3 != 3) return kUnknown32;
  const bool dword = f3 == 3;
  switch (bits(raw, 31, 27)) {
    case 0x02: return bits(raw, 24, 20) != 0 ? kUnknown32 : (dword ? "lr.d" : "lr.w");
    case 0x03: return dword ? "sc.d" : "sc.w";
    case 0x01: return dword ? "amoswap.d" : "amoswap.w";
    case 0x00: return dword ? "amoadd.d" : "amoadd.w";
    case 0x04: return dword ? "amoxor.d" : "amoxor.w";
    case 0x0c: return dword ? "amoand.d" : "amoand.w";
    case 0x08: return dword ? "amoor.d" : "amoor.w";
    case 0x10: return dword ? "amomin.d" : "amomin.w";
    case 0x14: return dword ? "amomax.d" : "amomax.w";
    case 0x18: return dword ? "amominu.d" : "amominu.w";
    case 0x1c: return dword ? "amomaxu.d" : "amomaxu.w";
    default: return kUnknown32;
  }
}

std::string_view decode_op_fp(std::uint32_t raw) {
  const std::uint32_t funct7 = bits(raw, 31, 25);
  const std::uint32_t rm = bits(raw, 14, 12);
  const std::uint32_t rs2 = bits(raw, 24, 20);
  const bool dbl = (funct7 & 1) != 0;
  auto rounded = [&](std::string_view s, std::string_view d) -> std::string_view {
    return valid_rm(rm) ? (dbl ? d : s) : kUnknown32;
  };
  switch (funct7) {
    case 0x00: case 0x01: return rounded("fadd.s", "fadd.d");
    case 0x04: case 0x05: return rounded("fsub.s", "fsub.d");
    case 0x08: case 0x09: return rounded("fmul.s", "fmul.d");
    case 0x0c: case 0x0d: return rounded("fdiv.s", "fdiv.d");
    case 0x2c: case 0x2d: return rs2 == 0 ? rounded("fsqrt.s", "fsqrt.d") : kUnknown32;
    case 0x10: return pick({"fsgnj.s", "fsgnjn.s", "fsgnjx.s"}, rm);
    case 0x11: return pick({"fsgnj.d", "fsgnjn.d", "fsgnjx.d"}, rm);
    case 0x14: return pick({"fmin.s", "fmax.s"}, rm);
    case 0x15: return pick({"fmin.d", "fmax.d"}, rm);
    case 0x20: return rs2 == 1 && valid_rm(rm) ? "fcvt.s.d" : kUnknown32;
    case 0x21: return rs2 == 0 && valid_rm(rm) ? "fcvt.d.s" : kUnknown32;
    case 0x50: return pick({"fle.s", "flt.s", "feq.s"}, rm);
    case 0x51: return pick({"fle.d", "flt.d", "feq.d"}, rm);
    case 0x60:
      return valid_rm(rm) ? pick({"fcvt.w.s", "fcvt.wu.s", "fcvt.l.s", "fcvt.lu.s"}, rs2)
                          : kUnknown32;
    case 0x61:
      return valid_rm(rm) ? pick({"fcvt.w.d", "fcvt.wu.d", "fcvt.l.d", "fcvt.lu.d"}, rs2)
                          : kUnknown32;
    case 0x68:
      return valid_rm(rm) ? pick({"fcvt.s.w", "fcvt.s.wu", "fcvt.s.l", "fcvt.s.lu"}, rs2)
                          : kUnknown32;
    case 0x69:
      return valid_rm(rm) ? pick({"fcvt.d.w", "fcvt.d.wu", "fcvt.d.l", "fcvt.d.lu"}, rs2)
                          : kUnknown32;
    case 0x70:
      if (rs2 != 0) return kUnknown32;
      return pick({"fmv.x.w", "fclass.s"}, rm);
    case 0x71:
      if (rs2 != 0) return kUnknown32;
      return pick({"fmv.x.d", "fclass.d"}, rm);
    case 0x78: return rs2 == 0 && rm == 0 ? "fmv.w.x" : kUnknown32;
    case 0x79: return rs2 == 0 && rm == 0 ? "fmv.d.x" : kUnknown32;
    default: return kUnknown32;
  }
}

std::string_view decode32(std::uint32_t raw) {
  const std::uint32_t f3 = bits(raw, 14, 12);
  const std::uint32_t funct7 = bits(raw, 31, 25);
  switch (bits(raw, 6, 0)) {
    case 0x37: return "lui";
    case 0x17: return "auipc";
    case 0x6f: return "jal";
    case 0x67: return f3 == 0 ? "jalr" : kUnknown32;
    case 0x63: return pick({"beq", "bne", "", "", "blt", "bge", "bltu", "bgeu"}, f3);
    case 0x03: return pick({"lb", "lh", "lw", "ld", "lbu", "lhu", "lwu"}, f3);
    case 0x23: return pick({"sb", "sh", "sw", "sd"}, f3);
    case 0x13:
      switch (f3) {
        case 1: return bits(raw, 31, 26) == 0 ? "slli" : kUnknown32;
        case 5:
          if (bits(raw, 31, 26) == 0x00) return "srli";
          if (bits(raw, 31, 26) == 0x10) return "srai";
          return kUnknown32;
        default: return pick({"addi", "", "slti", "sltiu", "xori", "", "ori", "andi"}, f3);
      }
    case 0x1b:
      switch (f3) {
        case 0: return "addiw";
        case 1: return funct7 == 0 ? "slliw" : kUnknown32;
        case 5:
          if (funct7 == 0x00) return "srliw";
          if (funct7 == 0x20) return "sraiw";
          return kUnknown32;
        default: return kUnknown32;
      }
    case 0x33:
      switch (funct7) {
        case 0x00: return pick({"add", "sll", "slt", "sltu", "xor", "srl", "or", "and"}, f3);
        case 0x20: return pick({"sub", "", "", "", "", "sra"}, f3);
        case 0x01:
          return pick({"mul", "mulh", "mulhsu", "mulhu", "div", "divu", "rem", "remu"}, f3);
        default: return kUnknown32;
      }
    case 0x3b:
      switch (funct7) {
        case 0x00: return pick({"addw", "sllw", "", "", "", "srlw"}, f3);
        case 0x20: return pick({"subw", "", "", "", "", "sraw"}, f3);
        case 0x01: return pick({"mulw", "", "", "", "divw", "divuw", "remw", "remuw"}, f3);
        default: return kUnknown32;
      }
    case 0x0f:
      if (bits(raw, 19, 15) != 0 || bits(raw, 11, 7) != 0) return kUnknown32;
      if (f3 == 1) return bits(raw, 31, 20) == 0 ? "fence.i" : kUnknown32;
      if (f3 != 0) return kUnknown32;
      // fm = 0 is a plain fence; fm = 0b1000 with rw,rw is fence.tso, folded in.
      if (bits(raw, 31, 28) == 0) return "fence";
      if (bits(raw, 31, 20) == 0x833) return "fence";
      return kUnknown32;
    case 0x73:
      switch (f3) {
        case 0:
          if (raw == 0x00000073) return "ecall";
          if (raw == 0x00100073) return "ebreak";
          return kUnknown32;
        case 4: return kUnknown32;
        default:
          return pick({"", "csrrw", "csrrs", "csrrc", "", "csrrwi", "csrrsi", "csrrci"}, f3);
      }
    case 0x2f: return decode_amo(raw);
    case 0x07: return pick({"", "", "flw", "fld"}, f3);
    case 0x27: return pick({"", "", "fsw", "fsd"}, f3);
    case 0x43: case 0x47: case 0x4b: case 0x4f: {
      const std::uint32_t fmt = bits(raw, 26, 25);
      if (fmt > 1 || !valid_rm(f3)) return kUnknown32;
      const bool dbl = fmt == 1;
      switch (bits(raw, 6, 0)) {
        case 0x43: return dbl ? "fmadd.d" : "fmadd.s";
        case 0x47: return dbl ? "fmsub.d" : "fmsub.s";
        case 0x4b: return dbl ? "fnmsub.d" : "fnmsub.s";
        default: return dbl ? "fnmadd.d" : "fnmadd.s";
      }
    }
    case 0x53: return decode_op_fp(raw);
    default: return kUnknown32;
  }
}

std::string_view decode16(std::uint32_t raw) {
  const std::uint32_t f3 = bits(raw, 15, 13);
  const std::uint32_t rd = bits(raw, 11, 7);
  const std::uint32_t rs2 = bits(raw, 6, 2);
  const std::uint32_t b12 = bits(raw, 12, 12);
  switch (bits(raw, 1, 0)) {
    case 0:
      switch (f3) {
        case 0: return bits(raw, 12, 5) == 0 ? kUnknown16 : "c.addi4spn";
        case 1: return "c.fld";
        case 2: return "c.lw";
        case 3: return "c.ld";
        case 5: return "c.fsd";
        case 6: return "c.sw";
        case 7: return "c.sd";
        default: return kUnknown16;
      }
    case 1:
      switch (f3) {
        case 0:
          if (rd != 0) return "c.addi";
          return bits(raw, 12, 12) == 0 && rs2 == 0 ? "c.nop" : kUnknown16;
        case 1: return rd == 0 ? kUnknown16 : "c.addiw";
        case 2: return rd == 0 ? kUnknown16 : "c.li";
        case 3: {
          const bool zero_imm = b12 == 0 && rs2 == 0;
          if (zero_imm || rd == 0) return kUnknown16;
          return rd == 2 ? "c.addi16sp" : "c.lui";
        }
        case 4:
          switch (bits(raw, 11, 10)) {
            case 0: return "c.srli";
            case 1: return "c.srai";
            case 2: return "c.andi";
            default: {
              const std::uint32_t op = bits(raw, 6, 5);
              if (b12 == 0) {
                constexpr std::string_view ops[] = {"c.sub", "c.xor", "c.or", "c.and"};
                return ops[op];
              }
              if (op == 0) return "c.subw";
              if (op == 1) return "c.addw";
              return kUnknown16;
            }
          }
        case 5: return "c.j";
        case 6: return "c.beqz";
        default: return "c.bnez";
      }
    case 2:
      switch (f3) {
        case 0: return rd == 0 ? kUnknown16 : "c.slli";
        case 1: return "c.fldsp";
        case 2: return rd == 0 ? kUnknown16 : "c.lwsp";
        case 3: return rd == 0 ? kUnknown16 : "c.ldsp";
        case 4:
          if (b12 == 0) {
            if (rs2 != 0) return rd == 0 ? kUnknown16 : "c.mv";
            return rd == 0 ? kUnknown16 : "c.jr";
          }
          if (rs2 != 0) return rd == 0 ? kUnknown16 : "c.add";
          return rd == 0 ? "c.ebreak" : "c.jalr";
        case 5: return "c.fsdsp";
        case 6: return "c.swsp";
        default: return "c.sdsp";
      }
    default: return kUnknown16;
  }
}

}  // namespace

std::span<const std::string_view> vocabulary() noexcept { return kVocabulary; }

bool in_vocabulary(std::string_view token) noexcept {
  return std::find(std::begin(kVocabulary), std::end(kVocabulary), token) !=
         std::end(kVocabulary);
}

std::size_t token_width(std::string_view token) noexcept {
  if (token == kPad8) return 1;
  if (token == kUnknown16 || token.starts_with("c.")) return 2;
  return 4;
}

Instruction decode_one(std::uint32_t raw, unsigned width) {
  const bool wide = (raw & 0x3u) == 0x3u;
  if (width == 4 && wide) return {decode32(raw), 4, raw};
  if (width == 2 && !wide && raw <= 0xffffu) return {decode16(raw), 2, raw};
  fail(ErrorCode::WidthMismatch, "parcel low bits contradict declared width " +
                                     std::to_string(width));
}

void decode_bytes(std::span<const std::uint8_t> bytes, std::vector<std::string>& tokens) {
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t left = bytes.size() - pos;
    if (left == 1) {
      tokens.emplace_back(kPad8);
      break;
    }
    const std::uint32_t lo = bytes[pos] | (static_cast<std::uint32_t>(bytes[pos + 1]) << 8);
    if ((lo & 0x3u) != 0x3u) {
      tokens.emplace_back(decode16(lo));
      pos += 2;
    } else if (left >= 4) {
      const std::uint32_t hi =
          bytes[pos + 2] | (static_cast<std::uint32_t>(bytes[pos + 3]) << 8);
      tokens.emplace_back(decode32(lo | (hi << 16)));
      pos += 4;
    } else {
      // A 32-bit parcel cut off by the end of the chunk.
      tokens.emplace_back(kUnknown16);
      pos += 2;
    }
  }
}

OpcodeSequence decode_stream(std::span<const elf::CodeChunk> chunks, std::string source_id) {
  OpcodeSequence seq;
  seq.source_id = std::move(source_id);
  for (const auto& chunk : chunks) decode_bytes(chunk.bytes, seq.tokens);
  return seq;
}

std::string format_tokens(const OpcodeSequence& seq) {
  std::string out;
  for (const auto& t : seq.tokens) {
    out += t;
    out += '\n';
  }
  return out;
}

OpcodeSequence parse_tokens(std::string_view text, std::string source_id) {
  OpcodeSequence seq;
  seq.source_id = std::move(source_id);
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty()) continue;
    if (!in_vocabulary(line))
      fail(ErrorCode::Format, seq.source_id + ":" + std::to_string(line_no) +
                                  ": token '" + std::string(line) + "' is not in the vocabulary");
    seq.tokens.emplace_back(line);
  }
  return seq;
}

void write_token_file(const std::string& path, const OpcodeSequence& seq) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << format_tokens(seq);
  if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

OpcodeSequence read_token_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tokens(buf.str(), path);
}

}  // namespace rvvt::rv
