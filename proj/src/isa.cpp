#include "wsm/isa.hpp"

#include <cassert>
#include <cctype>

namespace wsm {

namespace {

constexpr std::array<std::int8_t, 256> make_byte_index() {
  std::array<std::int8_t, 256> t{};
  for (auto& e : t) e = -1;
  for (std::size_t i = 0; i < kOpcodeTable.size(); ++i) {
    t[static_cast<std::uint8_t>(kOpcodeTable[i].op)] = static_cast<std::int8_t>(i);
  }
  return t;
}

constexpr auto kByteIndex = make_byte_index();

std::string hex_byte(std::uint8_t byte) {
  constexpr char digits[] = "0123456789abcdef";
  return {digits[byte >> 4], digits[byte & 0xF]};
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

}  // namespace

const OpcodeInfo* opcode_info(std::uint8_t byte) {
  const std::int8_t idx = kByteIndex[byte];
  return idx < 0 ? nullptr : &kOpcodeTable[static_cast<std::size_t>(idx)];
}

const OpcodeInfo* opcode_info(Opcode op) {
  return opcode_info(static_cast<std::uint8_t>(op));
}

const OpcodeInfo* mnemonic_info(std::string_view mnemonic) {
  for (const auto& e : kOpcodeTable) {
    if (iequals(e.mnemonic, mnemonic)) return &e;
  }
  return nullptr;
}

std::string_view mnemonic(Opcode op) { return opcode_info(op)->mnemonic; }

bool has_immediate(Opcode op) { return opcode_info(op)->has_immediate; }

bool is_comparison(Opcode op) { return opcode_info(op)->cls == OpClass::Compare; }

std::size_t encoded_length(Opcode op) { return has_immediate(op) ? 5 : 1; }

void encode_instruction(const Instruction& in, FlashImage& out) {
  assert(in.immediate.has_value() == has_immediate(in.op));
  out.push_back(static_cast<std::uint8_t>(in.op));
  if (in.immediate) {
    const std::uint32_t imm = *in.immediate;
    out.push_back(static_cast<std::uint8_t>(imm & 0xFF));
    out.push_back(static_cast<std::uint8_t>((imm >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((imm >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((imm >> 24) & 0xFF));
  }
}

FlashImage encode_instruction(const Instruction& in) {
  FlashImage out;
  encode_instruction(in, out);
  return out;
}

DecodedInstruction decode_instruction(std::span<const std::uint8_t> bytes,
                                      std::uint32_t offset) {
  assert(offset < bytes.size());
  const std::uint8_t byte = bytes[offset];
  const OpcodeInfo* info = opcode_info(byte);
  if (!info) {
    throw DecodeError(DecodeErrorKind::UnknownOpcode, offset,
                      "unknown opcode byte 0x" + hex_byte(byte) + " at offset " +
                          std::to_string(offset));
  }
  if (!info->has_immediate) {
    return {instr(info->op), offset + 1};
  }
  if (bytes.size() - offset < 5) {
    throw DecodeError(DecodeErrorKind::TruncatedImmediate, offset,
                      "truncated immediate for '" + std::string(info->mnemonic) +
                          "' at offset " + std::to_string(offset));
  }
  const std::uint32_t imm = static_cast<std::uint32_t>(bytes[offset + 1]) |
                            (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
                            (static_cast<std::uint32_t>(bytes[offset + 3]) << 16) |
                            (static_cast<std::uint32_t>(bytes[offset + 4]) << 24);
  return {instr(info->op, imm), offset + 5};
}

}  // namespace wsm
