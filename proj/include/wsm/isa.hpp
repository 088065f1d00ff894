#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wsm/errors.hpp"

namespace wsm {

// Instructions are fetched through a 24-bit flash address bus.
inline constexpr unsigned kFlashAddrBits = 24;
inline constexpr std::size_t kFlashAddrSpace = std::size_t{1} << kFlashAddrBits;

/// Raw byte sequence as burned to flash. No header, no padding.
using FlashImage = std::vector<std::uint8_t>;

/// The 23 defined opcodes. Every other byte value is undefined and rejected.
enum class Opcode : std::uint8_t {
  Push = 0x01,
  Add = 0x02,
  Sub = 0x03,
  Mul = 0x04,
  Drop = 0x05,
  Print = 0x08,
  Eq = 0x09,
  LtS = 0x0A,
  GtS = 0x0B,
  BrIf = 0x0E,
  Jump = 0x0F,
  Call = 0x10,
  Ret = 0x11,
  Dup = 0x12,
  Swap = 0x13,
  Over = 0x14,
  And = 0x16,
  Or = 0x17,
  Not = 0x19,
  Load = 0x1D,
  Store = 0x1E,
  Key = 0x1F,
  Eqz = 0x35,
};

enum class OpClass : std::uint8_t {
  StackManip,
  ArithLogic,
  Compare,
  ControlFlow,
  MemoryIo,
};

struct OpcodeInfo {
  Opcode op;
  const char* mnemonic;  // canonical lowercase spelling
  bool has_immediate;    // true: opcode byte is followed by a 32-bit LE word
  OpClass cls;
};

inline constexpr std::array<OpcodeInfo, 23> kOpcodeTable = {{
    // stack manipulation
    {Opcode::Push, "push", true, OpClass::StackManip},
    {Opcode::Drop, "drop", false, OpClass::StackManip},
    {Opcode::Dup, "dup", false, OpClass::StackManip},
    {Opcode::Swap, "swap", false, OpClass::StackManip},
    {Opcode::Over, "over", false, OpClass::StackManip},
    // arithmetic & logic
    {Opcode::Add, "add", false, OpClass::ArithLogic},
    {Opcode::Sub, "sub", false, OpClass::ArithLogic},
    {Opcode::Mul, "mul", false, OpClass::ArithLogic},
    {Opcode::And, "and", false, OpClass::ArithLogic},
    {Opcode::Or, "or", false, OpClass::ArithLogic},
    {Opcode::Not, "not", false, OpClass::ArithLogic},
    // comparison (result is 1 for true, 0 for false)
    {Opcode::Eq, "eq", false, OpClass::Compare},
    {Opcode::LtS, "lt_s", false, OpClass::Compare},
    {Opcode::GtS, "gt_s", false, OpClass::Compare},
    {Opcode::Eqz, "eqz", false, OpClass::Compare},
    // control flow
    {Opcode::BrIf, "br_if", true, OpClass::ControlFlow},
    {Opcode::Jump, "jump", true, OpClass::ControlFlow},
    {Opcode::Call, "call", true, OpClass::ControlFlow},
    {Opcode::Ret, "ret", false, OpClass::ControlFlow},
    // memory & I/O
    {Opcode::Load, "load", false, OpClass::MemoryIo},
    {Opcode::Store, "store", false, OpClass::MemoryIo},
    {Opcode::Print, "print", false, OpClass::MemoryIo},
    {Opcode::Key, "key", false, OpClass::MemoryIo},
}};

/// Table entry for a raw byte, or nullptr when the byte is undefined.
const OpcodeInfo* opcode_info(std::uint8_t byte);
const OpcodeInfo* opcode_info(Opcode op);

/// Case-insensitive mnemonic lookup; nullptr when unknown.
const OpcodeInfo* mnemonic_info(std::string_view mnemonic);

std::string_view mnemonic(Opcode op);
bool has_immediate(Opcode op);
bool is_comparison(Opcode op);

/// One instruction: an opcode plus its immediate when the opcode carries one.
/// The immediate is a raw 32-bit word; signedness is applied by the consuming
/// operation (lt_s, gt_s), not stored here.
struct Instruction {
  Opcode op;
  std::optional<std::uint32_t> immediate;

  bool operator==(const Instruction&) const = default;
};

inline Instruction instr(Opcode op) { return {op, std::nullopt}; }
inline Instruction instr(Opcode op, std::uint32_t imm) { return {op, imm}; }

/// Encoded size in bytes: 1, or 5 with an immediate.
std::size_t encoded_length(Opcode op);

/// Appends the encoding (opcode byte, then immediate LSB first) to `out`.
void encode_instruction(const Instruction& in, FlashImage& out);
FlashImage encode_instruction(const Instruction& in);

struct DecodedInstruction {
  Instruction instruction;
  std::uint32_t next_offset;
};

/// Decodes the instruction starting at `offset`.
/// Throws DecodeError (UnknownOpcode, TruncatedImmediate).
DecodedInstruction decode_instruction(std::span<const std::uint8_t> bytes,
                                      std::uint32_t offset);

}  // namespace wsm
