#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wsm {

/// Errors raised while decoding binary images (decoder and disassembler).
enum class DecodeErrorKind : std::uint8_t {
  UnknownOpcode,            // byte is not a defined opcode
  TruncatedImmediate,       // fewer than 4 bytes remain after an immediate opcode
  TargetInsideInstruction,  // branch target is not an instruction boundary
};

struct DecodeError : std::runtime_error {
  DecodeError(DecodeErrorKind kind, std::uint32_t offset, const std::string& msg)
      : std::runtime_error(msg), kind(kind), offset(offset) {}

  DecodeErrorKind kind;
  std::uint32_t offset;  // byte offset the error refers to
};

/// Non-hex token fed to the hexdump parser.
struct HexParseError : std::runtime_error {
  explicit HexParseError(const std::string& token)
      : std::runtime_error("malformed hex token '" + token + "'"), token(token) {}

  std::string token;
};

/// Errors raised by the assembler, each tied to a source line.
enum class AsmErrorKind : std::uint8_t {
  SyntaxError,
  DuplicateLabel,
  UndefinedLabel,
  UnknownMnemonic,
  MissingOperand,
  UnexpectedOperand,
  LiteralOutOfRange,
  ImageTooLarge,
};

struct AsmError : std::runtime_error {
  AsmError(AsmErrorKind kind, int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        kind(kind),
        line(line) {}

  AsmErrorKind kind;
  int line;  // 1-based source line
};

/// Malformed UART RX script file.
struct ScriptError : std::runtime_error {
  ScriptError(int line, const std::string& msg)
      : std::runtime_error("rx script line " + std::to_string(line) + ": " + msg),
        line(line) {}

  int line;
};

}  // namespace wsm
