#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wsm/errors.hpp"
#include "wsm/isa.hpp"

namespace wsm {

/// Label name -> byte offset within the image. A label may sit one past the
/// last instruction (offset == image length).
using SymbolTable = std::map<std::string, std::uint32_t>;

enum class LineKind : std::uint8_t { Blank, LabelDef, Instruction };

enum class OperandKind : std::uint8_t { None, Number, LabelRef };

struct Operand {
  OperandKind kind = OperandKind::None;
  std::uint32_t number = 0;  // Number: already folded to a raw 32-bit word
  std::string label;         // LabelRef: name without the leading ':'
};

struct SourceLine {
  int line_no = 0;
  LineKind kind = LineKind::Blank;
  std::string label;     // LabelDef
  std::string mnemonic;  // Instruction, lowercased
  Operand operand;
  std::string comment;   // text after ';', trimmed
};

/// Line-by-line parse. Throws AsmError (SyntaxError, LiteralOutOfRange).
///
/// Grammar: `; comment` to end of line; a label definition is `:identifier`
/// alone on its line; an instruction is a mnemonic plus at most one operand
/// (decimal literal, optionally negative; 0x hex literal; or `:label` on
/// br_if/jump/call). Mnemonics are case-insensitive, labels case-sensitive.
std::vector<SourceLine> parse_source(std::string_view source);

/// Pass 1: byte offsets for every label, sized with 1-byte/5-byte lengths.
/// Throws AsmError (DuplicateLabel, UnknownMnemonic, plus parse errors).
SymbolTable scan_labels(std::string_view source);
SymbolTable scan_labels(const std::vector<SourceLine>& lines);

struct Assembly {
  FlashImage image;
  SymbolTable symbols;
};

/// Both passes: parse, collect labels, emit code with label references
/// resolved to absolute byte offsets. Forward references are fine.
Assembly assemble_program(std::string_view source);
FlashImage assemble(std::string_view source);

}  // namespace wsm
