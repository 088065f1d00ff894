#include "wsm/assembler.hpp"

#include <cassert>
#include <cctype>

namespace wsm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Decimal (optionally negative, encoded two's-complement) or 0x hex.
std::uint32_t parse_literal(std::string_view tok, int line_no) {
  const std::string_view orig = tok;
  bool negative = false;
  if (!tok.empty() && tok[0] == '-') {
    negative = true;
    tok.remove_prefix(1);
  }
  std::uint64_t value = 0;
  if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X')) {
    if (negative) {
      throw AsmError(AsmErrorKind::SyntaxError, line_no,
                     "negative hex literal '" + std::string(orig) + "'");
    }
    for (char c : tok.substr(2)) {
      int d;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
      else
        throw AsmError(AsmErrorKind::SyntaxError, line_no,
                       "bad hex literal '" + std::string(orig) + "'");
      value = value * 16 + static_cast<std::uint64_t>(d);
      if (value > 0xFFFFFFFFull) {
        throw AsmError(AsmErrorKind::LiteralOutOfRange, line_no,
                       "literal '" + std::string(orig) + "' does not fit in 32 bits");
      }
    }
  } else {
    if (tok.empty()) {
      throw AsmError(AsmErrorKind::SyntaxError, line_no,
                     "bad numeric literal '" + std::string(orig) + "'");
    }
    for (char c : tok) {
      if (c < '0' || c > '9') {
        throw AsmError(AsmErrorKind::SyntaxError, line_no,
                       "bad numeric literal '" + std::string(orig) + "'");
      }
      value = value * 10 + static_cast<std::uint64_t>(c - '0');
      const std::uint64_t bound = negative ? 0x80000000ull : 0xFFFFFFFFull;
      if (value > bound) {
        throw AsmError(AsmErrorKind::LiteralOutOfRange, line_no,
                       "literal '" + std::string(orig) + "' does not fit in 32 bits");
      }
    }
  }
  const std::uint32_t word = static_cast<std::uint32_t>(value);
  return negative ? static_cast<std::uint32_t>(0u - word) : word;
}

SourceLine parse_line(std::string_view raw, int line_no) {
  SourceLine out;
  out.line_no = line_no;

  std::string_view text = raw;
  if (const auto semi = text.find(';'); semi != std::string_view::npos) {
    out.comment = std::string(trim(text.substr(semi + 1)));
    text = text.substr(0, semi);
  }
  text = trim(text);
  if (text.empty()) return out;

  if (text[0] == ':') {
    const std::string_view name = text.substr(1);
    if (name.find_first_of(" \t") != std::string_view::npos) {
      throw AsmError(AsmErrorKind::SyntaxError, line_no,
                     "label definition must stand alone on its line");
    }
    if (!is_identifier(name)) {
      throw AsmError(AsmErrorKind::SyntaxError, line_no,
                     "bad label name '" + std::string(name) + "'");
    }
    out.kind = LineKind::LabelDef;
    out.label = std::string(name);
    return out;
  }

  // mnemonic [operand]
  const auto ws = text.find_first_of(" \t");
  out.kind = LineKind::Instruction;
  out.mnemonic = lowercase(text.substr(0, ws));
  if (ws == std::string_view::npos) return out;

  const std::string_view rest = trim(text.substr(ws));
  if (rest.empty()) return out;
  if (rest.find_first_of(" \t") != std::string_view::npos) {
    throw AsmError(AsmErrorKind::SyntaxError, line_no, "expected a single operand");
  }
  if (rest[0] == ':') {
    const std::string_view name = rest.substr(1);
    if (!is_identifier(name)) {
      throw AsmError(AsmErrorKind::SyntaxError, line_no,
                     "bad label reference '" + std::string(rest) + "'");
    }
    out.operand.kind = OperandKind::LabelRef;
    out.operand.label = std::string(name);
  } else {
    out.operand.kind = OperandKind::Number;
    out.operand.number = parse_literal(rest, line_no);
  }
  return out;
}

const OpcodeInfo& require_mnemonic(const SourceLine& line) {
  const OpcodeInfo* info = mnemonic_info(line.mnemonic);
  if (!info) {
    throw AsmError(AsmErrorKind::UnknownMnemonic, line.line_no,
                   "unknown mnemonic '" + line.mnemonic + "'");
  }
  return *info;
}

}  // namespace

std::vector<SourceLine> parse_source(std::string_view source) {
  std::vector<SourceLine> lines;
  int line_no = 1;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    const auto nl = source.find('\n', pos);
    const std::string_view raw =
        source.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                        : nl - pos);
    if (nl != std::string_view::npos || !raw.empty() || pos < source.size()) {
      lines.push_back(parse_line(raw, line_no));
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
    ++line_no;
  }
  return lines;
}

SymbolTable scan_labels(const std::vector<SourceLine>& lines) {
  SymbolTable symbols;
  std::map<std::string, int> defined_at;
  std::uint32_t offset = 0;
  for (const SourceLine& line : lines) {
    switch (line.kind) {
      case LineKind::Blank:
        break;
      case LineKind::LabelDef: {
        const auto [it, inserted] = defined_at.emplace(line.label, line.line_no);
        if (!inserted) {
          throw AsmError(AsmErrorKind::DuplicateLabel, line.line_no,
                         "label '" + line.label + "' already defined at line " +
                             std::to_string(it->second));
        }
        symbols[line.label] = offset;
        break;
      }
      case LineKind::Instruction:
        offset += static_cast<std::uint32_t>(encoded_length(require_mnemonic(line).op));
        break;
    }
  }
  return symbols;
}

SymbolTable scan_labels(std::string_view source) {
  return scan_labels(parse_source(source));
}

Assembly assemble_program(std::string_view source) {
  const std::vector<SourceLine> lines = parse_source(source);

  // Pass 1: label offsets. Pass 2 re-derives each instruction's offset while
  // emitting; the two must agree line for line.
  const SymbolTable symbols = scan_labels(lines);

  Assembly result;
  result.symbols = symbols;
  FlashImage& image = result.image;
  std::uint32_t expected_offset = 0;

  for (const SourceLine& line : lines) {
    if (line.kind != LineKind::Instruction) continue;
    const OpcodeInfo& info = require_mnemonic(line);

    Instruction in{info.op, std::nullopt};
    if (info.has_immediate) {
      switch (line.operand.kind) {
        case OperandKind::None:
          throw AsmError(AsmErrorKind::MissingOperand, line.line_no,
                         "'" + line.mnemonic + "' needs an operand");
        case OperandKind::Number:
          in.immediate = line.operand.number;
          break;
        case OperandKind::LabelRef: {
          if (info.cls != OpClass::ControlFlow) {
            throw AsmError(AsmErrorKind::SyntaxError, line.line_no,
                           "label operand is only valid on br_if/jump/call");
          }
          const auto it = symbols.find(line.operand.label);
          if (it == symbols.end()) {
            throw AsmError(AsmErrorKind::UndefinedLabel, line.line_no,
                           "undefined label '" + line.operand.label + "'");
          }
          in.immediate = it->second;
          break;
        }
      }
    } else if (line.operand.kind != OperandKind::None) {
      throw AsmError(AsmErrorKind::UnexpectedOperand, line.line_no,
                     "'" + line.mnemonic + "' takes no operand");
    }

    assert(image.size() == expected_offset);  // pass-1/pass-2 consistency
    encode_instruction(in, image);
    expected_offset += static_cast<std::uint32_t>(encoded_length(info.op));
    if (image.size() > kFlashAddrSpace) {
      throw AsmError(AsmErrorKind::ImageTooLarge, line.line_no,
                     "image exceeds the 24-bit flash address space");
    }
  }
  assert(image.size() == expected_offset);
  return result;
}

FlashImage assemble(std::string_view source) {
  return assemble_program(source).image;
}

}  // namespace wsm
