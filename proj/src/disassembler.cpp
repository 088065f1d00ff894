#include "wsm/disassembler.hpp"

#include <cstdio>
#include <map>
#include <set>
#include <vector>

namespace wsm {

namespace {

std::string label_name(std::uint32_t offset) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "L_%x", offset);
  return buf;
}

std::string immediate_text(std::uint32_t imm) {
  char buf[16];
  if (imm < 0x10000) {
    std::snprintf(buf, sizeof(buf), "%u", imm);
  } else {
    std::snprintf(buf, sizeof(buf), "0x%x", imm);
  }
  return buf;
}

}  // namespace

std::string disassemble(std::span<const std::uint8_t> image) {
  struct Line {
    std::uint32_t offset;
    Instruction instruction;
  };

  std::vector<Line> lines;
  std::set<std::uint32_t> boundaries;
  std::uint32_t offset = 0;
  while (offset < image.size()) {
    boundaries.insert(offset);
    const DecodedInstruction d = decode_instruction(image, offset);
    lines.push_back({offset, d.instruction});
    offset = d.next_offset;
  }
  const std::uint32_t end = offset;
  boundaries.insert(end);  // a branch may legitimately target end-of-image

  std::map<std::uint32_t, std::string> labels;
  for (const Line& line : lines) {
    if (opcode_info(line.instruction.op)->cls != OpClass::ControlFlow) continue;
    if (!line.instruction.immediate) continue;  // ret
    const std::uint32_t target = *line.instruction.immediate;
    if (!boundaries.contains(target)) {
      throw DecodeError(DecodeErrorKind::TargetInsideInstruction, target,
                        target < end
                            ? "branch target " + std::to_string(target) +
                                  " falls inside an instruction"
                            : "branch target " + std::to_string(target) +
                                  " is outside the image");
    }
    labels.emplace(target, label_name(target));
  }

  std::string out;
  for (const Line& line : lines) {
    if (const auto it = labels.find(line.offset); it != labels.end()) {
      out += ":" + it->second + "\n";
    }
    out += "    ";
    out += mnemonic(line.instruction.op);
    if (line.instruction.immediate) {
      out += " ";
      if (const auto it = labels.find(*line.instruction.immediate);
          it != labels.end() &&
          opcode_info(line.instruction.op)->cls == OpClass::ControlFlow) {
        out += ":" + it->second;
      } else {
        out += immediate_text(*line.instruction.immediate);
      }
    }
    out += "\n";
  }
  if (const auto it = labels.find(end); it != labels.end()) {
    out += ":" + it->second + "\n";
  }
  return out;
}

}  // namespace wsm
