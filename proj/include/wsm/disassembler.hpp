#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "wsm/isa.hpp"

namespace wsm {

/// Linear disassembly of a whole image. Every address targeted by
/// br_if/jump/call gets a synthetic label `L_<hex-offset>` placed at that
/// offset (possibly one past the last instruction). Reassembling the output
/// reproduces the input bytes.
///
/// Throws DecodeError: UnknownOpcode, TruncatedImmediate, or
/// TargetInsideInstruction when a branch target is not an instruction
/// boundary (the offending target offset is reported).
std::string disassemble(std::span<const std::uint8_t> image);

}  // namespace wsm
