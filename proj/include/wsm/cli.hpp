#pragma once

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "wsm/devices.hpp"

namespace wsm::cli {

enum class AsmFormat : std::uint8_t { Raw, Hexdump };

struct RunConfig {
  std::string image_path;
  std::uint64_t max_cycles = 100'000'000;
  std::uint64_t clock_hz = kDefaultClockHz;
  std::uint32_t flash_latency = kDefaultFlashLatency;
  std::uint32_t uart_divisor = kDefaultUartDivisor;
  std::string script_path;  // empty selects interactive mode
  bool strict_stacks = false;
  bool trace = false;  // trace lines go to the diagnostic stream
  std::vector<std::uint32_t> breakpoints;
};

/// Assembles `source_path`. Raw format writes the image to `output_path`
/// (default: source with a .bin suffix); hexdump format writes text to
/// `output_path` or, when empty, to `out`.
int cmd_asm(const std::string& source_path, const std::string& output_path,
            AsmFormat format, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

int cmd_disasm(const std::string& image_path, std::ostream& out = std::cout,
               std::ostream& err = std::cerr);

/// Runs an image. Scripted mode feeds the RX script and writes the UART
/// output followed by a run summary to `out`; interactive mode wires the
/// console to the UART instead. Traps other than the normal end-of-script
/// stop are diagnostics.
int cmd_run(const RunConfig& config, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

/// Writes the bundled example programs (calc.asm, multidigit.asm,
/// divide.asm) into `dir`.
int cmd_examples(const std::string& dir, std::ostream& out = std::cout,
                 std::ostream& err = std::cerr);

}  // namespace wsm::cli
