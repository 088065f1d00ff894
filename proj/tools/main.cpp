// wsm - assembler, disassembler and cycle-accurate emulator for the 32-bit
// dual-stack flash-execute CPU.
//
// Usage:
//   wsm asm <source.asm> [-o out] [--format raw|hexdump]
//   wsm disasm <image.bin>
//   wsm run <image.bin> [--input script.rx] [--trace] [...]
//   wsm examples [--dir DIR]

#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wsm/cli.hpp"

namespace {

bool parse_address(const std::string& text, std::uint32_t& value) {
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(text, &used, 0);  // accepts 0x.. and decimal
    if (used != text.size() || v > 0xFFFFFF) return false;
    value = static_cast<std::uint32_t>(v);
    return true;
  } catch (...) {
    return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toolchain for the 32-bit dual-stack flash-execute CPU"};
  app.require_subcommand(1);

  // asm
  std::string asm_source, asm_output, asm_format = "raw";
  auto* asm_cmd = app.add_subcommand("asm", "assemble a source file");
  asm_cmd->add_option("source", asm_source, "assembly source file")->required();
  asm_cmd->add_option("-o,--output", asm_output, "output path");
  asm_cmd->add_option("--format", asm_format, "raw|hexdump")
      ->check(CLI::IsMember({"raw", "hexdump"}));

  // disasm
  std::string disasm_image;
  auto* disasm_cmd = app.add_subcommand("disasm", "disassemble an image");
  disasm_cmd->add_option("image", disasm_image, "flash image file")->required();

  // run
  wsm::cli::RunConfig run_config;
  std::vector<std::string> breakpoint_args;
  auto* run_cmd = app.add_subcommand("run", "execute an image");
  run_cmd->add_option("image", run_config.image_path, "flash image file")
      ->required();
  run_cmd->add_option("--input", run_config.script_path,
                      "RX script file (omit for interactive console)");
  run_cmd->add_option("--max-cycles", run_config.max_cycles, "cycle budget");
  run_cmd->add_option("--clock-hz", run_config.clock_hz, "clock frequency")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--flash-latency", run_config.flash_latency,
                      "flash cycles per byte")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--uart-divisor", run_config.uart_divisor,
                      "UART cycles per bit")
      ->check(CLI::PositiveNumber);
  run_cmd->add_flag("--strict-stacks", run_config.strict_stacks,
                    "trap on stack over/underflow");
  run_cmd->add_flag("--trace", run_config.trace,
                    "print one line per retired instruction to stderr");
  run_cmd->add_option("--break", breakpoint_args,
                      "stop at address (hex or decimal, repeatable)");

  // examples
  std::string examples_dir = ".";
  auto* examples_cmd =
      app.add_subcommand("examples", "write the bundled example programs");
  examples_cmd->add_option("--dir", examples_dir, "target directory");

  CLI11_PARSE(app, argc, argv);

  if (asm_cmd->parsed()) {
    const auto format = asm_format == "hexdump" ? wsm::cli::AsmFormat::Hexdump
                                                : wsm::cli::AsmFormat::Raw;
    return wsm::cli::cmd_asm(asm_source, asm_output, format);
  }
  if (disasm_cmd->parsed()) {
    return wsm::cli::cmd_disasm(disasm_image);
  }
  if (run_cmd->parsed()) {
    for (const std::string& arg : breakpoint_args) {
      std::uint32_t addr = 0;
      if (!parse_address(arg, addr)) {
        std::cerr << "error: bad breakpoint address '" << arg << "'\n";
        return 1;
      }
      run_config.breakpoints.push_back(addr);
    }
    return wsm::cli::cmd_run(run_config);
  }
  if (examples_cmd->parsed()) {
    return wsm::cli::cmd_examples(examples_dir);
  }
  return 0;
}
