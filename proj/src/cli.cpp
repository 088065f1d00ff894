#include "wsm/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wsm/assembler.hpp"
#include "wsm/disassembler.hpp"
#include "wsm/example_programs.hpp"
#include "wsm/hexdump.hpp"
#include "wsm/machine.hpp"

namespace wsm::cli {

namespace {

bool read_file(const std::string& path, std::string& contents, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot open '" << path << "'\n";
    return false;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  contents = buf.str();
  return true;
}

bool write_file(const std::string& path, std::string_view contents,
                std::ostream& err) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    err << "error: cannot write '" << path << "'\n";
    return false;
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  return out.good();
}

void print_summary(std::ostream& out, const RunOutcome& outcome,
                   std::uint64_t clock_hz) {
  const Machine& m = outcome.machine;
  const double mips =
      instructions_per_second(m.retired, m.cycle, static_cast<double>(clock_hz)) /
      1e6;
  char line[160];
  std::snprintf(line, sizeof(line), "cycles:  %llu\nretired: %llu\nmips:    %.3f\n",
                static_cast<unsigned long long>(m.cycle),
                static_cast<unsigned long long>(m.retired), mips);
  out << "-- run summary --\n" << line;
  out << "stop:    " << stop_reason_name(outcome.reason);
  if (outcome.reason == StopReason::Trap && m.trap) {
    char detail[160];
    std::snprintf(detail, sizeof(detail), " (%s) at pc=%06x op=0x%02x cycle=%llu",
                  trap_name(m.trap->kind), m.trap->pc, m.trap->opcode,
                  static_cast<unsigned long long>(m.trap->cycle));
    out << detail;
  }
  out << "\n";
}

}  // namespace

int cmd_asm(const std::string& source_path, const std::string& output_path,
            AsmFormat format, std::ostream& out, std::ostream& err) {
  std::string source;
  if (!read_file(source_path, source, err)) return 1;

  FlashImage image;
  try {
    image = assemble(source);
  } catch (const AsmError& e) {
    err << source_path << ":" << e.line << ": error: " << e.what() << "\n";
    return 1;
  }

  if (format == AsmFormat::Hexdump) {
    const std::string text = emit_hexdump(image);
    if (output_path.empty()) {
      out << text;
      return 0;
    }
    return write_file(output_path, text, err) ? 0 : 1;
  }

  std::string path = output_path;
  if (path.empty()) {
    path = std::filesystem::path(source_path).replace_extension(".bin").string();
  }
  const std::string_view bytes(reinterpret_cast<const char*>(image.data()),
                               image.size());
  if (!write_file(path, bytes, err)) return 1;
  out << "wrote " << path << " (" << image.size() << " bytes)\n";
  return 0;
}

int cmd_disasm(const std::string& image_path, std::ostream& out,
               std::ostream& err) {
  std::string contents;
  if (!read_file(image_path, contents, err)) return 1;
  const FlashImage image(contents.begin(), contents.end());
  try {
    out << disassemble(image);
  } catch (const DecodeError& e) {
    err << image_path << ": error at offset " << e.offset << ": " << e.what()
        << "\n";
    return 1;
  }
  return 0;
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::string contents;
  if (!read_file(config.image_path, contents, err)) return 1;

  Bus bus;
  bus.flash.image.assign(contents.begin(), contents.end());
  bus.flash.latency_cycles = config.flash_latency;
  bus.uart.divisor = config.uart_divisor;

  const bool interactive = config.script_path.empty();
  if (interactive) {
    bus.uart.interactive_poll = []() -> std::optional<std::uint8_t> {
      const int c = std::getchar();
      if (c == EOF) return std::nullopt;
      return static_cast<std::uint8_t>(c);
    };
    bus.uart.tx_sink = [&out](std::uint8_t byte) {
      out.put(static_cast<char>(byte));
      out.flush();
    };
  } else {
    std::string script_text;
    if (!read_file(config.script_path, script_text, err)) return 1;
    try {
      bus.uart.rx_script = parse_rx_script(script_text);
    } catch (const ScriptError& e) {
      err << config.script_path << ": error: " << e.what() << "\n";
      return 1;
    }
  }

  Machine machine;
  machine.config.strict_stacks = config.strict_stacks;
  if (config.trace) {
    machine.trace_sink = [&err](const std::string& line) { err << line << "\n"; };
  }

  RunLimits limits;
  limits.max_cycles = config.max_cycles;
  limits.breakpoints = config.breakpoints;

  const RunOutcome outcome = run(std::move(machine), bus, limits);

  if (!interactive) {
    out.write(reinterpret_cast<const char*>(bus.uart.output.data()),
              static_cast<std::streamsize>(bus.uart.output.size()));
  }
  out << "\n";
  print_summary(out, outcome, config.clock_hz);

  // Running out of scripted input is the normal end of a scripted session;
  // every other trap is a program fault.
  if (outcome.reason == StopReason::Trap &&
      outcome.trap()->kind != TrapKind::InputExhausted) {
    const Trap& t = *outcome.trap();
    char detail[160];
    std::snprintf(detail, sizeof(detail), "error: trap: %s (%s) pc=%06x op=0x%02x cycle=%llu\n",
                  trap_name(t.kind), t.detail.c_str(), t.pc, t.opcode,
                  static_cast<unsigned long long>(t.cycle));
    err << detail;
    return 1;
  }
  return 0;
}

int cmd_examples(const std::string& dir, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);

  const struct {
    const char* name;
    const char* text;
  } files[] = {
      {"calc.asm", examples::kCalcAsm},
      {"multidigit.asm", examples::kMultiDigitAsm},
      {"divide.asm", examples::kDivideAsm},
  };
  for (const auto& f : files) {
    const std::string path = (fs::path(dir) / f.name).string();
    if (!write_file(path, f.text, err)) return 1;
    out << "wrote " << path << "\n";
  }
  return 0;
}

}  // namespace wsm::cli
