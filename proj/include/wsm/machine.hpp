#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wsm/devices.hpp"
#include "wsm/isa.hpp"
#include "wsm/stack.hpp"

namespace wsm {

inline constexpr std::size_t kRamBytes = 1024;

/// Control-unit states. FETCH/FETCH_WAIT_LOW/FETCH_WAIT_HIGH cover the flash
/// read of the opcode byte; FETCH_IMM loops over the four immediate bytes;
/// ALU_WAIT is the extra write-back cycle of comparison instructions;
/// UART_WAIT and KEY_WAIT stall on the serial port. HALTED and TRAPPED are
/// terminal.
enum class FsmState : std::uint8_t {
  Fetch,
  FetchWaitLow,
  FetchWaitHigh,
  Decode,
  FetchImm,
  Execute,
  AluWait,
  UartWait,
  KeyWait,
  Halted,
  Trapped,
};

enum class TrapKind : std::uint8_t {
  UnknownOpcode,
  OutOfImage,       // instruction fetch past the end of the image
  JumpOutOfImage,   // br_if/jump/call immediate beyond the image
  RamOutOfBounds,
  RamMisaligned,
  StackOverflow,    // strict mode only
  StackUnderflow,   // strict mode only
  InputExhausted,   // key with no scripted input left
};

const char* trap_name(TrapKind kind);

struct Trap {
  TrapKind kind;
  std::uint32_t pc = 0;      // address of the faulting instruction
  std::uint8_t opcode = 0;   // latched opcode byte (0 when the fetch itself faulted)
  std::uint64_t cycle = 0;
  std::string detail;
};

struct MachineConfig {
  /// Trap on stack depth over/underflow instead of wrapping silently.
  bool strict_stacks = false;
  /// Halt instead of trapping when an undefined opcode is decoded.
  bool halt_on_unknown_opcode = false;
  /// Consume UART_WAIT/KEY_WAIT in bulk. Cycle counts are identical either
  /// way; per-cycle stepping is only useful for FSM-level inspection.
  bool fast_wait = true;
};

/// CPU state plus the FSM that drives it. Owned and stepped by one execution
/// context at a time; any number of independent machines may run
/// concurrently. Devices are reached only through the Bus passed to
/// tick/step/run.
struct Machine {
  // architectural state
  std::uint32_t pc = 0;
  StackBank data;
  StackBank ret;
  std::array<std::uint8_t, kRamBytes> ram{};
  FsmState fsm = FsmState::Fetch;
  std::uint64_t cycle = 0;
  std::uint64_t retired = 0;
  std::uint32_t temp_alu = 0;  // comparison result latched in EXECUTE

  // in-flight instruction, latched by the fetch/decode sequence
  struct Pending {
    std::uint32_t instr_addr = 0;
    std::uint8_t opcode_byte = 0;
    const OpcodeInfo* info = nullptr;
    std::uint32_t imm = 0;        // immediate accumulator, filled LSB first
    unsigned imm_bytes = 0;       // immediate bytes assembled so far
    std::uint8_t flash_byte = 0;  // byte currently being fetched
    unsigned byte_cycles = 0;     // cycles spent on that byte
    std::uint8_t key_byte = 0;    // RX byte held while in KEY_WAIT
  } pending;

  std::uint64_t wait_remaining = 0;  // UART_WAIT/KEY_WAIT countdown
  std::uint64_t fetch_wait = 0;      // opcode-fetch wait countdown
  std::optional<Trap> trap;

  MachineConfig config;
  std::function<void(const std::string&)> trace_sink;  // one line per retired instruction

  bool stopped() const {
    return fsm == FsmState::Halted || fsm == FsmState::Trapped;
  }

  /// One FSM transition and one cycle tick. Wait states consume their whole
  /// remaining wait in one call when config.fast_wait is set. A fetch from
  /// outside the image moves straight to TRAPPED without burning a cycle.
  void tick(Bus& bus);

  /// Ticks until the next instruction boundary (or a halt/trap).
  void step_instruction(Bus& bus);

  /// Applies one instruction's architectural effect immediately: no fetch
  /// timing, no cycle charge; comparison write-back and I/O waits are
  /// resolved inline. For functional tests and semantic callers.
  std::optional<Trap> exec(const Instruction& in, Bus& bus);

  /// Instruction currently latched (valid from DECODE to retire).
  Instruction pending_instruction() const;

 private:
  struct ExecOutcome {
    enum class Next : std::uint8_t { Retire, AluWait, UartWait, KeyWait } next =
        Next::Retire;
    std::uint64_t wait = 0;
    std::uint8_t key_byte = 0;
  };

  ExecOutcome execute_phase(const Instruction& in, Bus& bus);
  void alu_write_phase();
  void retire();
  void raise(TrapKind kind, std::string detail);
};

enum class StopReason : std::uint8_t { CycleLimit, Breakpoint, Trap, Halted };

const char* stop_reason_name(StopReason reason);

struct RunLimits {
  std::uint64_t max_cycles = 100'000'000;
  std::vector<std::uint32_t> breakpoints;  // instruction-boundary addresses
};

struct RunOutcome {
  Machine machine;
  StopReason reason = StopReason::CycleLimit;

  const std::optional<Trap>& trap() const { return machine.trap; }
};

/// Steps `machine` until a stop condition: trap/halt, a breakpoint hit at an
/// instruction boundary, or the cycle limit. The limit is checked at
/// boundaries and inside UART_WAIT/KEY_WAIT (which are clamped to it);
/// a mid-flight instruction otherwise completes.
RunOutcome run(Machine machine, Bus& bus, const RunLimits& limits);

/// Fresh machine over bus.flash.image.
RunOutcome run(Bus& bus, const RunLimits& limits, const MachineConfig& config = {});

/// Retired instructions per second of simulated time at `clock_hz`.
/// Divide by 1e6 for MIPS. Zero cycles reports zero.
double instructions_per_second(std::uint64_t retired, std::uint64_t cycles,
                               double clock_hz);
double instructions_per_second(const RunOutcome& outcome, double clock_hz);

/// `cycle=<dec> pc=<6-hex> op=<mnemonic> imm=<8-hex or -> sp=<0-7>
/// tos=<8-hex> rsp=<0-7>`, taken after the instruction retires.
std::string trace_line(const Machine& after, std::uint32_t instr_pc,
                       const Instruction& in);

}  // namespace wsm
