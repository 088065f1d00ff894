#include "wsm/machine.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>

namespace wsm {

namespace {

std::uint32_t read_le32(const std::array<std::uint8_t, kRamBytes>& ram,
                        std::uint32_t addr) {
  return static_cast<std::uint32_t>(ram[addr]) |
         (static_cast<std::uint32_t>(ram[addr + 1]) << 8) |
         (static_cast<std::uint32_t>(ram[addr + 2]) << 16) |
         (static_cast<std::uint32_t>(ram[addr + 3]) << 24);
}

void write_le32(std::array<std::uint8_t, kRamBytes>& ram, std::uint32_t addr,
                std::uint32_t value) {
  ram[addr] = static_cast<std::uint8_t>(value & 0xFF);
  ram[addr + 1] = static_cast<std::uint8_t>((value >> 8) & 0xFF);
  ram[addr + 2] = static_cast<std::uint8_t>((value >> 16) & 0xFF);
  ram[addr + 3] = static_cast<std::uint8_t>((value >> 24) & 0xFF);
}

std::uint32_t compare_result(Opcode op, std::uint32_t a, std::uint32_t b) {
  switch (op) {
    case Opcode::Eq: return a == b ? 1 : 0;
    case Opcode::LtS:
      return static_cast<std::int32_t>(a) < static_cast<std::int32_t>(b) ? 1 : 0;
    case Opcode::GtS:
      return static_cast<std::int32_t>(a) > static_cast<std::int32_t>(b) ? 1 : 0;
    default: return 0;
  }
}

}  // namespace

const char* trap_name(TrapKind kind) {
  switch (kind) {
    case TrapKind::UnknownOpcode: return "unknown opcode";
    case TrapKind::OutOfImage: return "fetch out of image";
    case TrapKind::JumpOutOfImage: return "jump out of image";
    case TrapKind::RamOutOfBounds: return "ram access out of bounds";
    case TrapKind::RamMisaligned: return "ram access misaligned";
    case TrapKind::StackOverflow: return "stack overflow";
    case TrapKind::StackUnderflow: return "stack underflow";
    case TrapKind::InputExhausted: return "input exhausted";
  }
  return "?";
}

const char* stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::CycleLimit: return "cycle-limit";
    case StopReason::Breakpoint: return "breakpoint";
    case StopReason::Trap: return "trap";
    case StopReason::Halted: return "halted";
  }
  return "?";
}

Instruction Machine::pending_instruction() const {
  assert(pending.info != nullptr);
  return pending.info->has_immediate ? instr(pending.info->op, pending.imm)
                                     : instr(pending.info->op);
}

void Machine::raise(TrapKind kind, std::string detail) {
  trap = Trap{kind, pending.instr_addr, pending.opcode_byte, cycle, std::move(detail)};
  fsm = FsmState::Trapped;
}

void Machine::retire() {
  ++retired;
  if (trace_sink) {
    trace_sink(trace_line(*this, pending.instr_addr, pending_instruction()));
  }
  fsm = FsmState::Fetch;
}

void Machine::tick(Bus& bus) {
  switch (fsm) {
    case FsmState::Fetch: {
      const auto fetched = bus.flash.fetch(pc);
      if (!fetched) {
        pending.instr_addr = pc;
        pending.opcode_byte = 0;
        char buf[48];
        std::snprintf(buf, sizeof(buf), "pc 0x%06x is beyond the image", pc);
        raise(TrapKind::OutOfImage, buf);
        return;  // the faulting fetch never completes, so no cycle is charged
      }
      ++cycle;
      pending = Pending{};
      pending.instr_addr = pc;
      pending.opcode_byte = fetched->byte;
      ++pc;
      fetch_wait = fetched->latency > 0 ? fetched->latency - 1 : 0;
      fsm = fetch_wait == 0 ? FsmState::Decode : FsmState::FetchWaitLow;
      break;
    }

    case FsmState::FetchWaitLow:
      ++cycle;
      fsm = --fetch_wait == 0 ? FsmState::Decode : FsmState::FetchWaitHigh;
      break;

    case FsmState::FetchWaitHigh:
      ++cycle;
      if (--fetch_wait == 0) fsm = FsmState::Decode;  // holds for latency > 3
      break;

    case FsmState::Decode: {
      ++cycle;
      const OpcodeInfo* info = opcode_info(pending.opcode_byte);
      if (!info) {
        if (config.halt_on_unknown_opcode) {
          fsm = FsmState::Halted;
        } else {
          char buf[48];
          std::snprintf(buf, sizeof(buf), "opcode byte 0x%02x at 0x%06x",
                        pending.opcode_byte, pending.instr_addr);
          raise(TrapKind::UnknownOpcode, buf);
        }
        return;
      }
      pending.info = info;
      pending.imm = 0;
      pending.imm_bytes = 0;
      pending.byte_cycles = 0;
      fsm = info->has_immediate ? FsmState::FetchImm : FsmState::Execute;
      break;
    }

    case FsmState::FetchImm: {
      // Four flash reads, each at the full per-byte latency.
      if (pending.byte_cycles == 0) {
        const auto fetched = bus.flash.fetch(pc);
        if (!fetched) {
          raise(TrapKind::OutOfImage, "immediate runs past the end of the image");
          return;
        }
        pending.flash_byte = fetched->byte;
      }
      ++cycle;
      if (++pending.byte_cycles >= bus.flash.latency_cycles) {
        pending.imm |= static_cast<std::uint32_t>(pending.flash_byte)
                       << (8 * pending.imm_bytes);
        ++pending.imm_bytes;
        ++pc;
        pending.byte_cycles = 0;
        if (pending.imm_bytes == 4) fsm = FsmState::Execute;
      }
      break;
    }

    case FsmState::Execute: {
      ++cycle;
      const ExecOutcome out = execute_phase(pending_instruction(), bus);
      if (fsm == FsmState::Trapped) return;
      switch (out.next) {
        case ExecOutcome::Next::Retire:
          retire();
          break;
        case ExecOutcome::Next::AluWait:
          fsm = FsmState::AluWait;
          break;
        case ExecOutcome::Next::UartWait:
          wait_remaining = out.wait;
          fsm = FsmState::UartWait;
          break;
        case ExecOutcome::Next::KeyWait:
          wait_remaining = out.wait;
          pending.key_byte = out.key_byte;
          fsm = FsmState::KeyWait;
          break;
      }
      break;
    }

    case FsmState::AluWait:
      // The stack pointer settled last cycle; write the latched result.
      ++cycle;
      alu_write_phase();
      retire();
      break;

    case FsmState::UartWait: {
      const std::uint64_t n = config.fast_wait ? wait_remaining : 1;
      cycle += n;
      wait_remaining -= n;
      if (wait_remaining == 0) retire();
      break;
    }

    case FsmState::KeyWait: {
      const std::uint64_t n = config.fast_wait ? wait_remaining : 1;
      cycle += n;
      wait_remaining -= n;
      if (wait_remaining == 0) {
        data.push(pending.key_byte);  // zero-extended
        retire();
      }
      break;
    }

    case FsmState::Halted:
    case FsmState::Trapped:
      break;
  }
}

void Machine::step_instruction(Bus& bus) {
  const std::uint64_t before = retired;
  while (!stopped() && retired == before) {
    tick(bus);
  }
}

void Machine::alu_write_phase() {
  data.slots[data.sp] = temp_alu;
  ++data.depth;
}

Machine::ExecOutcome Machine::execute_phase(const Instruction& in, Bus& bus) {
  const auto underflow = [&](const StackBank& bank, std::int64_t need) {
    return config.strict_stacks && bank.depth < need;
  };
  const auto full = [&](const StackBank& bank) {
    return config.strict_stacks && bank.depth >= static_cast<std::int64_t>(StackBank::kSlots);
  };
  const auto jump_to = [&](std::uint32_t target) {
    if (target >= bus.flash.image.size()) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "target 0x%06x, image size %zu", target,
                    bus.flash.image.size());
      raise(TrapKind::JumpOutOfImage, buf);
      return false;
    }
    pc = target;
    return true;
  };

  switch (in.op) {
    case Opcode::Push:
      if (full(data)) { raise(TrapKind::StackOverflow, "data stack"); break; }
      data.push(*in.immediate);
      break;

    case Opcode::Drop:
      if (underflow(data, 1)) { raise(TrapKind::StackUnderflow, "data stack"); break; }
      data.pop();
      break;

    case Opcode::Dup: {
      if (underflow(data, 1)) { raise(TrapKind::StackUnderflow, "data stack"); break; }
      if (full(data)) { raise(TrapKind::StackOverflow, "data stack"); break; }
      data.push(data.top());
      break;
    }

    case Opcode::Swap: {
      if (underflow(data, 2)) { raise(TrapKind::StackUnderflow, "data stack"); break; }
      std::swap(data.slots[data.sp],
                data.slots[(data.sp + StackBank::kSlots - 1) % StackBank::kSlots]);
      break;
    }

    case Opcode::Over: {
      if (underflow(data, 2)) { raise(TrapKind::StackUnderflow, "data stack"); break; }
      if (full(data)) { raise(TrapKind::StackOverflow, "data stack"); break; }
      data.push(data.peek(1));
      break;
    }

    case Opcode::Add:
    case Opcode::Sub:
    case Opcode::Mul:
    case Opcode::And:
    case Opcode::Or: {
      if (underflow(data, 2)) { raise(TrapKind::StackUnderflow, "data stack"); break; }
      const std::uint32_t b = data.pop();
      const std::uint32_t a = data.pop();
      std::uint32_t r = 0;
      switch (in.op) {
        case Opcode::Add: r = a + b; break;
        case Opcode::Sub: r = a - b; break;
        case Opcode::Mul: r = a * b; break;
        case Opcode::And: r = a & b; break;
        case Opcode::Or: r = a | b; break;
        default: break;
      }
      data.push(r);
      break;
    }

    case Opcode::Not:
      // In-place overwrite: no pointer movement, so no write hazard and no
      // ALU_WAIT trip.
      if (underflow(data, 1)) { raise(TrapKind::StackUnderflow, "data stack"); break; }
      data.slots[data.sp] = ~data.slots[data.sp];
      break;

    case Opcode::Eq:
    case Opcode::LtS:
    case Opcode::GtS: {
      // Two-phase write: latch the result and move the pointer now, write
      // the result in ALU_WAIT once the pointer has settled.
      if (underflow(data, 2)) { raise(TrapKind::StackUnderflow, "data stack"); break; }
      const std::uint32_t b = data.slots[data.sp];
      const std::uint32_t a =
          data.slots[(data.sp + StackBank::kSlots - 1) % StackBank::kSlots];
      temp_alu = compare_result(in.op, a, b);
      data.sp = static_cast<std::uint8_t>((data.sp + StackBank::kSlots - 1) %
                                          StackBank::kSlots);
      data.depth -= 2;
      return {ExecOutcome::Next::AluWait};
    }

    case Opcode::Eqz:
      if (underflow(data, 1)) { raise(TrapKind::StackUnderflow, "data stack"); break; }
      temp_alu = data.slots[data.sp] == 0 ? 1 : 0;
      --data.depth;  // pointer stays put: one pop, one push
      return {ExecOutcome::Next::AluWait};

    case Opcode::BrIf: {
      if (underflow(data, 1)) { raise(TrapKind::StackUnderflow, "data stack"); break; }
      const std::uint32_t cond = data.pop();
      if (cond != 0) jump_to(*in.immediate);
      break;
    }

    case Opcode::Jump:
      jump_to(*in.immediate);
      break;

    case Opcode::Call:
      if (full(ret)) { raise(TrapKind::StackOverflow, "return stack"); break; }
      // pc already points at the byte after this 5-byte instruction.
      ret.push(pc);
      jump_to(*in.immediate);
      break;

    case Opcode::Ret:
      if (underflow(ret, 1)) { raise(TrapKind::StackUnderflow, "return stack"); break; }
      pc = ret.pop();  // a bogus address faults at the next fetch
      break;

    case Opcode::Load: {
      if (underflow(data, 1)) { raise(TrapKind::StackUnderflow, "data stack"); break; }
      const std::uint32_t addr = data.pop();
      if (static_cast<std::uint64_t>(addr) + 3 >= kRamBytes) {
        raise(TrapKind::RamOutOfBounds, "load addr " + std::to_string(addr));
        break;
      }
      if (addr % 4 != 0) {
        raise(TrapKind::RamMisaligned, "load addr " + std::to_string(addr));
        break;
      }
      data.push(read_le32(ram, addr));
      break;
    }

    case Opcode::Store: {
      if (underflow(data, 2)) { raise(TrapKind::StackUnderflow, "data stack"); break; }
      const std::uint32_t addr = data.pop();
      const std::uint32_t value = data.pop();
      if (static_cast<std::uint64_t>(addr) + 3 >= kRamBytes) {
        raise(TrapKind::RamOutOfBounds, "store addr " + std::to_string(addr));
        break;
      }
      if (addr % 4 != 0) {
        raise(TrapKind::RamMisaligned, "store addr " + std::to_string(addr));
        break;
      }
      write_le32(ram, addr, value);
      break;
    }

    case Opcode::Print: {
      if (underflow(data, 1)) { raise(TrapKind::StackUnderflow, "data stack"); break; }
      const std::uint8_t byte = static_cast<std::uint8_t>(data.pop() & 0xFF);
      const std::uint64_t stall = bus.uart.tx(byte, cycle);
      if (stall > 0) return {ExecOutcome::Next::UartWait, stall};
      break;
    }

    case Opcode::Key: {
      if (full(data)) { raise(TrapKind::StackOverflow, "data stack"); break; }
      const auto rx = bus.uart.rx_next(cycle);
      if (!rx) {
        raise(TrapKind::InputExhausted, "input exhausted");
        break;
      }
      if (rx->wait > 0) return {ExecOutcome::Next::KeyWait, rx->wait, rx->byte};
      data.push(rx->byte);  // zero-extended
      break;
    }
  }
  return {};
}

std::optional<Trap> Machine::exec(const Instruction& in, Bus& bus) {
  assert(in.immediate.has_value() == has_immediate(in.op));
  pending.instr_addr = pc;
  pending.opcode_byte = static_cast<std::uint8_t>(in.op);
  pending.info = opcode_info(in.op);
  pending.imm = in.immediate.value_or(0);

  const ExecOutcome out = execute_phase(in, bus);
  if (fsm == FsmState::Trapped) return trap;
  switch (out.next) {
    case ExecOutcome::Next::Retire:
    case ExecOutcome::Next::UartWait:  // byte already latched
      break;
    case ExecOutcome::Next::AluWait:
      alu_write_phase();
      break;
    case ExecOutcome::Next::KeyWait:
      data.push(out.key_byte);
      break;
  }
  return std::nullopt;
}

RunOutcome run(Machine machine, Bus& bus, const RunLimits& limits) {
  for (;;) {
    if (machine.fsm == FsmState::Trapped) {
      return {std::move(machine), StopReason::Trap};
    }
    if (machine.fsm == FsmState::Halted) {
      return {std::move(machine), StopReason::Halted};
    }
    if (machine.fsm == FsmState::Fetch) {
      if (machine.cycle >= limits.max_cycles) {
        return {std::move(machine), StopReason::CycleLimit};
      }
      if (std::find(limits.breakpoints.begin(), limits.breakpoints.end(),
                    machine.pc) != limits.breakpoints.end()) {
        return {std::move(machine), StopReason::Breakpoint};
      }
    }
    if ((machine.fsm == FsmState::UartWait || machine.fsm == FsmState::KeyWait) &&
        (machine.cycle >= limits.max_cycles ||
         machine.wait_remaining > limits.max_cycles - machine.cycle)) {
      // Clamp the wait to the budget and stop mid-instruction.
      const std::uint64_t take =
          limits.max_cycles > machine.cycle ? limits.max_cycles - machine.cycle : 0;
      machine.cycle += take;
      machine.wait_remaining -= take;
      return {std::move(machine), StopReason::CycleLimit};
    }
    machine.tick(bus);
  }
}

RunOutcome run(Bus& bus, const RunLimits& limits, const MachineConfig& config) {
  Machine machine;
  machine.config = config;
  return run(std::move(machine), bus, limits);
}

double instructions_per_second(std::uint64_t retired, std::uint64_t cycles,
                               double clock_hz) {
  if (cycles == 0) return 0.0;
  const double seconds = static_cast<double>(cycles) / clock_hz;
  return static_cast<double>(retired) / seconds;
}

double instructions_per_second(const RunOutcome& outcome, double clock_hz) {
  return instructions_per_second(outcome.machine.retired, outcome.machine.cycle,
                                 clock_hz);
}

std::string trace_line(const Machine& after, std::uint32_t instr_pc,
                       const Instruction& in) {
  char imm_field[16];
  if (in.immediate) {
    std::snprintf(imm_field, sizeof(imm_field), "%08x", *in.immediate);
  } else {
    std::snprintf(imm_field, sizeof(imm_field), "-");
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "cycle=%llu pc=%06x op=%s imm=%s sp=%u tos=%08x rsp=%u",
                static_cast<unsigned long long>(after.cycle), instr_pc,
                opcode_info(in.op)->mnemonic, imm_field, after.data.sp,
                after.data.top(), after.ret.sp);
  return buf;
}

}  // namespace wsm
