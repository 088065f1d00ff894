#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>
#include <vector>

#include "doctest.h"
#include "golden.hpp"
#include "wsm/assembler.hpp"
#include "wsm/example_programs.hpp"
#include "wsm/hexdump.hpp"
#include "wsm/machine.hpp"

using namespace wsm;

namespace {

Bus make_bus(FlashImage image, std::vector<RxEntry> script = {}) {
  Bus bus;
  bus.flash.image = std::move(image);
  bus.uart.rx_script = std::move(script);
  return bus;
}

// Data stack preloaded bottom-to-top.
Machine with_stack(std::initializer_list<std::uint32_t> values) {
  Machine m;
  for (const std::uint32_t v : values) m.data.push(v);
  return m;
}

std::string uart_text(const Bus& bus) {
  return std::string(bus.uart.output.begin(), bus.uart.output.end());
}

}  // namespace

TEST_CASE("stack: push and pop move the pointer as in the reference figure") {
  StackBank bank;
  bank.push(5);
  bank.push(10);
  CHECK(bank.sp == 1);
  bank.push(3);
  CHECK(bank.sp == 2);
  CHECK(bank.top() == 3);
  CHECK(bank.pop() == 3);
  CHECK(bank.pop() == 10);
  CHECK(bank.top() == 5);
}

TEST_CASE("stack: pointer wraps modulo 8 in both directions") {
  StackBank bank;
  bank.sp = 7;
  bank.push(42);
  CHECK(bank.sp == 0);
  CHECK(bank.slots[0] == 42);
  CHECK(bank.pop() == 42);
  CHECK(bank.sp == 7);
}

TEST_CASE("stack: depth keeps counting through wraparound") {
  StackBank bank;
  for (int i = 0; i < 10; ++i) bank.push(static_cast<std::uint32_t>(i));
  CHECK(bank.depth == 10);
  // the 8 most recent survive, newest first
  for (int i = 9; i >= 2; --i) CHECK(bank.pop() == static_cast<std::uint32_t>(i));
}

TEST_CASE("exec: arithmetic stack effects") {
  Bus bus = make_bus({});

  Machine sub = with_stack({10, 3});
  CHECK(!sub.exec(instr(Opcode::Sub), bus));
  CHECK(sub.data.top() == 7);
  CHECK(sub.data.depth == 1);

  Machine wrap = with_stack({0xFFFFFFFF, 1});
  CHECK(!wrap.exec(instr(Opcode::Add), bus));
  CHECK(wrap.data.top() == 0);

  Machine mul = with_stack({0x10000, 0x10000});
  CHECK(!mul.exec(instr(Opcode::Mul), bus));
  CHECK(mul.data.top() == 0);  // modulo 2^32

  Machine bits = with_stack({0xF0F0, 0x00FF});
  CHECK(!bits.exec(instr(Opcode::And), bus));
  CHECK(bits.data.top() == 0x00F0);

  Machine orv = with_stack({0xF000, 0x000F});
  CHECK(!orv.exec(instr(Opcode::Or), bus));
  CHECK(orv.data.top() == 0xF00F);

  Machine inv = with_stack({0});
  CHECK(!inv.exec(instr(Opcode::Not), bus));
  CHECK(inv.data.top() == 0xFFFFFFFF);
}

TEST_CASE("exec: stack manipulation") {
  Bus bus = make_bus({});

  Machine m = with_stack({1, 2});
  CHECK(!m.exec(instr(Opcode::Swap), bus));
  CHECK(m.data.peek(0) == 1);
  CHECK(m.data.peek(1) == 2);
  CHECK(!m.exec(instr(Opcode::Swap), bus));
  CHECK(m.data.peek(0) == 2);
  CHECK(m.data.peek(1) == 1);

  CHECK(!m.exec(instr(Opcode::Over), bus));
  CHECK(m.data.peek(0) == 1);
  CHECK(m.data.depth == 3);

  CHECK(!m.exec(instr(Opcode::Dup), bus));
  CHECK(m.data.peek(0) == 1);
  CHECK(m.data.peek(1) == 1);

  CHECK(!m.exec(instr(Opcode::Drop), bus));
  CHECK(m.data.depth == 3);

  Machine p;
  CHECK(!p.exec(instr(Opcode::Push, 0xdeadbeef), bus));
  CHECK(p.data.top() == 0xdeadbeef);
  CHECK(p.data.sp == 0);
}

TEST_CASE("exec: comparisons return 1 or 0") {
  Bus bus = make_bus({});

  Machine eq = with_stack({5, 5});
  CHECK(!eq.exec(instr(Opcode::Eq), bus));
  CHECK(eq.data.top() == 1);
  CHECK(eq.data.depth == 1);

  Machine ne = with_stack({5, 6});
  CHECK(!ne.exec(instr(Opcode::Eq), bus));
  CHECK(ne.data.top() == 0);

  Machine lt = with_stack({0xFFFFFFFF, 1});  // -1 < 1 signed
  CHECK(!lt.exec(instr(Opcode::LtS), bus));
  CHECK(lt.data.top() == 1);

  Machine gt = with_stack({1, 0xFFFFFFFF});  // 1 > -1 signed
  CHECK(!gt.exec(instr(Opcode::GtS), bus));
  CHECK(gt.data.top() == 1);

  Machine z = with_stack({0});
  CHECK(!z.exec(instr(Opcode::Eqz), bus));
  CHECK(z.data.top() == 1);
  CHECK(z.data.depth == 1);

  Machine nz = with_stack({7});
  CHECK(!nz.exec(instr(Opcode::Eqz), bus));
  CHECK(nz.data.top() == 0);
}

TEST_CASE("exec: lt_s and gt_s agree with a reference signed comparison") {
  // exhaustive over sign-extended 8-bit operand pairs
  Bus bus = make_bus({});
  for (int a = -128; a < 128; ++a) {
    for (int b = -128; b < 128; ++b) {
      const auto ua = static_cast<std::uint32_t>(a);
      const auto ub = static_cast<std::uint32_t>(b);

      Machine lt = with_stack({ua, ub});
      CHECK(!lt.exec(instr(Opcode::LtS), bus));
      CHECK(lt.data.top() == (a < b ? 1u : 0u));

      Machine gt = with_stack({ua, ub});
      CHECK(!gt.exec(instr(Opcode::GtS), bus));
      CHECK(gt.data.top() == (a > b ? 1u : 0u));
    }
  }
}

TEST_CASE("exec: control flow") {
  Bus bus = make_bus(FlashImage(64, 0x05));

  Machine taken = with_stack({1});
  CHECK(!taken.exec(instr(Opcode::BrIf, 0x20), bus));
  CHECK(taken.pc == 0x20);
  CHECK(taken.data.depth == 0);

  Machine untaken = with_stack({0});
  untaken.pc = 7;
  CHECK(!untaken.exec(instr(Opcode::BrIf, 0x20), bus));
  CHECK(untaken.pc == 7);

  Machine jump;
  CHECK(!jump.exec(instr(Opcode::Jump, 0x3F), bus));
  CHECK(jump.pc == 0x3F);

  Machine call;
  call.pc = 5;  // as if the call instruction spanned bytes 0..4
  CHECK(!call.exec(instr(Opcode::Call, 0x10), bus));
  CHECK(call.pc == 0x10);
  CHECK(call.ret.top() == 5);
  CHECK(call.ret.depth == 1);

  CHECK(!call.exec(instr(Opcode::Ret), bus));
  CHECK(call.pc == 5);
  CHECK(call.ret.depth == 0);
}

TEST_CASE("exec: jump beyond the image traps") {
  Bus bus = make_bus(FlashImage(16, 0x05));
  Machine m;
  const auto trap = m.exec(instr(Opcode::Jump, 16), bus);  // == image size
  REQUIRE(trap.has_value());
  CHECK(trap->kind == TrapKind::JumpOutOfImage);

  Machine untaken = with_stack({0});
  CHECK(!untaken.exec(instr(Opcode::BrIf, 9999), bus));  // not taken, no trap
}

TEST_CASE("exec: ram is little-endian, word-aligned, 1 KB") {
  Bus bus = make_bus({});

  Machine m = with_stack({0x12345678, 8});
  CHECK(!m.exec(instr(Opcode::Store), bus));
  CHECK(m.ram[8] == 0x78);
  CHECK(m.ram[9] == 0x56);
  CHECK(m.ram[10] == 0x34);
  CHECK(m.ram[11] == 0x12);

  m.data.push(8);
  CHECK(!m.exec(instr(Opcode::Load), bus));
  CHECK(m.data.top() == 0x12345678);

  Machine last = with_stack({0xAABBCCDD, 1020});
  CHECK(!last.exec(instr(Opcode::Store), bus));  // highest legal word

  Machine oob = with_stack({1, 1024});
  const auto trap = oob.exec(instr(Opcode::Store), bus);
  REQUIRE(trap.has_value());
  CHECK(trap->kind == TrapKind::RamOutOfBounds);

  Machine near = with_stack({1021});
  const auto trap2 = near.exec(instr(Opcode::Load), bus);
  REQUIRE(trap2.has_value());
  CHECK(trap2->kind == TrapKind::RamOutOfBounds);

  Machine misaligned = with_stack({2});
  const auto trap3 = misaligned.exec(instr(Opcode::Load), bus);
  REQUIRE(trap3.has_value());
  CHECK(trap3->kind == TrapKind::RamMisaligned);
}

TEST_CASE("exec: print sends the low byte, key zero-extends") {
  Bus bus = make_bus({}, {{0, 0xF3}});
  Machine m = with_stack({0x1234ABCD});
  CHECK(!m.exec(instr(Opcode::Print), bus));
  CHECK(bus.uart.output == std::vector<std::uint8_t>{0xCD});

  CHECK(!m.exec(instr(Opcode::Key), bus));
  CHECK(m.data.top() == 0xF3);
}

TEST_CASE("strict mode: overflow and underflow trap, faithful mode wraps") {
  Bus bus = make_bus({});

  Machine strict;
  strict.config.strict_stacks = true;
  for (int i = 0; i < 8; ++i) {
    CHECK(!strict.exec(instr(Opcode::Push, 1), bus));
  }
  const auto trap = strict.exec(instr(Opcode::Push, 9), bus);
  REQUIRE(trap.has_value());
  CHECK(trap->kind == TrapKind::StackOverflow);

  Machine empty;
  empty.config.strict_stacks = true;
  const auto trap2 = empty.exec(instr(Opcode::Drop), bus);
  REQUIRE(trap2.has_value());
  CHECK(trap2->kind == TrapKind::StackUnderflow);

  Machine retless;
  retless.config.strict_stacks = true;
  const auto trap3 = retless.exec(instr(Opcode::Ret), bus);
  REQUIRE(trap3.has_value());
  CHECK(trap3->kind == TrapKind::StackUnderflow);

  Machine shallow = with_stack({1});
  shallow.config.strict_stacks = true;
  shallow.data.depth = 1;
  const auto trap4 = shallow.exec(instr(Opcode::Eq), bus);
  REQUIRE(trap4.has_value());
  CHECK(trap4->kind == TrapKind::StackUnderflow);

  Machine deep_calls;
  deep_calls.config.strict_stacks = true;
  Bus image_bus = make_bus(FlashImage(64, 0x05));
  for (int i = 0; i < 8; ++i) {
    CHECK(!deep_calls.exec(instr(Opcode::Call, 0), image_bus));
  }
  const auto trap5 = deep_calls.exec(instr(Opcode::Call, 0), image_bus);
  REQUIRE(trap5.has_value());
  CHECK(trap5->kind == TrapKind::StackOverflow);

  Machine faithful;
  for (int i = 0; i < 9; ++i) {
    CHECK(!faithful.exec(instr(Opcode::Push, static_cast<std::uint32_t>(i)), bus));
  }
  CHECK(faithful.data.top() == 8);  // slot 0 was overwritten, no trap
}

TEST_CASE("cycles: 5 for single-byte ops, 17 with an immediate, 6 for comparisons") {
  const FlashImage image = assemble(
      "push 1\n"    // 17
      "push 2\n"    // 17
      "add\n"       // 5
      "dup\n"       // 5
      "eqz\n"       // 6
      "push 3\n"    // 17
      "eq\n"        // 6
      "push 0\n"    // 17
      "push 1\n"    // 17
      "lt_s\n"      // 6
      "push 5\n"    // 17
      "gt_s\n"      // 6
      "drop\n");    // 5
  const std::vector<std::uint64_t> expected{17, 17, 5, 5, 6, 17, 6, 17, 17, 6, 17, 6, 5};

  Bus bus = make_bus(image);
  Machine m;
  std::uint64_t previous = 0;
  for (const std::uint64_t want : expected) {
    m.step_instruction(bus);
    CHECK(m.cycle - previous == want);
    previous = m.cycle;
  }
  CHECK(m.retired == expected.size());
}

TEST_CASE("cycles: flash latency scales the fetch cost") {
  const FlashImage image = assemble("dup\npush 1\neqz");
  Bus bus = make_bus(image);
  bus.flash.latency_cycles = 5;  // simple op: 5 + (5-3) = 7

  Machine m;
  m.step_instruction(bus);
  CHECK(m.cycle == 7);
  m.step_instruction(bus);
  CHECK(m.cycle == 7 + 27);  // 5*5 fetch cycles + decode + execute
  m.step_instruction(bus);
  CHECK(m.cycle == 7 + 27 + 8);

  Bus fast = make_bus(image);
  fast.flash.latency_cycles = 1;
  Machine quick;
  quick.step_instruction(fast);
  CHECK(quick.cycle == 3);  // fetch + decode + execute
}

TEST_CASE("two-phase comparison: pointer first, latched write one cycle later") {
  const FlashImage image = assemble("eq");
  Bus bus = make_bus(image);
  Machine m = with_stack({9, 9});

  // fetch(3) + decode
  for (int i = 0; i < 4; ++i) m.tick(bus);
  CHECK(m.fsm == FsmState::Execute);
  const std::uint8_t sp_before = m.data.sp;

  m.tick(bus);  // EXECUTE: latch + pointer move, result not visible yet
  CHECK(m.fsm == FsmState::AluWait);
  CHECK(m.temp_alu == 1);
  CHECK(m.data.sp == static_cast<std::uint8_t>((sp_before + 7) % 8));
  CHECK(m.data.top() == 9);  // still the old slot contents

  m.tick(bus);  // ALU_WAIT: write temp_alu
  CHECK(m.data.top() == 1);
  CHECK(m.retired == 1);
  CHECK(m.cycle == 6);
}

TEST_CASE("trace: first calculator instruction") {
  const FlashImage image = assemble(examples::kCalcAsm);
  Bus bus = make_bus(image);
  Machine m;
  std::vector<std::string> lines;
  m.trace_sink = [&](const std::string& line) { lines.push_back(line); };

  m.step_instruction(bus);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0] == "cycle=17 pc=000000 op=push imm=0000003e sp=0 tos=0000003e rsp=7");

  m.step_instruction(bus);  // print
  REQUIRE(lines.size() == 2);
  CHECK(lines[1].find("op=print imm=- ") != std::string::npos);
}

TEST_CASE("run: zero cycle budget stops immediately") {
  Bus bus = make_bus(assemble("push 1"));
  const RunOutcome outcome = run(bus, {.max_cycles = 0, .breakpoints = {}});
  CHECK(outcome.reason == StopReason::CycleLimit);
  CHECK(outcome.machine.retired == 0);
  CHECK(outcome.machine.cycle == 0);
}

TEST_CASE("run: breakpoint on the taken branch target") {
  Bus bus = make_bus(assemble(examples::kCalcAsm),
                     rx_script_from_text("1+1"));
  RunLimits limits;
  limits.breakpoints = {golden::kCalcAddOffset};
  const RunOutcome outcome = run(bus, limits);
  CHECK(outcome.reason == StopReason::Breakpoint);
  CHECK(outcome.machine.pc == golden::kCalcAddOffset);
}

TEST_CASE("run: calculator sessions") {
  const FlashImage image = assemble(examples::kCalcAsm);

  const struct {
    const char* input;
    const char* expected;
  } sessions[] = {
      {"3+4", "> 3+4\r\n7\r\n> "},
      {"8-3", "> 8-3\r\n5\r\n> "},
      {"2*3", "> 2*3\r\n6\r\n> "},
  };
  for (const auto& s : sessions) {
    Bus bus = make_bus(image, rx_script_from_text(s.input));
    const RunOutcome outcome = run(bus, {});
    CHECK(uart_text(bus) == s.expected);
    CHECK(outcome.reason == StopReason::Trap);
    REQUIRE(outcome.trap().has_value());
    CHECK(outcome.trap()->kind == TrapKind::InputExhausted);
  }
}

TEST_CASE("run: unknown operator drops the input and re-prompts") {
  Bus bus = make_bus(assemble(examples::kCalcAsm), rx_script_from_text("3%4"));
  run(bus, {});
  CHECK(uart_text(bus) == "> 3%4\r\n> ");
}

TEST_CASE("run: key waits for the scripted timestamp") {
  const FlashImage image = assemble("key");
  Bus bus = make_bus(image, {{1000, 'x'}});
  Machine m;
  m.step_instruction(bus);
  // execute ends at cycle 5; the byte arrives at 1000, so retire then
  CHECK(m.cycle == 1000);
  CHECK(m.data.top() == 'x');
  CHECK(m.retired == 1);
}

TEST_CASE("run: print stalls only while the previous frame is shifting") {
  const FlashImage image = assemble("push 65\nprint\npush 66\nprint");
  Bus bus = make_bus(image);
  Machine m;
  m.step_instruction(bus);  // push
  m.step_instruction(bus);  // print, idle: 5 cycles
  CHECK(m.cycle == 17 + 5);
  m.step_instruction(bus);  // push
  m.step_instruction(bus);  // print, stalls for the rest of frame one
  // frame one busy until 22+2340; second print's execute lands at 44
  CHECK(m.cycle == 22 + 2340 + 0);
  CHECK(uart_text(bus) == "AB");
}

TEST_CASE("run: fast-wait and per-cycle wait agree on every count") {
  const FlashImage image = assemble("push 65\nprint\npush 66\nprint\nkey");
  for (const bool fast : {true, false}) {
    Bus bus = make_bus(image, {{4000, 'z'}});
    MachineConfig config;
    config.fast_wait = fast;
    const RunOutcome outcome = run(bus, {}, config);
    CHECK(outcome.machine.cycle == 4000);  // key retires when 'z' arrives
    CHECK(outcome.machine.retired == 5);
    CHECK(uart_text(bus) == "AB");
  }
}

TEST_CASE("run: running off the end of the image is a fetch trap") {
  Bus bus = make_bus(assemble("dup\ndup"));
  const RunOutcome outcome = run(bus, {});
  CHECK(outcome.reason == StopReason::Trap);
  CHECK(outcome.trap()->kind == TrapKind::OutOfImage);
  CHECK(outcome.machine.retired == 2);
  CHECK(outcome.machine.cycle == 10);  // the faulting fetch is not charged
}

TEST_CASE("run: unknown opcode traps, or halts when configured") {
  Bus bus = make_bus(FlashImage{0xAA});
  const RunOutcome outcome = run(bus, {});
  CHECK(outcome.reason == StopReason::Trap);
  CHECK(outcome.trap()->kind == TrapKind::UnknownOpcode);

  Bus bus2 = make_bus(FlashImage{0xAA});
  MachineConfig config;
  config.halt_on_unknown_opcode = true;
  const RunOutcome halted = run(bus2, {}, config);
  CHECK(halted.reason == StopReason::Halted);
}

TEST_CASE("run: exhausted input traps with detail") {
  Bus bus = make_bus(assemble("key"), {});
  const RunOutcome outcome = run(bus, {});
  CHECK(outcome.reason == StopReason::Trap);
  CHECK(outcome.trap()->kind == TrapKind::InputExhausted);
  CHECK(outcome.trap()->detail == "input exhausted");
}

TEST_CASE("mips: single-byte stream at 27 MHz lands on 5.4") {
  // 1000 dup instructions, 5 cycles each
  Bus bus = make_bus(FlashImage(1000, 0x12));
  const RunOutcome outcome = run(bus, {});
  CHECK(outcome.machine.retired == 1000);
  CHECK(outcome.machine.cycle == 5000);
  const double mips = instructions_per_second(outcome, 27e6) / 1e6;
  CHECK(mips == doctest::Approx(5.4).epsilon(1e-12));
}

TEST_CASE("mips: all-push stream at 27 MHz lands near 1.59") {
  FlashImage image;
  for (int i = 0; i < 500; ++i) {
    encode_instruction(instr(Opcode::Push, 7), image);
  }
  Bus bus = make_bus(image);
  const RunOutcome outcome = run(bus, {});
  CHECK(outcome.machine.cycle == 500 * 17);
  const double mips = instructions_per_second(outcome, 27e6) / 1e6;
  CHECK(mips == doctest::Approx(27.0 / 17.0).epsilon(1e-12));
  CHECK(mips == doctest::Approx(1.59).epsilon(0.005));
}

TEST_CASE("mips: 1 instruction in 5 cycles at 5 Hz is 1 IPS") {
  CHECK(instructions_per_second(1, 5, 5.0) == doctest::Approx(1.0));
}

TEST_CASE("call/ret: resumes after the call with both depths restored") {
  const FlashImage image = assemble(
      "push 1\n"
      "call :sub\n"
      "drop\n"
      "key\n"      // stops the run (no input scripted)
      ":sub\n"
      "dup\n"
      "ret\n");
  Bus bus = make_bus(image);
  const RunOutcome outcome = run(bus, {});
  CHECK(outcome.trap()->kind == TrapKind::InputExhausted);
  // push(17) call(17) dup(5) ret(5) drop(5), then key faults
  CHECK(outcome.machine.retired == 5);
  CHECK(outcome.machine.ret.depth == 0);
  CHECK(outcome.machine.data.depth == 1);
  CHECK(outcome.machine.data.top() == 1);
}
