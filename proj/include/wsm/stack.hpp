#pragma once

#include <array>
#include <cstdint>

namespace wsm {

/// 8-entry, 32-bit-wide circular stack. The 3-bit pointer addresses the
/// current top element and wraps modulo 8: push pre-increments, pop
/// post-decrements. `depth` is a diagnostic counter, not a hardware register;
/// it keeps counting through wraparound so strict mode can detect
/// overflow (depth > 8) and underflow (depth < 0).
struct StackBank {
  static constexpr unsigned kSlots = 8;

  std::array<std::uint32_t, kSlots> slots{};
  std::uint8_t sp = kSlots - 1;  // first push lands in slot 0
  std::int64_t depth = 0;

  void push(std::uint32_t v) {
    sp = static_cast<std::uint8_t>((sp + 1u) % kSlots);
    slots[sp] = v;
    ++depth;
  }

  std::uint32_t pop() {
    const std::uint32_t v = slots[sp];
    sp = static_cast<std::uint8_t>((sp + kSlots - 1u) % kSlots);
    --depth;
    return v;
  }

  std::uint32_t top() const { return slots[sp]; }

  /// Element n positions below the top; peek(0) == top().
  std::uint32_t peek(unsigned n) const {
    return slots[(sp + kSlots - n) % kSlots];
  }

  bool operator==(const StackBank&) const = default;
};

}  // namespace wsm
