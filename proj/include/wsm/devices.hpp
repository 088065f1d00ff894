#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wsm/errors.hpp"
#include "wsm/isa.hpp"

namespace wsm {

inline constexpr std::uint64_t kDefaultClockHz = 27'000'000;
inline constexpr std::uint32_t kDefaultBaud = 115'200;

/// round(27e6 / 115200) = 234 cycles per bit (115,385 effective baud).
inline constexpr std::uint32_t kDefaultUartDivisor = 234;

/// Default per-byte flash read latency. Three fetch cycles plus DECODE and
/// EXECUTE give the 5-cycle cost of a single-byte instruction.
inline constexpr std::uint32_t kDefaultFlashLatency = 3;

/// Serial flash the CPU executes from. The observable contract is the
/// per-byte latency in cycles, not the SPI command sequence.
struct FlashModel {
  FlashImage image;
  std::uint32_t latency_cycles = kDefaultFlashLatency;

  struct Fetch {
    std::uint8_t byte;
    std::uint32_t latency;
  };

  /// nullopt when addr is outside the image.
  std::optional<Fetch> fetch(std::uint32_t addr) const {
    if (addr >= image.size()) return std::nullopt;
    return Fetch{image[addr], latency_cycles};
  }
};

/// One scripted RX byte, available from `at_cycle` onward.
struct RxEntry {
  std::uint64_t at_cycle = 0;
  std::uint8_t byte = 0;
};

/// 8N1 transmitter/receiver model. A frame is 10 bit periods (start, 8 data
/// bits LSB first, stop), so one byte holds the transmitter busy for
/// 10 * divisor cycles.
struct UartModel {
  std::uint32_t divisor = kDefaultUartDivisor;
  std::uint64_t busy_until = 0;

  std::vector<std::uint8_t> output;  // every transmitted byte, program order
  std::function<void(std::uint8_t)> tx_sink;  // optional live tap

  std::vector<RxEntry> rx_script;
  std::size_t rx_pos = 0;
  // When set, RX reads the console instead of the script (1-cycle charge).
  std::function<std::optional<std::uint8_t>()> interactive_poll;

  std::uint64_t frame_cycles() const { return 10ull * divisor; }

  /// Latches a byte for transmission at cycle `now`. Returns the stall the
  /// CPU must spend in UART_WAIT first: zero when the transmitter is idle,
  /// otherwise the cycles left in the previous frame.
  std::uint64_t tx(std::uint8_t byte, std::uint64_t now);

  struct Rx {
    std::uint8_t byte;
    std::uint64_t wait;  // cycles until the byte is available (0 = now)
  };

  /// Next received byte, or nullopt when no more input will ever arrive.
  std::optional<Rx> rx_next(std::uint64_t now);
};

/// Everything the CPU reaches over its buses.
struct Bus {
  FlashModel flash;
  UartModel uart;
};

/// 10 logic levels of one UART frame: start (0), data LSB first, stop (1).
std::array<std::uint8_t, 10> uart_waveform(std::uint8_t byte);

/// Seconds per UART bit for a given clock and divisor.
double uart_bit_period_seconds(std::uint64_t clock_hz, std::uint32_t divisor);

/// Frame waveform as CSV: header `bit_index,level,start_time_us`, one row
/// per bit period.
std::string uart_waveform_csv(std::uint8_t byte, std::uint64_t clock_hz,
                              std::uint32_t divisor);

/// RX script file: one entry per line, `<cycle>:<byte>` where byte is a hex
/// pair (`0d`, `0x0d`) or a quoted char (`'3'`, escapes \n \r \t \0 \\ \').
/// Blank lines and `#` comments are skipped. Throws ScriptError.
std::vector<RxEntry> parse_rx_script(std::string_view text);

/// All bytes of `text` available from cycle 0 (test/CLI convenience).
std::vector<RxEntry> rx_script_from_text(std::string_view text);

}  // namespace wsm
