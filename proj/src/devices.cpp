#include "wsm/devices.hpp"

#include <cctype>
#include <cstdio>

namespace wsm {

std::uint64_t UartModel::tx(std::uint8_t byte, std::uint64_t now) {
  const std::uint64_t stall = busy_until > now ? busy_until - now : 0;
  busy_until = now + stall + frame_cycles();
  output.push_back(byte);
  if (tx_sink) tx_sink(byte);
  return stall;
}

std::optional<UartModel::Rx> UartModel::rx_next(std::uint64_t now) {
  if (interactive_poll) {
    const auto byte = interactive_poll();
    if (!byte) return std::nullopt;
    return Rx{*byte, 1};
  }
  if (rx_pos >= rx_script.size()) return std::nullopt;
  const RxEntry e = rx_script[rx_pos++];
  return Rx{e.byte, e.at_cycle > now ? e.at_cycle - now : 0};
}

std::array<std::uint8_t, 10> uart_waveform(std::uint8_t byte) {
  std::array<std::uint8_t, 10> bits{};
  bits[0] = 0;  // start
  for (int i = 0; i < 8; ++i) {
    bits[1 + i] = static_cast<std::uint8_t>((byte >> i) & 1);
  }
  bits[9] = 1;  // stop
  return bits;
}

double uart_bit_period_seconds(std::uint64_t clock_hz, std::uint32_t divisor) {
  return static_cast<double>(divisor) / static_cast<double>(clock_hz);
}

std::string uart_waveform_csv(std::uint8_t byte, std::uint64_t clock_hz,
                              std::uint32_t divisor) {
  const auto bits = uart_waveform(byte);
  const double period_us = uart_bit_period_seconds(clock_hz, divisor) * 1e6;
  std::string out = "bit_index,level,start_time_us\n";
  char row[64];
  for (std::size_t i = 0; i < bits.size(); ++i) {
    std::snprintf(row, sizeof(row), "%zu,%u,%.4f\n", i, bits[i],
                  static_cast<double>(i) * period_us);
    out += row;
  }
  return out;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::uint8_t parse_byte_token(std::string_view tok, int line_no) {
  if (tok.size() >= 3 && tok.front() == '\'' && tok.back() == '\'') {
    const std::string_view body = tok.substr(1, tok.size() - 2);
    if (body.size() == 1) return static_cast<std::uint8_t>(body[0]);
    if (body.size() == 2 && body[0] == '\\') {
      switch (body[1]) {
        case 'n': return '\n';
        case 'r': return '\r';
        case 't': return '\t';
        case '0': return '\0';
        case '\\': return '\\';
        case '\'': return '\'';
      }
    }
    throw ScriptError(line_no, "bad char token " + std::string(tok));
  }
  std::string_view hex = tok;
  if (hex.size() > 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) {
    hex.remove_prefix(2);
  }
  if (hex.empty() || hex.size() > 2) {
    throw ScriptError(line_no, "bad byte token '" + std::string(tok) + "'");
  }
  int value = 0;
  for (char c : hex) {
    const int d = hex_value(c);
    if (d < 0) throw ScriptError(line_no, "bad byte token '" + std::string(tok) + "'");
    value = value * 16 + d;
  }
  return static_cast<std::uint8_t>(value);
}

}  // namespace

std::vector<RxEntry> parse_rx_script(std::string_view text) {
  std::vector<RxEntry> script;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;

    // '#' starts a comment unless it sits inside a quoted char token
    bool in_quote = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (in_quote && line[i] == '\\') {
        ++i;
      } else if (line[i] == '\'') {
        in_quote = !in_quote;
      } else if (line[i] == '#' && !in_quote) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw ScriptError(line_no, "expected <cycle>:<byte>");
    }
    const std::string_view cycle_tok = trim(line.substr(0, colon));
    const std::string_view byte_tok = trim(line.substr(colon + 1));
    if (cycle_tok.empty() || byte_tok.empty()) {
      throw ScriptError(line_no, "expected <cycle>:<byte>");
    }
    std::uint64_t cycle = 0;
    for (char c : cycle_tok) {
      if (c < '0' || c > '9') {
        throw ScriptError(line_no, "bad cycle '" + std::string(cycle_tok) + "'");
      }
      cycle = cycle * 10 + static_cast<std::uint64_t>(c - '0');
    }
    script.push_back({cycle, parse_byte_token(byte_tok, line_no)});
  }
  return script;
}

std::vector<RxEntry> rx_script_from_text(std::string_view text) {
  std::vector<RxEntry> script;
  script.reserve(text.size());
  for (char c : text) {
    script.push_back({0, static_cast<std::uint8_t>(c)});
  }
  return script;
}

}  // namespace wsm
