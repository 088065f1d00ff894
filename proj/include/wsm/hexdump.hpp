#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "wsm/isa.hpp"

namespace wsm {

/// Canonical hexdump text: lowercase two-digit bytes, single-space separated,
/// 16 bytes per line, every line (including a final partial one)
/// newline-terminated. An empty image produces empty text.
std::string emit_hexdump(std::span<const std::uint8_t> image);

/// Inverse of emit_hexdump. Accepts any whitespace layout, so hand-wrapped
/// dumps parse too. Throws HexParseError on a non-hex token.
FlashImage parse_hexdump(std::string_view text);

}  // namespace wsm
