#include "wsm/hexdump.hpp"

#include <cctype>

namespace wsm {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string emit_hexdump(std::span<const std::uint8_t> image) {
  std::string out;
  out.reserve(image.size() * 3 + image.size() / 16 + 1);
  for (std::size_t i = 0; i < image.size(); ++i) {
    out.push_back(kHexDigits[image[i] >> 4]);
    out.push_back(kHexDigits[image[i] & 0xF]);
    const bool line_end = (i % 16 == 15) || (i + 1 == image.size());
    out.push_back(line_end ? '\n' : ' ');
  }
  return out;
}

FlashImage parse_hexdump(std::string_view text) {
  FlashImage image;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) {
      ++end;
    }
    const std::string_view token = text.substr(i, end - i);
    if (token.size() != 2 || hex_value(token[0]) < 0 || hex_value(token[1]) < 0) {
      throw HexParseError(std::string(token));
    }
    image.push_back(static_cast<std::uint8_t>(hex_value(token[0]) * 16 + hex_value(token[1])));
    i = end;
  }
  return image;
}

}  // namespace wsm
