#pragma once

namespace wsm::examples {

/// Single-digit infix calculator (add, subtract, multiply) over the UART.
extern const char* const kCalcAsm;

/// Multi-digit number entry: value = value * 10 + (char - '0').
extern const char* const kMultiDigitAsm;

/// Software division by repeated subtraction (35 / 7).
extern const char* const kDivideAsm;

}  // namespace wsm::examples
