#include "wsm/example_programs.hpp"

namespace wsm::examples {

const char* const kCalcAsm = R"(:main
    push 62 ; '>'
    print
    push 32
    print

    key     ; digit1_char
    dup
    print
    push 48
    sub     ; digit1

    key     ; digit1 op_char
    dup
    print

    key     ; digit1 op digit2_char
    dup
    print
    push 48
    sub     ; digit1 op digit2

    push 13
    print
    push 10
    print

    ; Stack: digit1 op digit2
    ; Rearrange to: digit1 digit2 op
    swap    ; digit1 digit2 op

    ; Check if op is '+'
    dup     ; digit1 digit2 op op
    push 43
    eq      ; digit1 digit2 op (op==43)
    br_if :add_op

    ; Check if op is '-'
    dup
    push 45
    eq
    br_if :sub_op

    ; Check if op is '*'
    dup
    push 42
    eq
    br_if :mul_op

    ; Unknown - drop everything
    drop
    drop
    drop
    jump :main

:add_op
    drop    ; digit1 digit2
    add
    push 48 ; Convert to ASCII
    add
    print
    push 13 ; CR
    print
    push 10 ; LF
    print
    jump :main ; loop forever

:sub_op
    drop
    sub
    push 48
    add
    print
    push 13
    print
    push 10
    print
    jump :main

:mul_op
    drop
    mul
    push 48
    add
    print
    push 13
    print
    push 10
    print
    jump :main
)";

const char* const kMultiDigitAsm = R"(; Multi-digit number entry over the UART.
; Echoes each digit and folds it into an accumulator:
;   value = (value * 10) + (char - '0')
; A '#' ends the number. The value stays on top of the data stack,
; so run with --trace and read the tos field of the last retired
; instruction. The trailing key waits for input that never comes,
; which ends a scripted run cleanly.
:main
    push 0          ; value
:loop
    key             ; value ch
    dup
    print           ; echo
    dup
    push 35         ; '#'
    eq              ; value ch (ch=='#')
    br_if :done
    push 48
    sub             ; value digit
    swap            ; digit value
    push 10
    mul             ; digit value*10
    add             ; value'
    jump :loop
:done
    drop            ; value
    key             ; hold here
)";

const char* const kDivideAsm = R"(; Software division by repeated subtraction: 35 / 7.
; No hardware divider, so the quotient is counted one
; subtraction at a time; lt_s decides when the remainder
; goes below the divisor. Prints the quotient digit.
; Stack discipline inside the loop: n q
:main
    push 35         ; dividend
    push 0          ; n q
:loop
    over            ; n q n
    push 7
    lt_s            ; n q (n<7)
    br_if :done
    push 1
    add             ; n q+1
    swap            ; q+1 n
    push 7
    sub             ; q+1 n-7
    swap            ; n-7 q+1
    jump :loop
:done
    swap            ; q n
    drop            ; q
    push 48
    add             ; ASCII digit
    print
    push 13
    print
    push 10
    print
    key             ; hold here
)";

}  // namespace wsm::examples
