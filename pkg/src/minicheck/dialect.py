"""The fixed implementation-defined dialect shared by sema and the oracle.

Plain ``char`` is signed and 8 bits wide, ``int`` is 32 bits, ``long`` and
``long long`` are 64 bits, pointers are 64 bits, and signed integers use
two's complement.  Nothing else in the package hard-codes a width.
"""

CHAR_BIT = 8

INT_WIDTHS = {
    "_Bool": 8,
    "char": 8,
    "short": 16,
    "int": 32,
    "long": 64,
    "long long": 64,
}

CHAR_IS_SIGNED = True
FLOAT_WIDTHS = {"float": 32, "double": 64, "long double": 64}
POINTER_WIDTH = 64

# sizeof(size_t) == sizeof(unsigned long)
SIZE_T_WIDTH = 64

EOF_VALUE = -1
MAX_INCLUDE_DEPTH = 32
MAX_MACRO_DEPTH = 32


def int_range(width: int, signed: bool) -> tuple[int, int]:
    if signed:
        return -(1 << (width - 1)), (1 << (width - 1)) - 1
    return 0, (1 << width) - 1


def wrap(value: int, width: int, signed: bool) -> int:
    """Reduce ``value`` modulo 2**width, reinterpreting as two's complement."""
    value &= (1 << width) - 1
    if signed and value >= 1 << (width - 1):
        value -= 1 << width
    return value


def fits(value: int, width: int, signed: bool) -> bool:
    lo, hi = int_range(width, signed)
    return lo <= value <= hi
