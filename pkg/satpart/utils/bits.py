"""
Bit-vector helpers shared by journals, meta comments and search traces.

A bit vector is a tuple of 0/1 ints; element 0 is the most significant bit of its hex rendering.
"""
from typing import Iterable, Sequence, Tuple

Bits = Tuple[int, ...]


def bits_to_int(bits: Sequence[int]) -> int:
    """Pack bits with bits[0] as the most significant bit."""
    value = 0
    for bit in bits:
        value = (value << 1) | (1 if bit else 0)
    return value


def int_to_bits(value: int, width: int) -> Bits:
    """Inverse of bits_to_int for a fixed width."""
    if value < 0 or value >> width:
        raise ValueError(f"value {value} does not fit in {width} bits")
    return tuple((value >> (width - 1 - i)) & 1 for i in range(width))


def bits_to_hex(bits: Sequence[int]) -> str:
    """Render bits as lowercase hex padded to ceil(len/4) digits."""
    if not bits:
        return ""
    digits = (len(bits) + 3) // 4
    return format(bits_to_int(bits), f"0{digits}x")


def hex_to_bits(text: str, width: int) -> Bits:
    """Parse a hex rendering produced by bits_to_hex."""
    text = text.strip().lower()
    if width == 0:
        if text:
            raise ValueError("non-empty hex for zero-width vector")
        return ()
    return int_to_bits(int(text, 16), width)


def lsb_bits(value: int, width: int) -> Bits:
    """Bits of an integer with bit j of the integer at position j."""
    return tuple((value >> j) & 1 for j in range(width))


def gray_code(index: int) -> int:
    """Reflected binary Gray code of index."""
    return index ^ (index >> 1)


def popcount(bits: Iterable[int]) -> int:
    return sum(1 for bit in bits if bit)


def words32(value: int):
    """Little-endian 32-bit words of a non-negative int (at least one word)."""
    words = []
    while True:
        words.append(value & 0xFFFFFFFF)
        value >>= 32
        if not value:
            return tuple(words)
