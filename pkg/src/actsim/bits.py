"""Fixed-width bit-string helpers.

Payloads, inputs and outputs are plain ``str`` objects over ``'0'``/``'1'``
so that message sizes can be charged bit-exactly.
"""

from __future__ import annotations


def id_width(N: int) -> int:
    """Bits needed for any integer in ``[0, N]``, i.e. ``ceil(log2(N + 1))``."""
    return max(1, int(N).bit_length())


def uint(value: int, width: int) -> str:
    if value < 0 or (width == 0 and value != 0) or (width and value >= 1 << width):
        raise ValueError(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width else ""


def to_int(bits: str) -> int:
    return int(bits, 2) if bits else 0


def to_hex(bits: str) -> str:
    """Hex rendering used by trace export; length is carried separately."""
    if not bits:
        return ""
    return format(int(bits, 2), "x").zfill((len(bits) + 3) // 4)


class BitReader:
    """Sequential reader over a bit-string."""

    def __init__(self, bits: str):
        self.bits = bits
        self.pos = 0

    def read(self, width: int) -> str:
        if self.pos + width > len(self.bits):
            raise ValueError("read past end of bit-string")
        chunk = self.bits[self.pos:self.pos + width]
        self.pos += width
        return chunk

    def uint(self, width: int) -> int:
        return to_int(self.read(width))

    def flag(self) -> bool:
        return self.read(1) == "1"

    def remaining(self) -> int:
        return len(self.bits) - self.pos
