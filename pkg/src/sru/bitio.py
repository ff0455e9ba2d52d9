"""MSB-first fixed-width bit fields over an octet buffer."""

from __future__ import annotations

from .errors import TruncatedStreamError, UsageError


def bit_width(count: int) -> int:
    """Bits needed to tell ``count`` values apart, ceil(log2 count); 0 for count <= 1."""
    return (count - 1).bit_length() if count > 1 else 0


class BitWriter:
    def __init__(self):
        self._buf = bytearray()
        self._acc = 0
        self._nacc = 0
        self.bits = 0

    def write(self, value: int, width: int) -> None:
        if width < 0 or width > 64:
            raise UsageError(f"field width {width} not in 0..64")
        if value < 0 or value >> width:
            raise UsageError(f"value {value} does not fit in {width} bits")
        if not width:
            return
        self._acc = (self._acc << width) | value
        self._nacc += width
        self.bits += width
        while self._nacc >= 8:
            self._nacc -= 8
            self._buf.append((self._acc >> self._nacc) & 0xFF)
        self._acc &= (1 << self._nacc) - 1

    def write_symbols(self, symbols, width: int) -> None:
        for s in symbols:
            self.write(int(s), width)

    def getvalue(self) -> bytes:
        """Buffer contents with the final partial octet zero-padded."""
        if self._nacc:
            return bytes(self._buf) + bytes([(self._acc << (8 - self._nacc)) & 0xFF])
        return bytes(self._buf)


class BitReader:
    def __init__(self, data: bytes, limit_bits: int | None = None):
        self._data = data
        self._pos = 0  # next byte to load
        self._acc = 0
        self._nacc = 0
        self.bits = 0
        self.limit = len(data) * 8 if limit_bits is None else limit_bits

    def read(self, width: int) -> int:
        if width < 0 or width > 64:
            raise UsageError(f"field width {width} not in 0..64")
        if not width:
            return 0
        if self.bits + width > self.limit:
            raise TruncatedStreamError("bit stream exhausted")
        while self._nacc < width:
            self._acc = (self._acc << 8) | self._data[self._pos]
            self._pos += 1
            self._nacc += 8
        self._nacc -= width
        value = self._acc >> self._nacc
        self._acc &= (1 << self._nacc) - 1
        self.bits += width
        return value

    def read_symbols(self, count: int, width: int) -> list:
        return [self.read(width) for _ in range(count)]


def write_bits(sink: BitWriter, value: int, width: int) -> None:
    sink.write(value, width)


def read_bits(source: BitReader, width: int) -> int:
    return source.read(width)
