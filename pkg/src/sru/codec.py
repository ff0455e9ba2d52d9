"""Bit-exact container for the sequential parser, with a replaying decoder.

Container layout (all header integers little-endian)::

    magic      4s   b"SRU1"
    version    u8   1
    d          u8
    flags      u8   bit 0: the final ring was flushed (stream is sealed)
                    bit 1: back-references are rank coded (see below)
    A          u32
    phi        u16 numerator, u16 denominator
    n          u32  side of the coded cube
    extents    d x u32  true extents before padding
    bits       u64  length of the event section in bits
    events     bit-packed MSB-first, zero-padded to an octet
    crc32      u32  over every preceding octet

Per parsed block of side k and index i the event section holds the match side
l in ceil(log2(k+1)) bits, then, if l >= 1, the back-reference, then the
k**d - l**d symbols outside the matched leading sub-word at ceil(log2 A) bits
each. Block positions and sizes are not stored: the decoder re-runs the
parser on the words it has already rebuilt.

The back-reference p comes in one of two forms:

* ``index``: p - 1 in ceil(log2(i-1)) bits.
* ``rank`` (default): the position of the matched leading l-word among the
  N distinct leading l-words seen in words 1..i-1, in ceil(log2 N) bits.
  Both sides know that list, so the rank identifies the same p while the
  field never costs more than the l**d symbols it replaces.
"""

from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .bitio import BitReader, BitWriter, bit_width
from .errors import (
    BadMagicError,
    BadPointerError,
    ChecksumError,
    CorruptStreamError,
    OverlapMismatchError,
    SealedStreamError,
    TruncatedStreamError,
    UsageError,
)
from .grid import Alphabet, GridArray, Word, leading_index, shell, shell_index
from .parser import ParseState, Threshold, advance, flush

MAGIC = b"SRU1"
VERSION = 1
FLAG_FLUSHED = 1
FLAG_RANK = 2
POINTER_MODES = ("rank", "index")

_FIXED = struct.Struct("<4sBBBIHHI")
_BITS = struct.Struct("<Q")
_CRC = struct.Struct("<I")


@dataclass(frozen=True)
class ContainerHeader:
    d: int
    alphabet: int
    phi: Threshold
    n: int
    extents: tuple
    flags: int = 0
    payload_bits: int = 0

    @property
    def flushed(self) -> bool:
        return bool(self.flags & FLAG_FLUSHED)

    @property
    def pointers(self) -> str:
        return "rank" if self.flags & FLAG_RANK else "index"

    def pack(self) -> bytes:
        return (
            _FIXED.pack(MAGIC, VERSION, self.d, self.flags, self.alphabet,
                        self.phi.num, self.phi.den, self.n)
            + struct.pack(f"<{self.d}I", *self.extents)
            + _BITS.pack(self.payload_bits)
        )

    @property
    def size(self) -> int:
        return _FIXED.size + 4 * self.d + _BITS.size

    @classmethod
    def unpack(cls, data: bytes) -> "ContainerHeader":
        if len(data) < 4 or data[:4] != MAGIC:
            raise BadMagicError("not an SRU1 container")
        if len(data) < _FIXED.size:
            raise TruncatedStreamError("container header truncated")
        magic, version, d, flags, A, num, den, n = _FIXED.unpack_from(data)
        if version != VERSION:
            raise BadMagicError(f"unsupported container version {version}")
        end = _FIXED.size + 4 * d + _BITS.size
        if len(data) < end:
            raise TruncatedStreamError("container header truncated")
        extents = struct.unpack_from(f"<{d}I", data, _FIXED.size)
        (bits,) = _BITS.unpack_from(data, _FIXED.size + 4 * d)
        try:
            phi = Threshold(num, den)
            Alphabet(A)
        except UsageError as exc:
            raise CorruptStreamError(f"invalid header field: {exc}") from exc
        if not 1 <= d <= 8 or any(e > n for e in extents) or flags & ~(FLAG_FLUSHED | FLAG_RANK):
            raise CorruptStreamError("inconsistent container header")
        return cls(d, A, phi, n, tuple(extents), flags, bits)


def _seal(header: ContainerHeader, payload: bytes) -> bytes:
    body = header.pack() + payload
    return body + _CRC.pack(zlib.crc32(body))


def _open(stream: bytes) -> tuple:
    """Validate magic and checksum; return ``(header, payload bytes)``."""
    stream = bytes(stream)
    header = ContainerHeader.unpack(stream)
    payload_len = (header.payload_bits + 7) // 8
    end = header.size + payload_len
    if len(stream) < end + _CRC.size:
        raise TruncatedStreamError("container shorter than its declared payload")
    if len(stream) > end + _CRC.size:
        raise CorruptStreamError("trailing bytes after container")
    (crc,) = _CRC.unpack_from(stream, end)
    if zlib.crc32(stream[:end]) != crc:
        raise ChecksumError("checksum mismatch")
    return header, stream[header.size:end]


def pointer_field(trie, event, pointers: str) -> tuple:
    """``(value, width)`` of the back-reference field of ``event``."""
    l, p, i = event.match_side, event.back_ref, event.index
    if pointers == "index":
        return p - 1, bit_width(i - 1)
    return trie.rank(l, p), bit_width(trie.count_before(l, i))


def event_bits(event, d: int, alphabet_bits: int, trie=None, pointers: str = "index") -> int:
    """Exact number of event-section bits spent on one parsed block."""
    k, l = event.word.side, event.match_side
    bits = bit_width(k + 1) + (k ** d - l ** d) * alphabet_bits
    if l:
        bits += pointer_field(trie, event, pointers)[1]
    return bits


class SRUEncoder:
    """Incremental encoder: feed growing cubes, then :meth:`finish`."""

    def __init__(self, d: int, alphabet: Alphabet | int, phi: Threshold | str = "1/2",
                 pointers: str = "rank"):
        if pointers not in POINTER_MODES:
            raise UsageError(f"pointer mode must be one of {POINTER_MODES}")
        self.pointers = pointers
        self.state = ParseState(d, alphabet, phi)
        self.writer = BitWriter()
        self.events = []
        self.n = 0
        self.extents = None
        self._prefix = None

    @classmethod
    def resume(cls, stream: bytes) -> tuple:
        """Rebuild an encoder from an unsealed container.

        Returns ``(encoder, prefix)`` where ``prefix`` is the decoded ``Λ_m``;
        data fed afterwards must agree with it.
        """
        header, payload = _open(stream)
        if header.flushed:
            raise SealedStreamError("container was flushed; it cannot be extended")
        out, state, events = _replay(header, payload)
        enc = cls.__new__(cls)
        enc.pointers = header.pointers
        enc.state = state
        enc.writer = BitWriter()
        reader = BitReader(payload, header.payload_bits)
        left = header.payload_bits
        while left:
            w = min(64, left)
            enc.writer.write(reader.read(w), w)
            left -= w
        enc.events = events
        enc.n = header.n
        enc.extents = None
        prefix = GridArray(out[(slice(0, state.m),) * header.d], header.alphabet)
        enc._prefix = prefix.data
        return enc, prefix

    def _write(self, events) -> None:
        bits = self.state.alphabet.bits
        trie = self.state.trie
        w = self.writer
        for e in events:
            k, l = e.word.side, e.match_side
            w.write(l, bit_width(k + 1))
            if l:
                w.write(*pointer_field(trie, e, self.pointers))
            w.write_symbols(shell(e.word, l), bits)
        self.events.extend(events)

    def feed(self, x: GridArray, n: int | None = None) -> list:
        if n is None:
            n = x.extents[0]
        if self.extents is not None and n < self.n:
            raise UsageError("cannot shrink a stream")
        if self._prefix is not None:
            head = (slice(0, self.state.m),) * self.state.d
            if x.data[head].shape != self._prefix.shape or not np.array_equal(x.data[head], self._prefix):
                raise UsageError("new data disagrees with the already coded prefix")
            self._prefix = None
        events = advance(self.state, x, n)
        self._write(events)
        self.n = n
        return events

    def finish(self, x: GridArray | None = None, extents=None, seal: bool = True) -> bytes:
        """Optionally flush the leftover shell, then return the container bytes."""
        flags = FLAG_RANK if self.pointers == "rank" else 0
        if seal and self.state.m < self.n:
            if x is None:
                raise UsageError("flushing needs the data array")
            self._write(flush(self.state, x, self.n))
            flags |= FLAG_FLUSHED
        if extents is None:
            extents = self.extents or (self.n,) * self.state.d
        header = ContainerHeader(self.state.d, self.state.alphabet.size, self.state.phi,
                                 self.n, tuple(extents), flags, self.writer.bits)
        return _seal(header, self.writer.getvalue())


def encode_events(x: GridArray, phi: Threshold | str = "1/2", n: int | None = None,
                  seal: bool = True, pointers: str = "rank") -> tuple:
    """Encode ``x`` and also return the parse events (for inspection and tests)."""
    extents = x.extents
    if not x.is_cube:
        x = x.padded()
    if n is None:
        n = x.extents[0]
    elif n > x.extents[0]:
        raise UsageError(f"n={n} exceeds the array side {x.extents[0]}")
    else:
        extents = tuple(min(e, n) for e in extents)
    enc = SRUEncoder(x.d, x.alphabet, phi, pointers)
    enc.feed(x, n)
    data = enc.finish(x, extents, seal=seal)
    return data, enc.events


def encode(x: GridArray, phi: Threshold | str = "1/2", n: int | None = None,
           seal: bool = True, pointers: str = "rank") -> bytes:
    return encode_events(x, phi, n, seal, pointers)[0]


class _Replayer:
    """Fetch callback that rebuilds each block's word from the bitstream."""

    def __init__(self, header: ContainerHeader, reader: BitReader, state: ParseState):
        self.d = header.d
        self.A = header.alphabet
        self.sym_bits = state.alphabet.bits
        self.reader = reader
        self.state = state
        self.rank_coded = header.pointers == "rank"
        dtype = state.alphabet.dtype
        self.dtype = dtype
        self.out = np.zeros((header.n,) * header.d, dtype=dtype)
        self.written = np.zeros((header.n,) * header.d, dtype=bool)
        self.codes = []

    def __call__(self, box, index: int) -> Word:
        d, k, r = self.d, box.side, self.reader
        l = r.read(bit_width(k + 1))
        if l > k:
            raise BadPointerError(f"block {index}: match side {l} exceeds block side {k}")
        symbols = np.empty(k ** d, dtype=self.dtype)
        p = None
        if l:
            if self.rank_coded:
                firsts = self.state.trie.firsts.get(l, ())
                rank = r.read(bit_width(len(firsts)))
                if rank >= len(firsts):
                    raise BadPointerError(f"block {index}: no leading {l}-word of rank {rank}")
                p = firsts[rank]
            else:
                p = r.read(bit_width(index - 1)) + 1
            if p >= index:
                raise BadPointerError(f"block {index}: back-reference {p} is not earlier")
            ref = self.state.word_log[p - 1][2]
            if ref.side < l:
                raise BadPointerError(f"block {index}: word {p} has no leading {l}-sub-word")
            symbols[leading_index(d, k, l)] = ref.symbols[leading_index(d, ref.side, l)]
        residual = r.read_symbols(k ** d - l ** d, self.sym_bits)
        if residual and max(residual) >= self.A:
            raise CorruptStreamError(f"block {index}: symbol outside the alphabet")
        symbols[shell_index(d, k, l)] = residual
        block = symbols.reshape((k,) * d)
        sl = box.slices
        seen = self.written[sl]
        if seen.any() and not np.array_equal(self.out[sl][seen], block[seen]):
            raise OverlapMismatchError(f"block {index} disagrees with earlier blocks")
        self.out[sl] = block
        self.written[sl] = True
        self.codes.append((l, p))
        return Word(k, d, symbols)


def _replay(header: ContainerHeader, payload: bytes) -> tuple:
    state = ParseState(header.d, header.alphabet, header.phi)
    reader = BitReader(payload, header.payload_bits)
    replayer = _Replayer(header, reader, state)
    events = advance(state, replayer, header.n)
    if header.flushed:
        if state.m == header.n:
            raise CorruptStreamError("flush flag set but nothing was left to flush")
        events += flush(state, replayer, header.n)
    for e, (l, p) in zip(events, replayer.codes):
        if e.match_side != l or e.back_ref != p:
            raise BadPointerError(f"block {e.index}: match ({l}, {p}) is not the longest match")
    if reader.bits != header.payload_bits:
        raise CorruptStreamError("event section longer than the replayed parse")
    tail_bits = len(payload) * 8 - reader.bits
    if tail_bits and payload[-1] & ((1 << tail_bits) - 1):
        raise CorruptStreamError("non-zero padding bits")
    return replayer.out, state, events


def decode_events(stream: bytes, partial: bool = False) -> tuple:
    """Decode a container; returns ``(array, events)``.

    An unflushed container covers only ``Λ_m``; that cube is returned when
    ``partial`` is true, otherwise it is an error.
    """
    header, payload = _open(stream)
    out, state, events = _replay(header, payload)
    if state.m < header.n:
        if not partial:
            raise UsageError(f"container is unflushed and only covers Λ_{state.m}")
        return GridArray(out[(slice(0, state.m),) * header.d], header.alphabet), events
    x = GridArray(out, header.alphabet)
    return x.cropped(header.extents), events


def decode(stream: bytes, partial: bool = False) -> GridArray:
    return decode_events(stream, partial)[0]


def read_header(stream: bytes) -> ContainerHeader:
    return ContainerHeader.unpack(bytes(stream))


def code_rate(stream: bytes, n: int | None = None, d: int | None = None) -> float:
    """Event-section bits per site, in A-ary symbols: bits / (n**d * log2 A)."""
    header = read_header(stream)
    n = header.n if n is None else n
    d = header.d if d is None else d
    return header.payload_bits / (n ** d * math.log2(header.alphabet))
