"""Regular k-block dictionary codec: the non-sequential baseline.

Container layout (little-endian header)::

    magic    4s  b"SRB1"
    version  u8  1
    d        u8
    A        u32
    n        u32
    k        u32
    D        u32  number of distinct k-words
    extents  d x u32
    bits     u64  payload length in bits
    payload  D raw words, (n//k)**d word indices, raw remainder; MSB-first
    crc32    u32
"""

from __future__ import annotations

import math
import struct
import zlib

import numpy as np

from .bitio import BitReader, BitWriter, bit_width
from .errors import BadMagicError, BadPointerError, ChecksumError, CorruptStreamError, \
    TruncatedStreamError, UsageError
from .grid import Alphabet, GridArray, _max_coord
from .stats import block_matrix, choose_k

MAGIC = b"SRB1"
VERSION = 1

_HEAD = struct.Struct("<4sBBIIII")
_BITS = struct.Struct("<Q")
_CRC = struct.Struct("<I")


def payload_bits(n: int, d: int, k: int, D: int, A: int) -> int:
    """Closed-form payload size of :func:`encode_baseline`."""
    w = Alphabet(A).bits
    q = n // k
    return D * k ** d * w + q ** d * bit_width(D) + (n ** d - (q * k) ** d) * w


def _remainder_mask(n: int, d: int, inner: int) -> np.ndarray:
    return _max_coord(d, n) >= inner


def build_dictionary(x: GridArray, k: int) -> tuple:
    """Distinct k-words in first-occurrence order and the index of every block."""
    rows = block_matrix(x, k)
    uniq, first, inverse = np.unique(rows, axis=0, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    relabel = np.empty_like(order)
    relabel[order] = np.arange(order.size)
    return uniq[order], relabel[inverse.reshape(-1)]


def encode_baseline(x: GridArray, k: int | None = None) -> bytes:
    extents = x.extents
    x = x.padded()
    n, d, A = x.extents[0], x.d, x.alphabet.size
    if k is None:
        k = choose_k(n, d, A) if n >= 2 else 1
    if not 1 <= k <= n:
        raise UsageError(f"block side {k} not in 1..{n}")
    words, indices = build_dictionary(x, k)
    D = len(words)
    w = x.alphabet.bits
    out = BitWriter()
    out.write_symbols(words.reshape(-1).tolist(), w)
    iw = bit_width(D)
    for i in indices.tolist():
        out.write(i, iw)
    q = n // k
    rest = x.data.reshape(-1)[_remainder_mask(n, d, q * k)]
    out.write_symbols(rest.tolist(), w)
    head = (_HEAD.pack(MAGIC, VERSION, d, A, n, k, D)
            + struct.pack(f"<{d}I", *extents) + _BITS.pack(out.bits))
    body = head + out.getvalue()
    return body + _CRC.pack(zlib.crc32(body))


def read_header(stream: bytes) -> dict:
    if len(stream) < 4 or stream[:4] != MAGIC:
        raise BadMagicError("not an SRB1 container")
    if len(stream) < _HEAD.size:
        raise TruncatedStreamError("container header truncated")
    _, version, d, A, n, k, D = _HEAD.unpack_from(stream)
    if version != VERSION:
        raise BadMagicError(f"unsupported container version {version}")
    size = _HEAD.size + 4 * d + _BITS.size
    if len(stream) < size:
        raise TruncatedStreamError("container header truncated")
    extents = struct.unpack_from(f"<{d}I", stream, _HEAD.size)
    (bits,) = _BITS.unpack_from(stream, _HEAD.size + 4 * d)
    return dict(d=d, A=A, n=n, k=k, D=D, extents=tuple(extents), bits=bits, size=size)


def decode_baseline(stream: bytes) -> GridArray:
    stream = bytes(stream)
    h = read_header(stream)
    d, A, n, k, D = h["d"], h["A"], h["n"], h["k"], h["D"]
    end = h["size"] + (h["bits"] + 7) // 8
    if len(stream) < end + _CRC.size:
        raise TruncatedStreamError("container shorter than its declared payload")
    if len(stream) > end + _CRC.size:
        raise CorruptStreamError("trailing bytes after container")
    if zlib.crc32(stream[:end]) != _CRC.unpack_from(stream, end)[0]:
        raise ChecksumError("checksum mismatch")
    try:
        alphabet = Alphabet(A)
    except UsageError as exc:
        raise CorruptStreamError(str(exc)) from exc
    if not (1 <= d <= 8 and 1 <= k <= n and D >= 1) or any(e > n for e in h["extents"]):
        raise CorruptStreamError("inconsistent container header")
    if h["bits"] != payload_bits(n, d, k, D, A):
        raise CorruptStreamError("payload length does not match the header")
    w = alphabet.bits
    r = BitReader(stream[h["size"]:end], h["bits"])
    words = np.array(r.read_symbols(D * k ** d, w), dtype=np.int64).reshape(D, k ** d)
    q = n // k
    indices = np.array(r.read_symbols(q ** d, bit_width(D)), dtype=np.int64)
    if indices.size and indices.max() >= D:
        raise BadPointerError("word index outside the dictionary")
    rest = np.array(r.read_symbols(n ** d - (q * k) ** d, w), dtype=np.int64)
    if (words.size and words.max() >= A) or (rest.size and rest.max() >= A):
        raise CorruptStreamError("symbol outside the alphabet")
    out = np.zeros((n,) * d, dtype=alphabet.dtype)
    blocks = words[indices].reshape((q,) * d + (k,) * d)
    # (q, q, ..., k, k, ...) -> (q, k, q, k, ...)
    perm = [ax for i in range(d) for ax in (i, d + i)]
    out[(slice(0, q * k),) * d] = blocks.transpose(perm).reshape((q * k,) * d)
    out.reshape(-1)[_remainder_mask(n, d, q * k)] = rest
    return GridArray(out, alphabet).cropped(h["extents"])


def baseline_rate(stream: bytes) -> float:
    h = read_header(bytes(stream))
    return h["bits"] / (h["n"] ** h["d"] * math.log2(h["A"]))
