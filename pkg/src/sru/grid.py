"""Symbol arrays over finite alphabets and cubical words cut out of them."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import UsageError
from .lattice import MAX_DIMS, Box

MAX_ALPHABET = 65536


@dataclass(frozen=True)
class Alphabet:
    size: int

    def __post_init__(self):
        if not 2 <= self.size <= MAX_ALPHABET:
            raise UsageError(f"alphabet size must be in 2..{MAX_ALPHABET}, got {self.size}")

    @property
    def dtype(self):
        return np.uint8 if self.size <= 256 else np.uint16

    @property
    def bits(self) -> int:
        """Bits per raw symbol, ceil(log2 A)."""
        return (self.size - 1).bit_length()


class GridArray:
    """A d-dimensional symbol array stored row-major (= lexicographic site order)."""

    def __init__(self, data, alphabet: Alphabet | int):
        if isinstance(alphabet, int):
            alphabet = Alphabet(alphabet)
        arr = np.asarray(data)
        if arr.ndim < 1 or arr.ndim > MAX_DIMS:
            raise UsageError(f"array dimension must be in 1..{MAX_DIMS}")
        if arr.size and (arr.min() < 0 or arr.max() >= alphabet.size):
            raise UsageError("symbol outside alphabet")
        arr = np.ascontiguousarray(arr, dtype=alphabet.dtype)
        arr.flags.writeable = False
        self.data = arr
        self.alphabet = alphabet

    @property
    def d(self) -> int:
        return self.data.ndim

    @property
    def extents(self) -> tuple:
        return self.data.shape

    @property
    def is_cube(self) -> bool:
        return len(set(self.extents)) == 1

    def __eq__(self, other):
        if not isinstance(other, GridArray):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and self.extents == other.extents
            and np.array_equal(self.data, other.data)
        )

    def __repr__(self):
        return f"GridArray(extents={self.extents}, A={self.alphabet.size})"

    def padded(self) -> "GridArray":
        """Pad with symbol 0 to the smallest enclosing cube."""
        n = max(self.extents)
        if self.is_cube:
            return self
        out = np.zeros((n,) * self.d, dtype=self.data.dtype)
        out[tuple(slice(0, e) for e in self.extents)] = self.data
        return GridArray(out, self.alphabet)

    def cropped(self, extents) -> "GridArray":
        return GridArray(self.data[tuple(slice(0, e) for e in extents)], self.alphabet)


class Word:
    """A cubical k-word: k**d symbols in lexicographic site order.

    Equality and hashing go through the raw symbol bytes, so two words cut
    from different places of an array are equal iff their contents are.
    """

    __slots__ = ("side", "d", "symbols", "key")

    def __init__(self, side: int, d: int, symbols):
        symbols = np.asarray(symbols)
        if symbols.ndim != 1 or symbols.size != side ** d:
            raise UsageError(f"a {side}-word in d={d} needs {side ** d} symbols")
        self.side = side
        self.d = d
        self.symbols = symbols
        self.key = symbols.tobytes()

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self.side == other.side and self.d == other.d and self.key == other.key

    def __hash__(self):
        return hash((self.side, self.key))

    def __repr__(self):
        return f"Word(side={self.side}, d={self.d}, {self.symbols.tolist()})"

    def tolist(self) -> list:
        return self.symbols.tolist()

    def as_array(self) -> np.ndarray:
        return self.symbols.reshape((self.side,) * self.d)


@lru_cache(maxsize=None)
def _max_coord(d: int, k: int) -> np.ndarray:
    return np.indices((k,) * d).reshape(d, -1).max(axis=0)


@lru_cache(maxsize=None)
def leading_index(d: int, k: int, l: int) -> np.ndarray:
    """Flat positions of the sites of ``Λ_l`` inside a k-word, lex ordered."""
    return np.flatnonzero(_max_coord(d, k) < l)


@lru_cache(maxsize=None)
def shell_index(d: int, k: int, l: int) -> np.ndarray:
    """Flat positions of ``Λ_k ∖ Λ_l`` inside a k-word, lex ordered."""
    return np.flatnonzero(_max_coord(d, k) >= l)


@lru_cache(maxsize=None)
def layer_index(d: int, k: int, l: int) -> np.ndarray:
    """Flat positions of ``Λ_l ∖ Λ_{l-1}`` inside a k-word (1 <= l <= k)."""
    return np.flatnonzero(_max_coord(d, k) == l - 1)


def extract(x: GridArray, b: Box) -> Word:
    if b.d != x.d:
        raise UsageError("box and array differ in dimension")
    if not b.is_cube:
        raise UsageError("only cubical boxes can be extracted as words")
    if any(o + e > n for o, e, n in zip(b.origin, b.extents, x.extents)):
        raise UsageError(f"box {b} outside array of extents {x.extents}")
    return Word(b.side, x.d, x.data[b.slices].reshape(-1))


def leading_subword(w: Word, l: int) -> Word:
    if not 1 <= l <= w.side:
        raise UsageError(f"leading sub-word side {l} not in 1..{w.side}")
    if l == w.side:
        return w
    return Word(l, w.d, w.symbols[leading_index(w.d, w.side, l)])


def shell(w: Word, l: int) -> list:
    """Symbols of ``w`` outside its leading l-sub-word, lex ordered."""
    if not 0 <= l <= w.side:
        raise UsageError(f"shell depth {l} not in 0..{w.side}")
    return w.symbols[shell_index(w.d, w.side, l)].tolist()


# --- raw and PGM files -------------------------------------------------------


def read_raw(path, extents, alphabet: Alphabet | int) -> GridArray:
    """Headerless dump, one symbol per byte (two bytes little-endian if A > 256)."""
    if isinstance(alphabet, int):
        alphabet = Alphabet(alphabet)
    dtype = np.dtype(alphabet.dtype).newbyteorder("<")
    raw = Path(path).read_bytes()
    count = int(np.prod(extents))
    if len(raw) != count * dtype.itemsize:
        raise UsageError(f"{path}: expected {count * dtype.itemsize} bytes, got {len(raw)}")
    return GridArray(np.frombuffer(raw, dtype=dtype).reshape(extents), alphabet)


def write_raw(path, x: GridArray) -> None:
    dtype = np.dtype(x.alphabet.dtype).newbyteorder("<")
    Path(path).write_bytes(x.data.astype(dtype).tobytes())


_PGM_HEADER = re.compile(rb"P5(?:\s|#[^\n]*\n)+(\d+)(?:\s|#[^\n]*\n)+(\d+)(?:\s|#[^\n]*\n)+(\d+)\s")


def parse_pgm(raw: bytes) -> np.ndarray:
    m = _PGM_HEADER.match(raw)
    if not m:
        raise UsageError("not a binary (P5) PGM file")
    width, height, maxval = (int(g) for g in m.groups())
    if maxval > 255:
        raise UsageError("16-bit PGM is not supported")
    body = raw[m.end():]
    if len(body) < width * height:
        raise UsageError("PGM pixel data truncated")
    return np.frombuffer(body[: width * height], dtype=np.uint8).reshape(height, width)


def read_pgm(path, alphabet: int = 2) -> GridArray:
    """Read a P5 image; with ``alphabet=2`` pixels >= 128 become symbol 1."""
    pixels = parse_pgm(Path(path).read_bytes())
    if alphabet == 2:
        return GridArray((pixels >= 128).astype(np.uint8), 2)
    if alphabet != 256:
        raise UsageError("PGM input supports alphabet 2 (binarized) or 256")
    return GridArray(pixels, 256)


def pgm_bytes(pixels: np.ndarray) -> bytes:
    height, width = pixels.shape
    return b"P5\n%d %d\n255\n" % (width, height) + np.asarray(pixels, dtype=np.uint8).tobytes()


def write_pgm(path, x: GridArray) -> None:
    if x.d != 2:
        raise UsageError("PGM output needs a 2-dimensional array")
    if x.alphabet.size == 2:
        pixels = x.data.astype(np.uint8) * 255
    elif x.alphabet.size <= 256:
        pixels = x.data
    else:
        raise UsageError("PGM output supports alphabets up to 256")
    Path(path).write_bytes(pgm_bytes(pixels))
