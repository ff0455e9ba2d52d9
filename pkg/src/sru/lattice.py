"""Integer-lattice geometry: sites, cubical boxes, rings and block tilings.

Sites are plain tuples of non-negative ints. Every ordering in this package
is the lexicographic order on sites, which coincides with row-major order of
a numpy array indexed by the same tuple.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import UsageError

MAX_DIMS = 8

Site = tuple


def lex_compare(a: Sequence[int], b: Sequence[int]) -> int:
    """Return -1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    if len(a) != len(b):
        raise UsageError(f"dimension mismatch: {len(a)} vs {len(b)}")
    for u, v in zip(a, b):
        if u != v:
            return -1 if u < v else 1
    return 0


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``origin + [0, extents)``."""

    origin: tuple
    extents: tuple

    def __post_init__(self):
        if len(self.origin) != len(self.extents):
            raise UsageError("origin and extents differ in dimension")
        if not 1 <= len(self.origin) <= MAX_DIMS:
            raise UsageError(f"dimension must be in 1..{MAX_DIMS}")
        if any(c < 0 for c in self.origin):
            raise UsageError("negative coordinate in box origin")
        if any(e < 1 for e in self.extents):
            raise UsageError("box extents must be positive")

    @classmethod
    def cube(cls, origin: Sequence[int], side: int) -> "Box":
        origin = tuple(origin)
        return cls(origin, (side,) * len(origin))

    @classmethod
    def lambda_n(cls, n: int, d: int) -> "Box":
        """The box {0..n-1}^d."""
        return cls((0,) * d, (n,) * d)

    @property
    def d(self) -> int:
        return len(self.origin)

    @property
    def volume(self) -> int:
        v = 1
        for e in self.extents:
            v *= e
        return v

    @property
    def is_cube(self) -> bool:
        return len(set(self.extents)) == 1

    @property
    def side(self) -> int:
        if not self.is_cube:
            raise UsageError("box is not cubical")
        return self.extents[0]

    @property
    def slices(self) -> tuple:
        return tuple(slice(o, o + e) for o, e in zip(self.origin, self.extents))

    def contains(self, other: "Box") -> bool:
        return all(
            o <= p and p + f <= o + e
            for o, e, p, f in zip(self.origin, self.extents, other.origin, other.extents)
        )


@dataclass(frozen=True)
class RingRegion:
    """The shell ``Λ_outer ∖ Λ_inner`` with ``outer - inner == block_size``."""

    inner: int
    outer: int
    block_size: int

    def __post_init__(self):
        k = self.block_size
        if k < 1 or self.inner < 0 or self.outer - self.inner != k or self.inner % k:
            raise UsageError(f"invalid ring {self}")

    def block_count(self, d: int) -> int:
        q = self.inner // self.block_size
        return (q + 1) ** d - q ** d


def ring_region(m: int, k: int) -> RingRegion:
    """Ring parsed by one iteration at parsed extent ``m`` with block size ``k``.

    The inner radius is rounded down to a multiple of ``k``, so the ring can
    reach back into the already parsed ``Λ_m`` right after ``k`` has grown.
    """
    if m < 0 or k < 1:
        raise UsageError("ring_region needs m >= 0 and k >= 1")
    inner = (m // k) * k
    return RingRegion(inner, inner + k, k)


def ring_blocks(r: RingRegion, d: int) -> list:
    """Disjoint k-blocks exactly tiling ``r``, in lex order of their origins."""
    k = r.block_size
    q = r.inner // k
    blocks = []
    for idx in itertools.product(range(q + 1), repeat=d):
        # blocks of the ring are those touching the outermost layer q
        if q in idx:
            blocks.append(Box.cube(tuple(i * k for i in idx), k))
    return blocks


def flush_blocks(m: int, n: int, d: int) -> list:
    """Cover ``Λ_n ∖ Λ_m`` with cubes of side ``n - m``, lex ordered.

    Every cube has at least one coordinate equal to ``m``, so none of them
    reaches into ``Λ_m``. Along the remaining axes ``[0, m)`` is covered by
    regular tiles plus one tile flush against ``m`` when ``n - m`` does not
    divide ``m``; in that case neighbouring cubes of this cover overlap.
    """
    if not 0 <= m < n:
        raise UsageError("flush needs 0 <= m < n")
    k = n - m
    inner = list(range(0, m - k + 1, k))
    if m % k and m >= k:
        inner.append(m - k)
    elif m and m < k:
        inner = [0]
    positions = inner + [m]
    blocks = []
    for idx in itertools.product(positions, repeat=d):
        if m in idx:
            blocks.append(Box.cube(idx, k))
    return blocks


def sites_of(b: Box) -> Iterator[tuple]:
    """All sites of ``b`` in lexicographic order."""
    return itertools.product(*(range(o, o + e) for o, e in zip(b.origin, b.extents)))
