"""Empirical non-overlapping k-block statistics and base-A entropies."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import UsageError
from .grid import Alphabet, GridArray, Word


@dataclass
class EmpiricalDistribution:
    k: int
    d: int
    total_blocks: int
    counts: Counter = field(default_factory=Counter)

    def probabilities(self) -> dict:
        """Exact relative frequencies."""
        return {w: Fraction(c, self.total_blocks) for w, c in self.counts.items()}

    @property
    def distinct(self) -> int:
        return len(self.counts)

    def entropy(self, alphabet: Alphabet | int) -> float:
        return entropy(self, alphabet)


def block_matrix(x: GridArray, k: int) -> np.ndarray:
    """Rows are the k-words of the regular k-block parsing at offset 0.

    Rows appear in lex order of the block origins.
    """
    if not x.is_cube:
        raise UsageError("empirical distribution needs a cubical array")
    n, d = x.extents[0], x.d
    if not 1 <= k <= n:
        raise UsageError(f"block side {k} not in 1..{n}")
    q = n // k
    a = x.data[(slice(0, q * k),) * d]
    # (q, k, q, k, ...) -> (q, q, ..., k, k, ...)
    a = a.reshape(sum(((q, k) for _ in range(d)), ()))
    a = a.transpose(tuple(range(0, 2 * d, 2)) + tuple(range(1, 2 * d, 2)))
    return a.reshape(q ** d, k ** d)


def empirical_distribution(x: GridArray, k: int) -> EmpiricalDistribution:
    rows = block_matrix(x, k)
    uniq, counts = np.unique(rows, axis=0, return_counts=True)
    table = Counter({Word(k, x.d, row.copy()): int(c) for row, c in zip(uniq, counts)})
    return EmpiricalDistribution(k, x.d, rows.shape[0], table)


def entropy_from_counts(counts, base: int) -> float:
    """-sum p log_base p for the distribution proportional to ``counts``."""
    counts = [c for c in counts if c > 0]
    total = sum(counts)
    if total == 0:
        raise UsageError("entropy of an empty distribution")
    h = math.log(total) - math.fsum(c * math.log(c) for c in counts) / total
    return max(0.0, h / math.log(base))


def entropy(dist: EmpiricalDistribution, alphabet: Alphabet | int) -> float:
    size = alphabet.size if isinstance(alphabet, Alphabet) else alphabet
    return entropy_from_counts(dist.counts.values(), size)


def per_site_entropy(x: GridArray, k: int) -> float:
    """Empirical k-block entropy divided by k**d, in A-ary symbols per site."""
    dist = empirical_distribution(x, k)
    return entropy(dist, x.alphabet) / k ** x.d


def choose_k(n: int, d: int, A: int) -> int:
    """Largest k >= 1 with k**d <= log_A(n**d), computed in exact integers."""
    if n < 2:
        raise UsageError("choose_k needs n >= 2")
    k = 1
    while A ** ((k + 1) ** d) <= n ** d:
        k += 1
    return k
