"""Slow reference implementations used to cross-check the package."""

import itertools
import math
from collections import Counter


def naive_block_counts(a, k):
    """Count k-words of the regular parsing by walking sites one at a time."""
    n, d = a.shape[0], a.ndim
    q = n // k
    counts = Counter()
    for r in itertools.product(range(q), repeat=d):
        word = tuple(int(a[tuple(ri * k + si for ri, si in zip(r, s))])
                     for s in itertools.product(range(k), repeat=d))
        counts[word] += 1
    return counts


def binary_entropy(p):
    if p in (0, 1):
        return 0.0
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def leading(w, l):
    """Leading l-sub-word of a word array, as a tuple."""
    return tuple(w[(slice(0, l),) * w.ndim].reshape(-1).tolist())


def brute_longest_match(log, w):
    """Scan earlier word arrays for the deepest shared leading sub-word.

    Ties at the deepest level resolve to the earliest word (1-based index).
    """
    for l in range(w.shape[0], 0, -1):
        target = leading(w, l)
        for j, v in enumerate(log, 1):
            if v.shape[0] >= l and leading(v, l) == target:
                return l, j
    return 0, None


def coverage(events, n, d):
    """How many emitted blocks cover each site of Λ_n."""
    import numpy as np

    depth = np.zeros((n,) * d, dtype=int)
    for e in events:
        depth[e.block.slices] += 1
    return depth


def recount(events):
    """(blocks_s, repeated_s) per size, from the event list alone."""
    per_size = {}
    for e in events:
        per_size.setdefault(e.word.side, Counter())[e.word.key] += 1
    out = {}
    for s, c in per_size.items():
        out[s] = (sum(c.values()), sum(v for v in c.values() if v >= 2))
    return out


def random_grid(rng, d, n, A, p=None):
    """Uniform symbols, or Bernoulli(p) bits when ``p`` is given."""
    import numpy as np
    from sru.grid import GridArray

    if p is not None:
        data = (rng.random((n,) * d) < p).astype(np.int64)
    else:
        data = rng.integers(0, A, (n,) * d)
    return GridArray(data, A)


def expected_payload_bits(events, d, A, pointers):
    """Event-section length rebuilt from the layout rules and a brute-force word scan."""
    sym = math.ceil(math.log2(A))
    total = 0
    arrays = []
    for e in events:
        k, l, i = e.word.side, e.match_side, e.index
        total += math.ceil(math.log2(k + 1)) + (k ** d - l ** d) * sym
        if l:
            if pointers == "index":
                count = i - 1
            else:
                count = len({leading(a, l) for a in arrays if a.shape[0] >= l})
            total += math.ceil(math.log2(count)) if count > 1 else 0
        arrays.append(e.word.as_array())
    return total
