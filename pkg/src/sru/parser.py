"""Sequential recurrence-based parser.

The parser grows the parsed cube ``Λ_m`` ring by ring. Each ring is cut into
k-blocks; after every ring the recurrence ratio of the current block size is
checked and the size is bumped once enough of its words have repeated.

The same state machine drives the encoder and the decoder: the only input it
needs besides geometry is the word under each block, supplied through a
``fetch(block, index)`` callback. The encoder reads words from the array, the
decoder reconstructs them from the bitstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .errors import SealedStreamError, UsageError
from .grid import Alphabet, GridArray, Word, extract
from .lattice import Box, flush_blocks, ring_blocks, ring_region
from .trie import LeadingWordTrie

MAX_PHI_TERM = 2 ** 16 - 1


@dataclass(frozen=True)
class Threshold:
    """Recurrence threshold as an exact fraction num/den in (0, 1)."""

    num: int
    den: int

    def __post_init__(self):
        if not (0 < self.num < self.den <= MAX_PHI_TERM):
            raise UsageError(f"threshold must satisfy 0 < {self.num}/{self.den} < 1 "
                             f"with terms <= {MAX_PHI_TERM}")

    @classmethod
    def parse(cls, text: str) -> "Threshold":
        try:
            num, den = text.split("/")
            return cls(int(num), int(den))
        except ValueError as exc:
            raise UsageError(f"bad threshold {text!r}, expected P/Q") from exc

    def __str__(self):
        return f"{self.num}/{self.den}"

    def exceeds(self, repeated: int, blocks: int) -> bool:
        """True iff repeated/blocks >= phi; an empty size never exceeds."""
        return blocks > 0 and repeated * self.den >= self.num * blocks


@dataclass
class SizeStats:
    blocks: int = 0
    repeated: int = 0
    counts: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ParsedBlockEvent:
    index: int
    block: Box
    word: Word
    match_side: int
    back_ref: Optional[int]


@dataclass
class ParseState:
    d: int
    alphabet: Alphabet
    phi: Threshold
    m: int = 0
    k: int = 1
    sizes: dict = field(default_factory=dict)
    word_log: list = field(default_factory=list)
    trie: LeadingWordTrie = field(default_factory=LeadingWordTrie)
    sealed: bool = False

    def __post_init__(self):
        if isinstance(self.alphabet, int):
            self.alphabet = Alphabet(self.alphabet)
        if isinstance(self.phi, str):
            self.phi = Threshold.parse(self.phi)

    def stats(self, s: int) -> SizeStats:
        st = self.sizes.get(s)
        if st is None:
            st = self.sizes[s] = SizeStats()
        return st


def recurrence_ratio(state: ParseState, k: int) -> Fraction:
    """Fraction of parsed k-blocks whose word occurs at least twice; 0 if none."""
    st = state.sizes.get(k)
    if st is None or st.blocks == 0:
        return Fraction(0)
    return Fraction(st.repeated, st.blocks)


def _fetcher(state: ParseState, x, n: int) -> Callable:
    if callable(x) and not isinstance(x, GridArray):
        return x
    if not isinstance(x, GridArray):
        raise UsageError("parser input must be a GridArray or a fetch callback")
    if x.d != state.d:
        raise UsageError(f"array has d={x.d}, parser expects d={state.d}")
    if x.alphabet != state.alphabet:
        raise UsageError("alphabet mismatch between array and parser")
    if any(e < n for e in x.extents):
        raise UsageError(f"array of extents {x.extents} does not cover Λ_{n}")
    return lambda box, index: extract(x, box)


def _parse_block(state: ParseState, box: Box, fetch: Callable) -> ParsedBlockEvent:
    index = len(state.word_log) + 1
    word = fetch(box, index)
    l, p = state.trie.match_and_insert(word, index)
    st = state.stats(word.side)
    c = st.counts.get(word, 0) + 1
    st.counts[word] = c
    st.blocks += 1
    if c == 2:
        st.repeated += 2
    elif c > 2:
        st.repeated += 1
    state.word_log.append((index, box, word))
    return ParsedBlockEvent(index, box, word, l, p if l else None)


def advance(state: ParseState, x, n: int) -> list:
    """Parse whole rings while one of the current size still fits in ``Λ_n``.

    Sites of ``Λ_n ∖ Λ_m`` that are left over stay pending until more data
    arrives or :func:`flush` is called.
    """
    if state.sealed:
        raise SealedStreamError("stream was flushed; it cannot be extended")
    if n < state.m:
        raise UsageError(f"n={n} is smaller than the parsed extent m={state.m}")
    fetch = _fetcher(state, x, n)
    events = []
    while state.m <= n - state.k:
        k = state.k
        st = state.sizes.get(k)
        if st is not None and state.phi.exceeds(st.repeated, st.blocks):
            state.k = k + 1
            continue
        ring = ring_region(state.m, k)
        for box in ring_blocks(ring, state.d):
            events.append(_parse_block(state, box, fetch))
        state.m = ring.outer
    return events


def flush(state: ParseState, x, n: int) -> list:
    """Cover the leftover ``Λ_n ∖ Λ_m`` with blocks of side ``n - m`` and seal."""
    if state.m == n:
        return []
    if state.sealed:
        raise SealedStreamError("stream already flushed")
    if state.m > n or state.m <= n - state.k:
        raise UsageError("flush must follow advance() for the same n")
    fetch = _fetcher(state, x, n)
    events = [_parse_block(state, box, fetch) for box in flush_blocks(state.m, n, state.d)]
    state.m = n
    state.sealed = True
    return events


def parse(x: GridArray, phi: Threshold | str, n: int | None = None, final: bool = True) -> tuple:
    """Run a fresh parser over ``Λ_n`` of ``x``; returns ``(state, events)``."""
    if n is None:
        n = x.extents[0]
    state = ParseState(x.d, x.alphabet, phi)
    events = advance(state, x, n)
    if final:
        events += flush(state, x, n)
    return state, events
