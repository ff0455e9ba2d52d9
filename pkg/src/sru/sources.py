"""Synthetic ergodic sources with closed-form entropy rates.

Randomness comes from numpy's Philox generator (a counter-based 64-bit
PRNG) seeded through ``SeedSequence``, so arrays are reproducible across
platforms for a given spec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import UsageError
from .grid import Alphabet, GridArray

KINDS = ("iid", "markov-product", "constant")
_TOL = 1e-12


@dataclass(frozen=True)
class SourceSpec:
    kind: str
    d: int = 2
    A: int = 2
    n: int = 64
    seed: int = 0
    probs: tuple = ()
    matrix: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown source kind {self.kind!r}")
        Alphabet(self.A)
        if not 1 <= self.d <= 8 or self.n < 0:
            raise UsageError("source needs 1 <= d <= 8 and n >= 0")
        if self.kind == "iid":
            _check_row(self.probs, self.A, "probs")
        elif self.kind == "markov-product":
            if len(self.matrix) != self.A:
                raise UsageError(f"transition matrix needs {self.A} rows")
            for row in self.matrix:
                _check_row(row, self.A, "matrix row")

    def with_n(self, n: int, seed: int | None = None) -> "SourceSpec":
        return replace(self, n=n, seed=self.seed if seed is None else seed)


def _check_row(row, A: int, what: str) -> None:
    if len(row) != A or any(p < 0 for p in row) or abs(math.fsum(row) - 1.0) > _TOL:
        raise UsageError(f"{what} must be {A} non-negative numbers summing to 1")


def uniform(A: int = 2, **kw) -> SourceSpec:
    return SourceSpec("iid", A=A, probs=(1.0 / A,) * A, **kw)


def bernoulli(p: float, **kw) -> SourceSpec:
    return SourceSpec("iid", A=2, probs=(1.0 - p, p), **kw)


def constant(**kw) -> SourceSpec:
    return SourceSpec("constant", **kw)


def generator(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def stationary(matrix) -> np.ndarray:
    """Stationary distribution of a row-stochastic matrix (left Perron vector)."""
    P = np.asarray(matrix, dtype=float)
    vals, vecs = np.linalg.eig(P.T)
    v = np.real(vecs[:, np.argmin(np.abs(vals - 1.0))])
    return v / v.sum()


def _draw(rng, cdf: np.ndarray, size) -> np.ndarray:
    u = rng.random(size)
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)


def sample(spec: SourceSpec) -> GridArray:
    shape = (spec.n,) * spec.d
    if spec.kind == "constant":
        return GridArray(np.zeros(shape, dtype=np.int64), spec.A)
    rng = generator(spec.seed)
    if spec.kind == "iid":
        return GridArray(_draw(rng, np.cumsum(spec.probs), shape), spec.A)
    # independent stationary chains along axis 0
    P = np.asarray(spec.matrix, dtype=float)
    cdfs = np.cumsum(P, axis=1)
    out = np.empty(shape, dtype=np.int64)
    if spec.n == 0:
        return GridArray(out, spec.A)
    line_shape = shape[1:]
    out[0] = _draw(rng, np.cumsum(stationary(P)), line_shape)
    for t in range(1, spec.n):
        u = rng.random(line_shape)
        prev = out[t - 1]
        out[t] = (u[..., None] >= cdfs[prev]).sum(axis=-1).clip(max=spec.A - 1)
    return GridArray(out, spec.A)


def _h(row, A: int) -> float:
    return -math.fsum(p * math.log(p) for p in row if p > 0) / math.log(A)


def entropy_rate(spec: SourceSpec) -> float:
    """Per-site entropy rate in A-ary symbols."""
    if spec.kind == "constant":
        return 0.0
    if spec.kind == "iid":
        return _h(spec.probs, spec.A)
    pi = stationary(spec.matrix)
    return math.fsum(pi[i] * _h(row, spec.A) for i, row in enumerate(spec.matrix))


# --- text form ---------------------------------------------------------------

_INT_KEYS = {"d": "d", "dims": "d", "A": "A", "alphabet": "A", "n": "n", "size": "n", "seed": "seed"}


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(","))


def parse_spec(text: str, **overrides) -> SourceSpec:
    """Parse ``key=value`` pairs separated by whitespace, newlines or ``;``.

    Keys: kind, d, A, n, seed, probs (comma list), p (Bernoulli shortcut),
    matrix (rows separated by ``/``). ``#`` starts a comment.
    """
    fields = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        for item in line.replace(";", " ").split():
            if "=" not in item:
                raise UsageError(f"expected key=value, got {item!r}")
            key, value = item.split("=", 1)
            if key not in _INT_KEYS and key not in ("kind", "probs", "p", "matrix"):
                raise UsageError(f"unknown source key {key!r}")
            try:
                if key in _INT_KEYS:
                    fields[_INT_KEYS[key]] = int(value)
                elif key == "kind":
                    fields["kind"] = value
                elif key == "probs":
                    fields["probs"] = _floats(value)
                elif key == "p":
                    p = float(value)
                    fields["probs"] = (1.0 - p, p)
                elif key == "matrix":
                    fields["matrix"] = tuple(_floats(r) for r in value.split("/"))
            except ValueError as exc:
                raise UsageError(f"bad value for {key}: {value!r}") from exc
    fields.update({k: v for k, v in overrides.items() if v is not None})
    if "kind" not in fields:
        raise UsageError("source spec needs kind=")
    if fields["kind"] == "iid" and "probs" not in fields:
        A = fields.get("A", 2)
        fields["probs"] = (1.0 / A,) * A
    return SourceSpec(**fields)


def load_spec(arg: str, **overrides) -> SourceSpec:
    """``arg`` is a path to a key=value file or the pairs themselves."""
    path = Path(arg)
    if path.is_file():
        return parse_spec(path.read_text(), **overrides)
    return parse_spec(arg, **overrides)
