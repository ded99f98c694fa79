"""Domain types shared across the package and the three reward functions."""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

NORM_TOL = 1e-9


class DomainError(ValueError):
    """Raised when an argument falls outside its valid domain."""


@dataclass(frozen=True)
class NumberLine:
    lo: int = 1
    hi: int = 20

    def __post_init__(self):
        if self.lo != 1:
            raise DomainError(f"number line must start at 1, got {self.lo}")
        if self.hi < self.lo:
            raise DomainError(f"empty number line [{self.lo}, {self.hi}]")

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    @property
    def numbers(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def __contains__(self, n) -> bool:
        return self.lo <= n <= self.hi

    def index(self, n: int) -> int:
        if n not in self:
            raise DomainError(f"{n} is outside [{self.lo}, {self.hi}]")
        return int(n) - self.lo


@dataclass(frozen=True)
class Vocabulary:
    size: int = 10

    def __post_init__(self):
        if self.size < 1:
            raise DomainError("vocabulary needs at least one word")


class RewardKind(enum.Enum):
    LINEAR = "linear"
    INVERSE = "inverse"
    EXPONENTIAL = "exp"

    @classmethod
    def parse(cls, value) -> "RewardKind":
        if isinstance(value, cls):
            return value
        key = str(value).lower()
        aliases = {"exponential": "exp"}
        return cls(aliases.get(key, key))


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class NeedPrior:
    """Need probability p(n) over the number line."""

    probs: np.ndarray

    def __post_init__(self):
        p = _frozen(self.probs)
        if p.ndim != 1 or p.size == 0:
            raise DomainError("prior must be a non-empty vector")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise DomainError("prior entries must be finite and non-negative")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise DomainError(f"prior sums to {p.sum():.12g}, not 1")
        object.__setattr__(self, "probs", p)

    @classmethod
    def normalized(cls, weights) -> "NeedPrior":
        w = np.asarray(weights, dtype=np.float64)
        return cls(w / w.sum())

    def __len__(self):
        return self.probs.size

    def entropy(self, base: float = 2.0) -> float:
        return entropy(self.probs, base)


@dataclass(frozen=True, eq=False)
class NamingDistribution:
    """Row-stochastic p(w|n): one row per number, one column per word."""

    rows: np.ndarray

    def __post_init__(self):
        r = _frozen(self.rows)
        if r.ndim != 2:
            raise DomainError("naming distribution must be a matrix")
        if np.any(r < 0) or not np.all(np.isfinite(r)):
            raise DomainError("naming entries must be finite and non-negative")
        bad = np.abs(r.sum(axis=1) - 1.0) > NORM_TOL
        if np.any(bad):
            raise DomainError(f"rows {np.flatnonzero(bad).tolist()} do not sum to 1")
        object.__setattr__(self, "rows", r)

    @property
    def n_numbers(self) -> int:
        return self.rows.shape[0]

    @property
    def n_words(self) -> int:
        return self.rows.shape[1]

    @classmethod
    def normalized(cls, weights) -> "NamingDistribution":
        w = np.asarray(weights, dtype=np.float64)
        return cls(w / w.sum(axis=1, keepdims=True))

    @classmethod
    def from_assignment(cls, assignment, n_words: int | None = None) -> "NamingDistribution":
        a = np.asarray(assignment, dtype=int)
        k = int(a.max()) + 1 if n_words is None else n_words
        rows = np.zeros((a.size, k))
        rows[np.arange(a.size), a] = 1.0
        return cls(rows)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n"] + [f"w{k}" for k in range(self.n_words)])
        for i, row in enumerate(self.rows):
            writer.writerow([i + 1] + [repr(float(v)) for v in row])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "NamingDistribution":
        text = Path(source).read_text() if not _looks_like_csv(source) else source
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if header[0] != "n" or any(h != f"w{k}" for k, h in enumerate(header[1:])):
            raise DomainError(f"bad naming header {header}")
        rows = [[float(v) for v in line[1:]] for line in reader if line]
        return cls(np.array(rows))


def _looks_like_csv(source) -> bool:
    return isinstance(source, str) and "\n" in source


@dataclass(frozen=True, eq=False)
class NumeralSystem:
    """Exact partition of the number line; assignment[i] is the word for number i+1."""

    assignment: np.ndarray = field()

    def __post_init__(self):
        a = np.array(self.assignment, dtype=np.int64)
        if a.ndim != 1 or np.any(a < 0):
            raise DomainError("assignment must be a vector of word indices")
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)

    @property
    def term_count(self) -> int:
        return int(np.unique(self.assignment).size)

    def __len__(self):
        return self.assignment.size

    def __eq__(self, other):
        return isinstance(other, NumeralSystem) and np.array_equal(
            self.assignment, other.assignment
        )

    def __hash__(self):
        return hash(self.assignment.tobytes())

    def canonical(self) -> "NumeralSystem":
        """Relabel words in order of their smallest number."""
        _, first = np.unique(self.assignment, return_index=True)
        order = self.assignment[np.sort(first)]
        relabel = {int(w): k for k, w in enumerate(order)}
        return NumeralSystem([relabel[int(w)] for w in self.assignment])

    def cells(self) -> list[np.ndarray]:
        """Index arrays of each cell, ordered by smallest member."""
        canon = self.canonical().assignment
        return [np.flatnonzero(canon == k) for k in range(self.term_count)]

    def naming(self, n_words: int | None = None) -> NamingDistribution:
        return NamingDistribution.from_assignment(self.assignment, n_words)


def entropy(p, base: float = 2.0) -> float:
    p = np.asarray(p, dtype=np.float64)
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum() / np.log(base))


def reward(kind, n, n_hat, line: NumberLine = NumberLine()):
    """Shared reward for guessing ``n_hat`` when the target was ``n``.

    Works elementwise on arrays; scalars in give a float out.
    """
    kind = RewardKind.parse(kind)
    n_arr = np.asarray(n)
    h_arr = np.asarray(n_hat)
    for a in (n_arr, h_arr):
        if np.any(a < line.lo) or np.any(a > line.hi):
            raise DomainError(f"number outside [{line.lo}, {line.hi}]")
    d = np.abs(n_arr - h_arr).astype(np.float64)
    if kind is RewardKind.LINEAR:
        r = 1.0 - d / line.size
    elif kind is RewardKind.INVERSE:
        r = 1.0 / (1.0 + d)
    else:
        r = np.exp(-d)
    return float(r) if r.ndim == 0 else r
