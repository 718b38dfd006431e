"""Streaming tally of joint decision patterns for an ensemble of binary classifiers.

Decisions are stored as ``uint8`` codes, 0 for alpha and 1 for beta.  A pattern
of ``n`` decisions maps to the integer whose binary digits are the codes with
classifier 1 as the most significant bit, which is exactly lexicographic order
with alpha < beta.
"""
from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import EmptySketchError, IncompatibleSketchError, MalformedInputError

SKETCH_VERSION = 1


class Label(enum.IntEnum):
    ALPHA = 0
    BETA = 1

    @property
    def other(self) -> "Label":
        return Label(1 - self)

    @classmethod
    def parse(cls, token) -> "Label":
        if isinstance(token, Label):
            return token
        if isinstance(token, (int, np.integer)) and token in (0, 1):
            return cls(int(token))
        if isinstance(token, str):
            key = token.strip().lower()
            if key in ("alpha", "a", "α"):
                return cls.ALPHA
            if key in ("beta", "b", "β"):
                return cls.BETA
        raise MalformedInputError(f"not a label: {token!r}")


ALPHA, BETA = Label.ALPHA, Label.BETA


def patterns(n: int) -> list[tuple[Label, ...]]:
    """All 2**n patterns in index order."""
    return [tuple(Label(b) for b in bits) for bits in itertools.product((0, 1), repeat=n)]


def pattern_index(pattern: Sequence) -> int:
    idx = 0
    for label in pattern:
        idx = (idx << 1) | int(Label.parse(label))
    return idx


def pattern_name(pattern: Sequence) -> str:
    return "".join("a" if Label.parse(x) == ALPHA else "b" for x in pattern)


@dataclass(frozen=True, eq=False)
class DecisionStream:
    """Aligned per-item decisions of ``n`` classifiers, optionally with truth labels.

    ``decisions`` has shape ``(rows, n)``; ``truth`` is ``None`` or shape ``(rows,)``.
    """

    n: int
    decisions: np.ndarray
    truth: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.n < 1:
            raise MalformedInputError("ensemble size must be at least 1")
        dec = np.asarray(self.decisions, dtype=np.uint8)
        if dec.size == 0:
            dec = dec.reshape(0, self.n)
        if dec.ndim != 2 or dec.shape[1] != self.n:
            raise MalformedInputError(f"decisions must have shape (rows, {self.n}), got {dec.shape}")
        if dec.size and dec.max() > 1:
            raise MalformedInputError("decision codes must be 0 (alpha) or 1 (beta)")
        object.__setattr__(self, "decisions", dec)
        if self.truth is not None:
            tr = np.asarray(self.truth, dtype=np.uint8).reshape(-1)
            if tr.shape[0] != dec.shape[0]:
                raise MalformedInputError("truth column length differs from decisions")
            if tr.size and tr.max() > 1:
                raise MalformedInputError("truth codes must be 0 (alpha) or 1 (beta)")
            object.__setattr__(self, "truth", tr)

    @classmethod
    def from_rows(cls, rows: Iterable, n: Optional[int] = None, truth: Optional[Iterable] = None):
        """Build from per-row label sequences, checking every row has length ``n``."""
        rows = list(rows)
        if n is None:
            if not rows:
                raise MalformedInputError("cannot infer n from an empty stream")
            n = len(rows[0])
        codes = np.empty((len(rows), n), dtype=np.uint8)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise MalformedInputError(f"row {i} has {len(row)} decisions, expected {n}")
            codes[i] = [int(Label.parse(x)) for x in row]
        tr = None
        if truth is not None:
            tr = [int(Label.parse(x)) for x in truth]
        return cls(n, codes, None if tr is None else np.asarray(tr, dtype=np.uint8))

    def __len__(self) -> int:
        return self.decisions.shape[0]

    @property
    def has_truth(self) -> bool:
        return self.truth is not None

    def project(self, columns: Sequence[int]) -> "DecisionStream":
        cols = list(columns)
        return DecisionStream(len(cols), self.decisions[:, cols], self.truth)

    def concat(self, other: "DecisionStream") -> "DecisionStream":
        if other.n != self.n:
            raise MalformedInputError("cannot concatenate streams of different ensemble size")
        if self.has_truth != other.has_truth:
            raise MalformedInputError("truth must be present in both streams or neither")
        truth = None if self.truth is None else np.concatenate([self.truth, other.truth])
        return DecisionStream(self.n, np.vstack([self.decisions, other.decisions]), truth)


@dataclass(frozen=True)
class PatternSketch:
    """Fixed-size sketch: one counter per joint pattern plus a total."""

    n: int
    counts: tuple[int, ...]
    total: int = field(default=-1)

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != 1 << self.n:
            raise MalformedInputError(f"expected {1 << self.n} counters for n={self.n}, got {len(counts)}")
        if any(c < 0 for c in counts):
            raise MalformedInputError("counters must be non-negative")
        object.__setattr__(self, "counts", counts)
        total = sum(counts)
        if self.total == -1:
            object.__setattr__(self, "total", total)
        elif self.total != total:
            raise MalformedInputError(f"total {self.total} does not equal sum of counts {total}")

    @classmethod
    def empty(cls, n: int) -> "PatternSketch":
        return cls(n, (0,) * (1 << n))

    def count(self, pattern: Sequence) -> int:
        return self.counts[pattern_index(pattern)]

    def frequencies(self) -> tuple[Fraction, ...]:
        return frequencies(self)

    def marginal(self, columns: Sequence[int]) -> "PatternSketch":
        """Counts of the sub-ensemble ``columns``, kept in the given column order."""
        cols = list(columns)
        if len(set(cols)) != len(cols) or any(not 0 <= c < self.n for c in cols):
            raise MalformedInputError(f"bad column selection {cols} for n={self.n}")
        cube = np.asarray(self.counts, dtype=np.int64).reshape((2,) * self.n)
        others = tuple(i for i in range(self.n) if i not in cols)
        reduced = cube.sum(axis=others) if others else cube
        kept = [c for c in range(self.n) if c in cols]
        reduced = np.transpose(reduced, [kept.index(c) for c in cols])
        return PatternSketch(len(cols), tuple(int(x) for x in reduced.reshape(-1)))

    def to_dict(self) -> dict:
        return {
            "version": SKETCH_VERSION,
            "n": self.n,
            "labels": ["alpha", "beta"],
            "order": "lexicographic",
            "counts": list(self.counts),
            "total": self.total,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PatternSketch":
        if doc.get("version") != SKETCH_VERSION:
            raise MalformedInputError(f"unsupported sketch version {doc.get('version')!r}")
        if doc.get("order", "lexicographic") != "lexicographic":
            raise MalformedInputError(f"unsupported pattern order {doc.get('order')!r}")
        if list(doc.get("labels", ["alpha", "beta"])) != ["alpha", "beta"]:
            raise MalformedInputError("sketch labels must be ['alpha', 'beta']")
        try:
            return cls(int(doc["n"]), doc["counts"], int(doc["total"]))
        except KeyError as exc:
            raise MalformedInputError(f"sketch document missing field {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "PatternSketch":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"sketch is not valid JSON: {exc}") from None
        return cls.from_dict(doc)


def tally(stream: DecisionStream) -> PatternSketch:
    n = stream.n
    if len(stream) == 0:
        return PatternSketch.empty(n)
    weights = (1 << np.arange(n - 1, -1, -1)).astype(np.int64)
    idx = stream.decisions.astype(np.int64) @ weights
    counts = np.bincount(idx, minlength=1 << n)
    return PatternSketch(n, tuple(counts.tolist()))


def merge(a: PatternSketch, b: PatternSketch) -> PatternSketch:
    if a.n != b.n:
        raise IncompatibleSketchError(f"cannot merge sketches with n={a.n} and n={b.n}")
    return PatternSketch(a.n, tuple(x + y for x, y in zip(a.counts, b.counts)), a.total + b.total)


def frequencies(s: PatternSketch) -> tuple[Fraction, ...]:
    """Exact pattern frequencies ``counts / total``."""
    if s.total == 0:
        raise EmptySketchError("sketch is empty; frequencies are undefined")
    return tuple(Fraction(c, s.total) for c in s.counts)
