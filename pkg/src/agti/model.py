"""Exact forward models from ground-truth statistics to pattern frequencies.

All functions work on plain Python numbers, so passing ``Fraction`` values
gives exact rational results and passing floats gives float results.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, MalformedInputError, UndefinedCorrelationError
from .sketch import ALPHA, BETA, DecisionStream, Label, patterns


def _check_unit(name, value):
    if value is None:
        return
    if not isinstance(value, Real) or not 0 <= value <= 1:
        raise DomainError(f"{name}={value!r} is outside [0, 1]")


@dataclass(frozen=True)
class GroundTruthStats:
    """Prevalence of alpha plus per-classifier accuracy on each true label.

    An accuracy is ``None`` when its label never occurs in the sample; 0 is a
    legal accuracy and is never used as a placeholder.
    """

    prevalence: Real
    acc_alpha: tuple
    acc_beta: tuple

    def __post_init__(self):
        object.__setattr__(self, "acc_alpha", tuple(self.acc_alpha))
        object.__setattr__(self, "acc_beta", tuple(self.acc_beta))
        if len(self.acc_alpha) != len(self.acc_beta) or not self.acc_alpha:
            raise MalformedInputError("acc_alpha and acc_beta must be non-empty and equally long")

    @property
    def n(self) -> int:
        return len(self.acc_alpha)

    @property
    def prevalence_beta(self):
        return 1 - self.prevalence

    def accuracy(self, i: int, label: Label):
        return self.acc_alpha[i] if label == ALPHA else self.acc_beta[i]

    def validate(self) -> "GroundTruthStats":
        _check_unit("prevalence", self.prevalence)
        for i, (a, b) in enumerate(zip(self.acc_alpha, self.acc_beta)):
            _check_unit(f"acc_alpha[{i}]", a)
            _check_unit(f"acc_beta[{i}]", b)
        return self

    def mirror(self) -> "GroundTruthStats":
        """Same statistics with the roles of alpha and beta swapped."""
        return GroundTruthStats(
            1 - self.prevalence,
            tuple(None if b is None else 1 - b for b in self.acc_beta),
            tuple(None if a is None else 1 - a for a in self.acc_alpha),
        )

    def relabel(self) -> "GroundTruthStats":
        """Statistics after renaming alpha <-> beta everywhere (including the decisions)."""
        return GroundTruthStats(1 - self.prevalence, self.acc_beta, self.acc_alpha)

    def permute(self, order: Sequence[int]) -> "GroundTruthStats":
        return GroundTruthStats(
            self.prevalence,
            tuple(self.acc_alpha[i] for i in order),
            tuple(self.acc_beta[i] for i in order),
        )

    def parameters(self) -> dict:
        """Flat ``name -> value`` view, classifiers numbered from 1."""
        out = {"prevalence": self.prevalence}
        for i, a in enumerate(self.acc_alpha, 1):
            out[f"acc_alpha_{i}"] = a
        for i, b in enumerate(self.acc_beta, 1):
            out[f"acc_beta_{i}"] = b
        return out

    def as_float(self) -> "GroundTruthStats":
        f = lambda v: None if v is None else float(v)
        return GroundTruthStats(f(self.prevalence), tuple(map(f, self.acc_alpha)), tuple(map(f, self.acc_beta)))

    def to_dict(self) -> dict:
        f = lambda v: None if v is None else float(v)
        return {
            "prevalence": f(self.prevalence),
            "acc_alpha": [f(v) for v in self.acc_alpha],
            "acc_beta": [f(v) for v in self.acc_beta],
        }


@dataclass(frozen=True)
class PairCorrelations:
    """Per-label error covariances keyed by ``(i, j, label)`` with ``i < j``."""

    values: dict = field(default_factory=dict)

    @classmethod
    def two(cls, gamma_alpha, gamma_beta) -> "PairCorrelations":
        return cls({(0, 1, ALPHA): gamma_alpha, (0, 1, BETA): gamma_beta})

    def get(self, i: int, j: int, label: Label, default=0):
        if i > j:
            i, j = j, i
        return self.values.get((i, j, Label(label)), default)

    @property
    def gamma_alpha(self):
        return self.get(0, 1, ALPHA)

    @property
    def gamma_beta(self):
        return self.get(0, 1, BETA)

    def to_dict(self) -> dict:
        return {
            f"{i + 1},{j + 1},{Label(l).name.lower()}": (None if v is None else float(v))
            for (i, j, l), v in sorted(self.values.items())
        }


def _weighted(weight, term):
    # a zero-weight label may carry undefined (None) accuracies
    return 0 if weight == 0 else weight * term()


def forward_one(gt: GroundTruthStats) -> tuple:
    if gt.n != 1:
        raise MalformedInputError(f"forward_one needs one classifier, got {gt.n}")
    gt.validate()
    p = gt.prevalence
    f_alpha = _weighted(p, lambda: gt.acc_alpha[0]) + _weighted(1 - p, lambda: 1 - gt.acc_beta[0])
    f_beta = _weighted(p, lambda: 1 - gt.acc_alpha[0]) + _weighted(1 - p, lambda: gt.acc_beta[0])
    return (f_alpha, f_beta)


def forward_two(gt: GroundTruthStats, corr: PairCorrelations) -> tuple:
    """Four pattern frequencies of a two-classifier ensemble with error covariances."""
    if gt.n != 2:
        raise MalformedInputError(f"forward_two needs two classifiers, got {gt.n}")
    gt.validate()
    p = gt.prevalence
    a1, a2 = gt.acc_alpha
    b1, b2 = gt.acc_beta
    ga, gb = corr.gamma_alpha, corr.gamma_beta
    for g in (ga, gb):
        if g is not None and abs(g) > 0.25:
            raise DomainError(f"correlation {g!r} is outside [-1/4, 1/4]")
    A = lambda fn: _weighted(p, fn)
    B = lambda fn: _weighted(1 - p, fn)
    return (
        A(lambda: a1 * a2 + ga) + B(lambda: (1 - b1) * (1 - b2) + gb),
        A(lambda: a1 * (1 - a2) - ga) + B(lambda: (1 - b1) * b2 - gb),
        A(lambda: (1 - a1) * a2 - ga) + B(lambda: b1 * (1 - b2) - gb),
        A(lambda: (1 - a1) * (1 - a2) + ga) + B(lambda: b1 * b2 + gb),
    )


def forward_three_indep(gt: GroundTruthStats) -> tuple:
    """Eight pattern frequencies of three classifiers with independent errors."""
    if gt.n != 3:
        raise MalformedInputError(f"forward_three_indep needs three classifiers, got {gt.n}")
    gt.validate()
    p = gt.prevalence
    a1, a2, a3 = gt.acc_alpha
    b1, b2, b3 = gt.acc_beta
    A = lambda fn: _weighted(p, fn)
    B = lambda fn: _weighted(1 - p, fn)
    return (
        A(lambda: a1 * a2 * a3) + B(lambda: (1 - b1) * (1 - b2) * (1 - b3)),
        A(lambda: a1 * a2 * (1 - a3)) + B(lambda: (1 - b1) * (1 - b2) * b3),
        A(lambda: a1 * (1 - a2) * a3) + B(lambda: (1 - b1) * b2 * (1 - b3)),
        A(lambda: a1 * (1 - a2) * (1 - a3)) + B(lambda: (1 - b1) * b2 * b3),
        A(lambda: (1 - a1) * a2 * a3) + B(lambda: b1 * (1 - b2) * (1 - b3)),
        A(lambda: (1 - a1) * a2 * (1 - a3)) + B(lambda: b1 * (1 - b2) * b3),
        A(lambda: (1 - a1) * (1 - a2) * a3) + B(lambda: b1 * b2 * (1 - b3)),
        A(lambda: (1 - a1) * (1 - a2) * (1 - a3)) + B(lambda: b1 * b2 * b3),
    )


def forward_n_indep(gt: GroundTruthStats) -> tuple:
    """Pattern frequencies of ``n`` independent classifiers, in lexicographic order."""
    gt.validate()
    p = gt.prevalence
    out = []
    for pat in patterns(gt.n):
        def side(truth):
            prod = 1
            for i, vote in enumerate(pat):
                acc = gt.accuracy(i, truth)
                prod *= acc if vote == truth else 1 - acc
            return prod
        out.append(_weighted(p, lambda: side(ALPHA)) + _weighted(1 - p, lambda: side(BETA)))
    return tuple(out)


def dimension(n: int) -> int:
    """Number of point ground-truth statistics needed to describe ``n`` classifiers."""
    if n < 1:
        raise MalformedInputError("ensemble size must be at least 1")
    return 2 ** (n + 1) - 1


def _need_truth(stream: DecisionStream):
    if not stream.has_truth:
        raise MalformedInputError("stream has no ground-truth labels")


def gamma(stream: DecisionStream, i: int, j: int, label: Label) -> Fraction:
    """Exact covariance of the correctness indicators of ``i`` and ``j`` on truth-``label`` rows."""
    _need_truth(stream)
    label = Label.parse(label)
    rows = stream.truth == label
    s = int(rows.sum())
    if s == 0:
        raise UndefinedCorrelationError(f"no rows with truth {label.name.lower()}")
    xi = stream.decisions[rows, i] == label
    xj = stream.decisions[rows, j] == label
    # (1/S) sum (x_i - mean_i)(x_j - mean_j) == n_ij/S - n_i n_j / S^2
    n_i, n_j, n_ij = int(xi.sum()), int(xj.sum()), int((xi & xj).sum())
    return Fraction(n_ij, s) - Fraction(n_i * n_j, s * s)


def gt_from_labeled(stream: DecisionStream) -> tuple[GroundTruthStats, PairCorrelations]:
    """Sample ground-truth statistics of a labeled stream, as exact rationals."""
    _need_truth(stream)
    total = len(stream)
    if total == 0:
        raise MalformedInputError("stream is empty")
    acc = {}
    for label in (ALPHA, BETA):
        rows = stream.truth == label
        s = int(rows.sum())
        correct = (stream.decisions[rows] == label).sum(axis=0)
        acc[label] = tuple(Fraction(int(c), s) if s else None for c in correct)
    prevalence = Fraction(int((stream.truth == ALPHA).sum()), total)
    corr = {}
    for i, j in itertools.combinations(range(stream.n), 2):
        for label in (ALPHA, BETA):
            try:
                corr[(i, j, label)] = gamma(stream, i, j, label)
            except UndefinedCorrelationError:
                corr[(i, j, label)] = None
    return GroundTruthStats(prevalence, acc[ALPHA], acc[BETA]), PairCorrelations(corr)
