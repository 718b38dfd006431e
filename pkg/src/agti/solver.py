"""Closed-form inversion of the three-classifier independent-errors system.

Encode each vote as the indicator ``v_i = [classifier i said alpha]``.  Under
independence given the true label, the observed distribution of ``(v1, v2, v3)``
is a two-component product mixture, and with

    p   prevalence of alpha,   q = p (1 - p)
    x_i = P(v_i = 1 | alpha) = acc_alpha_i
    y_i = P(v_i = 1 | beta)  = 1 - acc_beta_i
    d_i = x_i - y_i

its centered moments are

    m_i  = y_i + p d_i
    c_ij = q d_i d_j
    t    = q (1 - 2p) d_1 d_2 d_3.

Hence ``r = t**2 / (c12 c13 c23) = (1 - 2p)**2 / q`` which, since
``(1 - 2p)**2 = 1 - 4q``, is the quadratic ``(1 - 2p)**2 = r p (1 - p)`` with
roots ``p = (1 +- sqrt(r / (4 + r))) / 2``.  Every other unknown follows from
``p`` and the pair covariances.  The two roots are alpha/beta relabelings of
each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import (
    AmbiguousSelectionError,
    DegenerateEnsembleError,
    IndependenceViolationError,
    MalformedInputError,
    NormalizationError,
    SolverInternalError,
)
from .model import GroundTruthStats, forward_three_indep

# classifier i votes alpha in pattern k iff bit (2 - i) of k is 0
_ALPHA_PATTERNS = [[k for k in range(8) if not (k >> (2 - i)) & 1] for i in range(3)]
_T_ZERO = 1e-12


@dataclass(frozen=True)
class SolveTolerances:
    degenerate: float = 1e-6
    residual: float = 1e-6
    phys: float = 1e-4

    @classmethod
    def for_sample(cls, total: int, **overrides) -> "SolveTolerances":
        """Residual tolerance scaled to the sampling noise of ``total`` items."""
        residual = 5.0 / math.sqrt(total) if total > 0 else cls.residual
        return cls(**{"residual": residual, **overrides})


@dataclass(frozen=True)
class Moments:
    m1: float
    m2: float
    m3: float
    m12: float
    m13: float
    m23: float
    m123: float
    c12: float
    c13: float
    c23: float
    t: float

    @property
    def m(self):
        return (self.m1, self.m2, self.m3)

    def cov(self, i: int, j: int) -> float:
        i, j = sorted((i, j))
        return {(0, 1): self.c12, (0, 2): self.c13, (1, 2): self.c23}[(i, j)]

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in self.__dict__.items()}


def moments(f: Sequence) -> Moments:
    f = [float(x) for x in f]
    if len(f) != 8:
        raise MalformedInputError(f"need 8 pattern frequencies, got {len(f)}")
    if abs(sum(f) - 1.0) > 1e-12:
        raise NormalizationError(f"frequencies sum to {sum(f)!r}, not 1")
    m = [sum(f[k] for k in ks) for ks in _ALPHA_PATTERNS]
    pair = {}
    for i, j in ((0, 1), (0, 2), (1, 2)):
        both = set(_ALPHA_PATTERNS[i]) & set(_ALPHA_PATTERNS[j])
        pair[(i, j)] = sum(f[k] for k in sorted(both))
    m123 = f[0]
    m1, m2, m3 = m
    m12, m13, m23 = pair[(0, 1)], pair[(0, 2)], pair[(1, 2)]
    t = m123 - m1 * m23 - m2 * m13 - m3 * m12 + 2 * m1 * m2 * m3
    return Moments(m1, m2, m3, m12, m13, m23, m123,
                   m12 - m1 * m2, m13 - m1 * m3, m23 - m2 * m3, t)


@dataclass(frozen=True)
class SolverRoot:
    stats: GroundTruthStats
    residual: float
    physical: bool
    clamped: bool = False
    accepted: bool = True

    def to_dict(self) -> dict:
        return {
            **self.stats.to_dict(),
            "residual": self.residual,
            "physical": self.physical,
            "clamped": self.clamped,
            "accepted": self.accepted,
        }


@dataclass(frozen=True)
class RootPair:
    """Both solutions; ``root_a`` has the smaller prevalence (or d_1 > 0 at p = 1/2)."""

    root_a: SolverRoot
    root_b: SolverRoot
    moments: Optional[Moments] = None
    r: Optional[float] = None

    def __iter__(self):
        return iter((self.root_a, self.root_b))

    @property
    def alarm(self) -> Optional[str]:
        """``unphysical`` / ``residual`` when the independent model fails to explain the data."""
        if not (self.root_a.physical and self.root_b.physical):
            return "unphysical"
        if not (self.root_a.accepted and self.root_b.accepted):
            return "residual"
        return None


def _finish_root(params: list, f: Sequence, tol: SolveTolerances) -> SolverRoot:
    physical, clamped = True, False
    out = []
    for v in params:
        if v < -tol.phys or v > 1 + tol.phys:
            physical = False
        elif v < 0 or v > 1:
            v = min(max(v, 0.0), 1.0)
            clamped = True
        out.append(v)
    stats = GroundTruthStats(out[0], tuple(out[1:4]), tuple(out[4:7]))
    if physical:
        fitted = forward_three_indep(stats)
    else:
        fitted = _forward_unchecked(stats)
    residual = max(abs(a - float(b)) for a, b in zip(fitted, f))
    if math.isnan(residual):
        raise SolverInternalError("NaN residual")
    return SolverRoot(stats, residual, physical, clamped, residual <= tol.residual)


def _forward_unchecked(stats: GroundTruthStats) -> tuple:
    # forward_three_indep rejects out-of-range inputs, but the residual of an
    # unphysical root is still worth reporting
    p = stats.prevalence
    out = []
    for k in range(8):
        pa, pb = p, 1 - p
        for i in range(3):
            beta_vote = (k >> (2 - i)) & 1
            a, b = stats.acc_alpha[i], stats.acc_beta[i]
            pa *= (1 - a) if beta_vote else a
            pb *= b if beta_vote else (1 - b)
        out.append(pa + pb)
    return tuple(out)


def solve_three(f: Sequence, tol: SolveTolerances = SolveTolerances()) -> RootPair:
    """Recover both candidate ground-truth solutions from eight pattern frequencies."""
    mo = moments(f)
    c = {(0, 1): mo.c12, (0, 2): mo.c13, (1, 2): mo.c23}
    for (i, j), v in c.items():
        if abs(v) < tol.degenerate:
            raise DegenerateEnsembleError(
                f"classifiers {i + 1} and {j + 1} are uncorrelated (cov={v:.3g}); system unidentifiable"
            )
    ccc = mo.c12 * mo.c13 * mo.c23
    if ccc <= 0:
        raise IndependenceViolationError(
            "covariance sign pattern inconsistent with the independent model "
            f"(c12={mo.c12:.4g}, c13={mo.c13:.4g}, c23={mo.c23:.4g})"
        )
    t = mo.t if abs(mo.t) > _T_ZERO else 0.0
    r = t * t / ccc
    q = 1.0 / (4.0 + r)
    half_gap = 0.5 * math.sqrt(r / (4.0 + r))

    # |d_i| from the pair covariances, relative signs from sign(c_ij)
    mags = []
    for i, (j, k) in enumerate(((1, 2), (0, 2), (0, 1))):
        ratio = c[tuple(sorted((i, j)))] * c[tuple(sorted((i, k)))] / (q * c[(j, k)])
        if ratio < 0:
            raise IndependenceViolationError("negative squared accuracy gap; independent model cannot fit")
        mags.append(math.sqrt(ratio))
    base = [mags[0], math.copysign(mags[1], mo.c12), math.copysign(mags[2], mo.c13)]
    base_sign = math.copysign(1.0, base[0] * base[1] * base[2])

    roots = []
    for p, fallback in ((0.5 - half_gap, 1.0), (0.5 + half_gap, -1.0)):
        if t == 0.0:
            g = fallback
        else:
            g = math.copysign(1.0, t) * math.copysign(1.0, 1 - 2 * p) * base_sign
        d = [g * x for x in base]
        x = [mi + (1 - p) * di for mi, di in zip(mo.m, d)]
        y = [mi - p * di for mi, di in zip(mo.m, d)]
        params = [p, *x, *(1 - yi for yi in y)]
        if any(math.isnan(v) for v in params):
            raise SolverInternalError("NaN in solver output")
        roots.append(_finish_root(params, f, tol))
    return RootPair(roots[0], roots[1], mo, r)


@dataclass(frozen=True)
class BetterThanRandomMajority:
    """Prefer the root in which most of the six accuracies exceed 1/2."""

    def describe(self) -> str:
        return "majority"


@dataclass(frozen=True)
class PrevalencePrior:
    target: float

    def __post_init__(self):
        if not 0 <= self.target <= 1:
            raise ValueError(f"prevalence prior {self.target} is outside [0, 1]")

    def describe(self) -> str:
        return f"prior={self.target:g}"


@dataclass(frozen=True)
class Manual:
    choice: str

    def __post_init__(self):
        if self.choice not in ("a", "b"):
            raise ValueError("manual choice must be 'a' or 'b'")

    def describe(self) -> str:
        return f"manual={self.choice}"


SelectionPolicy = Union[BetterThanRandomMajority, PrevalencePrior, Manual]


def parse_policy(text: str) -> SelectionPolicy:
    """Parse ``majority``, ``prior=<p>`` or ``manual=<a|b>``."""
    name, _, arg = text.partition("=")
    if name == "majority" and not arg:
        return BetterThanRandomMajority()
    if name == "prior":
        return PrevalencePrior(float(arg))
    if name == "manual":
        return Manual(arg)
    raise ValueError(f"unknown policy {text!r}")


def _votes_above_half(root: SolverRoot) -> int:
    return sum(v > 0.5 for v in (*root.stats.acc_alpha, *root.stats.acc_beta))


def select_root(pair: RootPair, policy: SelectionPolicy) -> SolverRoot:
    a, b = pair.root_a, pair.root_b
    if isinstance(policy, Manual):
        return a if policy.choice == "a" else b
    if isinstance(policy, BetterThanRandomMajority):
        na, nb = _votes_above_half(a), _votes_above_half(b)
        if na > 3 and na > nb:
            return a
        if nb > 3 and nb > na:
            return b
        raise AmbiguousSelectionError(
            f"neither root has a better-than-random majority ({na} vs {nb} of 6)", roots=(a, b)
        )
    if isinstance(policy, PrevalencePrior):
        da = abs(a.stats.prevalence - policy.target)
        db = abs(b.stats.prevalence - policy.target)
        if da == db:
            raise AmbiguousSelectionError(
                f"both roots are equally close to prevalence {policy.target}", roots=(a, b)
            )
        return a if da < db else b
    raise TypeError(f"unknown selection policy {policy!r}")


def unphysical_report(root: SolverRoot, tol_phys: float = SolveTolerances.phys) -> list[tuple[str, float]]:
    return [
        (name, value)
        for name, value in root.stats.parameters().items()
        if value < -tol_phys or value > 1 + tol_phys
    ]
