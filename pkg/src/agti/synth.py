"""Synthetic labeled ensembles and the estimate-vs-truth evaluation harness."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import AmbiguousSelectionError, MalformedInputError, SolverAlarm
from .model import GroundTruthStats, PairCorrelations, forward_n_indep, gt_from_labeled
from .sketch import DecisionStream, frequencies, tally
from .solver import (
    BetterThanRandomMajority,
    RootPair,
    SelectionPolicy,
    SolverRoot,
    SolveTolerances,
    select_root,
    solve_three,
    unphysical_report,
)


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of an independent-errors ensemble, with optional correlation injection.

    ``pair_flip = (i, j, rho)`` makes classifier ``j`` copy classifier ``i``'s
    correctness on each item with probability ``rho`` (0-based indices).
    """

    prevalence: float
    acc_alpha: tuple
    acc_beta: tuple
    sample_size: int
    seed: int = 0
    pair_flip: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "acc_alpha", tuple(float(a) for a in self.acc_alpha))
        object.__setattr__(self, "acc_beta", tuple(float(b) for b in self.acc_beta))
        if len(self.acc_alpha) != len(self.acc_beta) or not self.acc_alpha:
            raise MalformedInputError("acc_alpha and acc_beta must be non-empty and equally long")
        for name, v in [("prevalence", self.prevalence), *(("accuracy", a) for a in self.acc_alpha + self.acc_beta)]:
            if not 0 <= v <= 1:
                raise MalformedInputError(f"{name} {v} is outside [0, 1]")
        if self.sample_size < 1:
            raise MalformedInputError("sample_size must be at least 1")
        if self.pair_flip is not None:
            i, j, rho = self.pair_flip
            object.__setattr__(self, "pair_flip", (int(i), int(j), float(rho)))
            if not (0 <= i < self.n and 0 <= j < self.n and i != j):
                raise MalformedInputError(f"pair_flip indices {i}, {j} invalid for n={self.n}")
            if not 0 <= rho <= 1:
                raise MalformedInputError(f"pair_flip rho {rho} is outside [0, 1]")

    @property
    def n(self) -> int:
        return len(self.acc_alpha)

    @property
    def stats(self) -> GroundTruthStats:
        return GroundTruthStats(self.prevalence, self.acc_alpha, self.acc_beta)

    def with_seed(self, seed: int) -> "GeneratorSpec":
        return GeneratorSpec(**{**self.to_dict(), "seed": seed})

    def to_dict(self) -> dict:
        d = asdict(self)
        d["acc_alpha"], d["acc_beta"] = list(self.acc_alpha), list(self.acc_beta)
        d["pair_flip"] = None if self.pair_flip is None else list(self.pair_flip)
        return d

    @classmethod
    def from_dict(cls, doc: dict) -> "GeneratorSpec":
        doc = dict(doc)
        n = doc.pop("n", None)
        try:
            spec = cls(**doc)
        except TypeError as exc:
            raise MalformedInputError(f"bad generator spec: {exc}") from None
        if n is not None and n != spec.n:
            raise MalformedInputError(f"spec says n={n} but lists {spec.n} classifiers")
        return spec

    @classmethod
    def loads(cls, text: str) -> "GeneratorSpec":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"spec is not valid JSON: {exc}") from None


def generate(spec: GeneratorSpec) -> DecisionStream:
    rng = np.random.default_rng(spec.seed)
    S, n = spec.sample_size, spec.n
    truth = (rng.random(S) >= spec.prevalence).astype(np.uint8)
    acc = np.array([spec.acc_alpha, spec.acc_beta])  # (2, n)
    correct = rng.random((S, n)) < acc[truth]
    if spec.pair_flip is not None:
        i, j, rho = spec.pair_flip
        copy = rng.random(S) < rho
        correct[:, j] = np.where(copy, correct[:, i], correct[:, j])
    decisions = np.where(correct, truth[:, None], 1 - truth[:, None]).astype(np.uint8)
    return DecisionStream(n, decisions, truth)


@dataclass
class EvalReport:
    true_stats: GroundTruthStats
    estimated: Optional[SolverRoot]
    errors: dict
    gammas: PairCorrelations
    alarms: list = field(default_factory=list)
    pair: Optional[RootPair] = None
    frequencies: tuple = ()

    @property
    def max_error(self) -> float:
        return max(self.errors.values()) if self.errors else float("nan")

    def to_dict(self) -> dict:
        return {
            "true_stats": self.true_stats.to_dict(),
            "estimated": None if self.estimated is None else self.estimated.to_dict(),
            "errors": self.errors,
            "gammas": self.gammas.to_dict(),
            "alarms": self.alarms,
            "roots": None if self.pair is None else [r.to_dict() for r in self.pair],
            "frequencies": [float(x) for x in self.frequencies],
        }

    def table(self) -> str:
        """Aligned ``estimate(true)`` table, one column per parameter."""
        true = self.true_stats.parameters()
        est = {} if self.estimated is None else self.estimated.stats.parameters()
        cells = []
        for name, tv in true.items():
            ts = "n/a" if tv is None else f"{float(tv):.3f}"
            es = f"{est[name]:.3f}" if name in est else "--"
            cells.append((name, f"{es}({ts})"))
        width = max(max(len(a), len(b)) for a, b in cells)
        head = "  ".join(a.ljust(width) for a, _ in cells)
        row = "  ".join(b.ljust(width) for _, b in cells)
        lines = [head.rstrip(), row.rstrip()]
        if self.alarms:
            lines.append("alarms: " + "; ".join(self.alarms))
        return "\n".join(lines)


def solve_and_select(f, policy: SelectionPolicy, tol: SolveTolerances):
    """Solve, select and collect alarms without raising on solver alarms."""
    alarms: list[str] = []
    try:
        pair = solve_three(f, tol)
    except SolverAlarm as exc:
        return None, None, [f"{exc.kind}: {exc}"]
    if pair.alarm == "unphysical":
        for label, root in (("a", pair.root_a), ("b", pair.root_b)):
            bad = unphysical_report(root, tol.phys)
            if bad:
                alarms.append(f"unphysical: root {label} " + ", ".join(f"{k}={v:.4f}" for k, v in bad))
    for label, root in (("a", pair.root_a), ("b", pair.root_b)):
        if not root.accepted:
            alarms.append(f"residual: root {label} residual {root.residual:.3g} > {tol.residual:.3g}")
    try:
        chosen = select_root(pair, policy)
    except AmbiguousSelectionError as exc:
        alarms.append(f"{exc.kind}: {exc}")
        chosen = None
    return pair, chosen, alarms


def evaluate(
    spec: GeneratorSpec,
    policy: SelectionPolicy = BetterThanRandomMajority(),
    tol: Optional[SolveTolerances] = None,
    exact: bool = False,
) -> EvalReport:
    """Estimate the ground-truth statistics of a synthetic sample and score them.

    With ``exact=True`` the solver sees the forward-model frequencies of the
    spec parameters instead of a sampled tally, and those parameters are the truth.
    """
    if spec.n != 3:
        raise MalformedInputError("evaluate solves three-classifier ensembles; use triplet_sweep for more")
    if exact:
        true_stats = spec.stats
        gammas = PairCorrelations({})
        f = forward_n_indep(true_stats)
        tol = tol or SolveTolerances()
    else:
        stream = generate(spec)
        true_stats, gammas = gt_from_labeled(stream)
        sketch = tally(stream)
        f = frequencies(sketch)
        tol = tol or SolveTolerances.for_sample(sketch.total)
    pair, chosen, alarms = solve_and_select(f, policy, tol)
    errors = {}
    if chosen is not None:
        est = chosen.stats.parameters()
        for name, tv in true_stats.parameters().items():
            if tv is not None:
                errors[name] = abs(est[name] - float(tv))
    return EvalReport(true_stats, chosen, errors, gammas, alarms, pair, tuple(f))


@dataclass(frozen=True)
class IdGeneratorSpec:
    """Noisy identity systems observing a stream with exactly ``unique`` distinct entities.

    Per item, system ``i`` emits a never-seen token with probability
    ``fresh_rate[i]`` (a spurious new entity) or, with probability
    ``merge_rate[i]``, the token of a random earlier item (a merge with a
    known entity); otherwise the true entity id.
    """

    unique: int
    sample_size: int
    fresh_rate: tuple
    merge_rate: tuple
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.unique <= self.sample_size:
            raise MalformedInputError("need 1 <= unique <= sample_size")
        if len(self.fresh_rate) != len(self.merge_rate):
            raise MalformedInputError("fresh_rate and merge_rate must be equally long")


def generate_ids(spec: IdGeneratorSpec) -> tuple[list[list[str]], np.ndarray]:
    """Return per-system token streams and the true new(0)/old(1) label of each item."""
    rng = np.random.default_rng(spec.seed)
    S, U = spec.sample_size, spec.unique
    entity = np.concatenate([np.arange(U), rng.integers(0, U, S - U)])
    rng.shuffle(entity)
    seen = np.zeros(U, dtype=bool)
    truth = np.empty(S, dtype=np.uint8)
    for d, e in enumerate(entity):
        truth[d] = 1 if seen[e] else 0
        seen[e] = True
    systems = []
    for k, (fresh, merge) in enumerate(zip(spec.fresh_rate, spec.merge_rate)):
        u = rng.random(S)
        earlier = (rng.random(S) * np.arange(S)).astype(np.int64)
        tokens = []
        for d in range(S):
            if u[d] < fresh:
                tokens.append(f"s{k}-x{d}")
            elif u[d] < fresh + merge and d > 0:
                tokens.append(f"u{entity[earlier[d]]}")
            else:
                tokens.append(f"u{entity[d]}")
        systems.append(tokens)
    return systems, truth
