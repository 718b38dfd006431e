"""Triplet self-consistency for larger ensembles and the new/old ID binarizer."""
from __future__ import annotations

import itertools
import statistics
from dataclasses import dataclass, field
from math import comb
from typing import Optional, Sequence, Union

import numpy as np

from .errors import InsufficientEnsembleError, MalformedInputError, UndefinedScoreError
from .sketch import DecisionStream, PatternSketch, frequencies, tally
from .solver import BetterThanRandomMajority, RootPair, SelectionPolicy, SolverRoot, SolveTolerances
from .synth import solve_and_select


@dataclass
class TripletResult:
    indices: tuple
    selected: Optional[SolverRoot]
    alarms: list = field(default_factory=list)
    pair: Optional[RootPair] = None

    def to_dict(self) -> dict:
        return {
            "indices": list(self.indices),
            "selected": None if self.selected is None else self.selected.to_dict(),
            "alarms": self.alarms,
            "roots": None if self.pair is None else [r.to_dict() for r in self.pair],
        }


@dataclass
class TripletReport:
    n: int
    triplets: list
    policy: str = "majority"
    total: int = 0

    @property
    def solved(self) -> list:
        return [t for t in self.triplets if t.selected is not None]

    @property
    def prevalence_estimates(self) -> list:
        return [t.selected.stats.prevalence for t in self.solved]

    @property
    def per_classifier(self) -> dict:
        """classifier -> list of ``(triplet indices, acc_alpha, acc_beta)``."""
        out = {i: [] for i in range(self.n)}
        for t in self.solved:
            st = t.selected.stats
            for pos, i in enumerate(t.indices):
                out[i].append((t.indices, st.acc_alpha[pos], st.acc_beta[pos]))
        return out

    @property
    def spread(self) -> dict:
        def rng(vals):
            return max(vals) - min(vals) if vals else 0.0

        out = {"prevalence": rng(self.prevalence_estimates)}
        for i, rows in self.per_classifier.items():
            out[f"acc_alpha_{i + 1}"] = rng([a for _, a, _ in rows])
            out[f"acc_beta_{i + 1}"] = rng([b for _, _, b in rows])
        return out

    @property
    def consensus_prevalence(self) -> float:
        if not self.solved:
            raise UndefinedScoreError("no triplet produced a selected root")
        return statistics.fmean(self.prevalence_estimates)

    def to_dict(self) -> dict:
        doc = {
            "n": self.n,
            "total": self.total,
            "policy": self.policy,
            "triplets": [t.to_dict() for t in self.triplets],
            "prevalence_estimates": self.prevalence_estimates,
            "spread": self.spread,
        }
        try:
            doc["consensus_prevalence"] = self.consensus_prevalence
            doc["consistency_score"] = consistency_score(self)
        except UndefinedScoreError:
            doc["consensus_prevalence"] = doc["consistency_score"] = None
        return doc

    def table(self, label: str = "acc_alpha") -> str:
        """Layout of one row per triplet: prevalence then each classifier's accuracy or N/A."""
        head = ["Triplet", "Prevalence"] + [f"C{i + 1}" for i in range(self.n)]
        rows = []
        for t in self.triplets:
            name = "(" + ",".join(str(i + 1) for i in t.indices) + ")"
            if t.selected is None:
                rows.append([name, "alarm"] + ["N/A"] * self.n)
                continue
            accs = t.selected.stats.acc_alpha if label == "acc_alpha" else t.selected.stats.acc_beta
            cells = ["N/A"] * self.n
            for pos, i in enumerate(t.indices):
                cells[i] = f"{accs[pos]:.6f}"
            rows.append([name, f"{t.selected.stats.prevalence:.6f}"] + cells)
        widths = [max(len(r[c]) for r in [head] + rows) for c in range(len(head))]
        fmt = lambda r: "  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip()
        return "\n".join([fmt(head)] + [fmt(r) for r in rows])


def triplet_sweep(
    data: Union[DecisionStream, PatternSketch],
    policy: SelectionPolicy = BetterThanRandomMajority(),
    tol: Optional[SolveTolerances] = None,
) -> TripletReport:
    """Solve every 3-subset of the ensemble from marginals of one tally."""
    sketch = tally(data) if isinstance(data, DecisionStream) else data
    if sketch.n < 3:
        raise InsufficientEnsembleError(f"need at least 3 classifiers, got {sketch.n}")
    tol = tol or SolveTolerances.for_sample(sketch.total)
    results = []
    for idx in itertools.combinations(range(sketch.n), 3):
        sub = sketch.marginal(idx)
        pair, chosen, alarms = solve_and_select(frequencies(sub), policy, tol)
        results.append(TripletResult(idx, chosen, alarms, pair))
    describe = getattr(policy, "describe", lambda: repr(policy))()
    return TripletReport(sketch.n, results, describe, sketch.total)


def consistency_score(report: TripletReport) -> float:
    """Largest cross-triplet spread over prevalence and every per-classifier accuracy."""
    if len(report.solved) < 2:
        raise UndefinedScoreError("consistency needs at least two solved triplets")
    return max(report.spread.values())


def binarize_ids(ids: Sequence[Sequence]) -> DecisionStream:
    """Map each system's token stream to alpha (first sighting) / beta (seen before)."""
    ids = [list(s) for s in ids]
    if not ids:
        raise MalformedInputError("no ID systems given")
    length = len(ids[0])
    for k, s in enumerate(ids):
        if len(s) != length:
            raise MalformedInputError(f"ID system {k} has {len(s)} items, expected {length}")
    out = np.empty((length, len(ids)), dtype=np.uint8)
    for k, s in enumerate(ids):
        seen = set()
        for d, token in enumerate(s):
            out[d, k] = 1 if token in seen else 0
            seen.add(token)
    return DecisionStream(len(ids), out)


def unique_count_estimate(report: TripletReport, total_items: int) -> float:
    return report.consensus_prevalence * total_items


def expected_triplets_per_classifier(n: int) -> int:
    return comb(n - 1, 2)
