"""Label-free accuracy estimation for ensembles of binary classifiers.

Tally joint decisions into a pattern sketch, invert the three-classifier
independent-errors system for prevalence and per-label accuracies, and check
larger ensembles for cross-triplet self-consistency.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .sketch import ALPHA, BETA, DecisionStream, Label, PatternSketch, frequencies, merge, tally
from .model import (
    GroundTruthStats,
    PairCorrelations,
    dimension,
    forward_n_indep,
    forward_one,
    forward_three_indep,
    forward_two,
    gamma,
    gt_from_labeled,
)
from .solver import (
    BetterThanRandomMajority,
    Manual,
    Moments,
    PrevalencePrior,
    RootPair,
    SolverRoot,
    SolveTolerances,
    moments,
    select_root,
    solve_three,
    unphysical_report,
)
from .synth import EvalReport, GeneratorSpec, IdGeneratorSpec, evaluate, generate, generate_ids
from .ensemble import TripletReport, binarize_ids, consistency_score, triplet_sweep, unique_count_estimate
