from fractions import Fraction

import pytest
from hypothesis import settings

from agti.model import GroundTruthStats

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# forward model of the canonical parameters, enumerated by hand over truth x correctness
CANONICAL_FREQS = tuple(Fraction(k, 80000) for k in (12831, 2709, 9349, 8311, 5229, 4431, 13791, 23349))

# weak classifier 1's correctness copied into strong classifier 2
MUSHROOM_LIKE = dict(prevalence=0.5, acc_alpha=(0.65, 0.92, 0.88), acc_beta=(0.70, 0.90, 0.82))

# four classifiers, prevalence near the unique-user rate of the ID experiment
FOUR_CLASSIFIERS = dict(prevalence=0.8, acc_alpha=(0.9, 0.85, 0.8, 0.88), acc_beta=(0.85, 0.9, 0.75, 0.8))


@pytest.fixture
def canonical_gt():
    return GroundTruthStats(0.3, (0.8, 0.7, 0.9), (0.75, 0.85, 0.65))


@pytest.fixture
def canonical_gt_exact():
    F = Fraction
    return GroundTruthStats(F(3, 10), (F(8, 10), F(7, 10), F(9, 10)), (F(75, 100), F(85, 100), F(65, 100)))


_ACCEPTANCE = []


def record_acceptance(name, passed, detail=""):
    _ACCEPTANCE.append((name, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
