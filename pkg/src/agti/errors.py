"""Exception hierarchy shared by every module."""


class AgtiError(Exception):
    """Base class for all errors raised by this package."""


class MalformedInputError(AgtiError, ValueError):
    pass


class IncompatibleSketchError(AgtiError, ValueError):
    pass


class EmptySketchError(AgtiError, ValueError):
    pass


class DomainError(AgtiError, ValueError):
    """A ground-truth statistic lies outside [0, 1]."""


class UndefinedCorrelationError(AgtiError, ValueError):
    pass


class NormalizationError(AgtiError, ValueError):
    pass


class SolverAlarm(AgtiError):
    """Base for conditions under which the independent model cannot explain the data."""

    kind = "alarm"


class DegenerateEnsembleError(SolverAlarm):
    kind = "degenerate"


class IndependenceViolationError(SolverAlarm):
    kind = "independence_violation"


class SolverInternalError(AgtiError, ArithmeticError):
    pass


class AmbiguousSelectionError(AgtiError):
    """Raised when a selection policy cannot tell the two roots apart.

    Both candidate roots are attached as ``roots`` so callers can decide.
    """

    kind = "ambiguous_selection"

    def __init__(self, message, roots=None):
        super().__init__(message)
        self.roots = roots


class InsufficientEnsembleError(AgtiError, ValueError):
    pass


class UndefinedScoreError(AgtiError, ValueError):
    pass
