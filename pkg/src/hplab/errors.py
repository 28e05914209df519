"""Exception hierarchy shared by every hplab module.

Each error carries a short machine-readable ``code`` so the command line
front end can report which precondition failed without parsing messages.
"""

from __future__ import annotations


class HPLError(Exception):
    """Base class for all library errors."""

    code = "error"

    def __init__(self, message: str = "", report=None):
        super().__init__(message)
        #: Optional partial result attached by the raising operation.
        self.report = report


class InvalidArgument(HPLError, ValueError):
    code = "invalid-argument"


class CoprimalityViolation(InvalidArgument):
    code = "coprimality-violation"


class OutOfRange(HPLError, IndexError):
    code = "out-of-range"


class PreconditionViolation(HPLError, ValueError):
    code = "precondition-violation"


class InternalError(HPLError, ArithmeticError):
    code = "internal-error"


class ClassificationUnstable(HPLError):
    code = "classification-unstable"


class MarkerRequired(HPLError, ValueError):
    code = "marker-required"


class SelectionFailure(HPLError):
    code = "selection-failure"


class CounterexampleCandidate(HPLError):
    code = "counterexample-candidate"


class WindowTooEarly(PreconditionViolation):
    code = "window-too-early"


class HypothesisViolation(PreconditionViolation):
    code = "hypothesis-violation"


class InvalidSystem(HPLError, ValueError):
    code = "invalid-system"


class UnsupportedSet(HPLError, ValueError):
    code = "unsupported-set"


class ParseError(InvalidArgument):
    code = "parse-error"


class Unsupported(HPLError, ValueError):
    code = "unsupported"


class DegenerateMeasure(HPLError, ValueError):
    code = "degenerate-measure"
