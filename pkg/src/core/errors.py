"""
Exception hierarchy for selmut

Each numerical failure mode the recursion and the limit solvers can hit
has its own type, so callers can route e.g. a zero mean fitness to the
degenerate branch without string matching.
"""

from typing import Optional


class SelmutError(Exception):
    """Base class for all selmut errors"""


class MeasureError(SelmutError, ValueError):
    """Invalid atoms, family parameters or measure preconditions"""


class ExpOverflowError(SelmutError, OverflowError):
    """Exponent t*x beyond the evaluable range"""


class DegeneratePopulationError(SelmutError, ArithmeticError):
    """Mean fitness is zero or the Lenski cycle time does not exist"""


class CaseMismatchError(SelmutError, ValueError):
    """A Case-1 solver was called while the criterion selects Case 2"""


class RootFindingError(SelmutError, RuntimeError):
    """Bracket without sign change, or residual tolerance not reached"""


class PreconditionError(SelmutError, ValueError):
    """Input pair violates the relation a check presupposes"""


class ScenarioError(SelmutError, ValueError):
    """Scenario file is malformed or semantically invalid"""

    def __init__(self, message: str, field_path: Optional[str] = None):
        self.field_path = field_path
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)
