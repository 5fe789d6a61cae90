"""Shared exception types."""


class CapacityError(ValueError):
    """Requested object is beyond the supported size range."""


class ParseError(ValueError):
    """Malformed input file or serialized object."""


class BudgetExceededError(RuntimeError):
    """A backtracking search ran out of its node budget.

    Carries whatever partial progress was made so callers can report
    diagnostics instead of silently truncating.
    """

    def __init__(self, message: str, nodes: int = 0, partial=None):
        super().__init__(message)
        self.nodes = nodes
        self.partial = partial
