"""Superextensions of finite semigroups.

Builds the semigroup of maximal linked upfamilies over a finite semigroup,
computes automorphism groups via refinement-guided backtracking over a
stabilizer chain, and analyses shift maps, their fibers, and the induced
restriction operators.
"""

from .errors import BudgetExceededError, CapacityError, ParseError

__all__ = ["BudgetExceededError", "CapacityError", "ParseError"]

__version__ = "0.1.0"
