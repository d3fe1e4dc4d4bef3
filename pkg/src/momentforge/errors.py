"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: bad input -> 1, internal consistency
failure -> 2, enumeration budget exceeded -> 3.
"""


class MomentforgeError(Exception):
    pass


class InputError(MomentforgeError, ValueError):
    """Malformed or out-of-contract input (bad flags, bad JSON, bad indices)."""


class InfeasibleMomentsError(InputError):
    """The supplied values cannot be the moments of any nonnegative measure.

    Raised when an odd-truncation lower bound exceeds an even-truncation
    upper bound; for genuine moment data the two families never cross.
    """


class ConsistencyError(MomentforgeError):
    """An internal cross-check failed (e.g. a non-integer extension-class count)."""


class BudgetExceededError(MomentforgeError):
    """A brute-force enumeration would exceed the configured resource budget."""
