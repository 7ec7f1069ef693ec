"""Exception types shared across the package."""


class FareyBaryError(Exception):
    """Base class for every error raised by this package."""


class DegenerateTriangleError(FareyBaryError, ValueError):
    """The three vertices of a triangle are collinear (zero determinant)."""


class OutsideTriangleError(FareyBaryError, ValueError):
    """A point that must lie in the base triangle does not."""


class PrecisionExhausted(FareyBaryError, ArithmeticError):
    """An approximate input is too coarse to decide a containment.

    ``level`` is the subdivision depth that was reached before the decision
    became impossible.
    """

    def __init__(self, level, message=None):
        self.level = level
        super().__init__(message or f"precision exhausted at level {level}")


class PartitionFailureError(FareyBaryError, ValueError):
    """The weighted map was asked for an infinite limit with m3 > 1.

    When the third weight exceeds one, the points with infinite Farey sequences
    form a set of measure zero, so the limiting map is undefined almost
    everywhere.
    """


class NonConvergenceError(FareyBaryError, ArithmeticError):
    """Power iteration did not settle on a unique dominant direction."""
