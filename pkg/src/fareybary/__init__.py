"""Exact Minkowski ?(x) and the weighted and continuous Farey-Bary maps."""

from .errors import (
    DegenerateTriangleError,
    FareyBaryError,
    NonConvergenceError,
    OutsideTriangleError,
    PartitionFailureError,
    PrecisionExhausted,
)
from .minkowski import interval_trace, question_mark, question_mark_inverse
from .projective import IntegerTriple, RationalPoint, TriangleMatrix, barycentric, normalize, phi, triangle_area
from .weighted import Weights

__version__ = "0.1.0"
