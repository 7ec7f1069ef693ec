"""Exact projective arithmetic on the plane.

A point (x, y) of the plane is carried by any integer or rational triple
(p, q, r) with r != 0 and x = p/r, y = q/r.  A triangle is a 3x3 matrix whose
columns are its three vertex triples.  Everything here is exact: integers and
``fractions.Fraction`` only, except :func:`projective_distance`, which returns
a real number.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import DegenerateTriangleError, PrecisionExhausted

Matrix = tuple  # tuple of three row tuples


class RationalPoint(NamedTuple):
    x: Fraction
    y: Fraction

    def __str__(self):
        return f"{self.x} {self.y}"


def point(x, y) -> RationalPoint:
    return RationalPoint(to_fraction(x), to_fraction(y))


def to_fraction(value) -> Fraction:
    """Convert an int, Fraction, Decimal, float or "p/q" string exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float, Decimal)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed fraction {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to Fraction")


@dataclass(frozen=True)
class IntegerTriple:
    """Projective representative (p, q, r) of the point (p/r, q/r)."""

    p: int
    q: int
    r: int

    def __post_init__(self):
        if self.r == 0:
            raise ValueError("third coordinate must be nonzero")

    def __iter__(self):
        return iter((self.p, self.q, self.r))

    def __add__(self, other):
        return IntegerTriple(self.p + other.p, self.q + other.q, self.r + other.r)

    def scale(self, k):
        return IntegerTriple(k * self.p, k * self.q, k * self.r)


def normalize(t) -> IntegerTriple:
    """Canonical representative: gcd 1 and positive third coordinate."""
    p, q, r = t
    if r == 0:
        raise ValueError("third coordinate must be nonzero")
    g = math.gcd(math.gcd(p, q), r)
    if r < 0:
        g = -g
    return IntegerTriple(p // g, q // g, r // g)


def phi(t) -> RationalPoint:
    """Send a triple (p, q, r) to the plane point (p/r, q/r)."""
    p, q, r = t
    if r == 0:
        raise ValueError("third coordinate must be nonzero")
    return RationalPoint(Fraction(p) / r, Fraction(q) / r)


def projective_distance(u, v, dps=None):
    """Euclidean distance between phi(u) and phi(v).

    Returns a float, or an mpmath number with ``dps`` decimal digits when
    ``dps`` is given.
    """
    a, b = phi(u), phi(v)
    sq = (a.x - b.x) ** 2 + (a.y - b.y) ** 2
    if dps is None:
        return math.sqrt(sq)
    import mpmath

    with mpmath.workdps(dps):
        return +mpmath.sqrt(mpmath.mpf(sq.numerator) / sq.denominator)


def triple_of(p) -> tuple:
    """Integer triple (X, Y, D), D > 0, for a rational plane point."""
    x, y = to_fraction(p[0]), to_fraction(p[1])
    d = x.denominator * y.denominator // math.gcd(x.denominator, y.denominator)
    return (x.numerator * (d // x.denominator), y.numerator * (d // y.denominator), d)


# -- 3x3 matrices as tuples of rows -------------------------------------------------

IDENTITY = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def mat_mul(a, b) -> Matrix:
    return tuple(
        tuple(a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j] for j in range(3))
        for i in range(3)
    )


def mat_vec(a, v) -> tuple:
    return tuple(a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2] for i in range(3))


def mat_pow(a, n) -> Matrix:
    result, base = IDENTITY, a
    while n:
        if n & 1:
            result = mat_mul(result, base)
        n >>= 1
        if n:
            base = mat_mul(base, base)
    return result


def mat_product(mats, start=IDENTITY) -> Matrix:
    out = start
    for m in mats:
        out = mat_mul(out, m)
    return out


def det3(a):
    return (
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    )


def adjugate(a) -> Matrix:
    def cof(i, j):
        rows = [r for k, r in enumerate(a) if k != i]
        m = [[x for k, x in enumerate(r) if k != j] for r in rows]
        return (-1) ** (i + j) * (m[0][0] * m[1][1] - m[0][1] * m[1][0])

    return tuple(tuple(cof(j, i) for j in range(3)) for i in range(3))


def signed_adjugate(a) -> Matrix:
    """adj(a) times sign(det a): a positive multiple of the inverse."""
    d = det3(a)
    if d == 0:
        raise DegenerateTriangleError("singular matrix")
    adj = adjugate(a)
    if d < 0:
        adj = tuple(tuple(-x for x in row) for row in adj)
    return adj


def transpose(a) -> Matrix:
    return tuple(zip(*a))


def rational_nullspace(a) -> list:
    """Basis of the right null space of a rational matrix, by exact RREF."""
    rows = [[Fraction(x) for x in row] for row in a]
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -rows[i][free]
        basis.append(tuple(v))
    return basis


# -- triangles ---------------------------------------------------------------------

class TriangleMatrix:
    """A triangle stored as the 3x3 matrix of its vertex columns.

    ``kind`` is ``"farey"`` (integer entries, positive bottom row) or
    ``"bary"`` (rational entries, bottom row all ones).
    """

    __slots__ = ("rows", "kind")

    def __init__(self, rows, kind="farey", check=True):
        rows = tuple(tuple(r) for r in rows)
        if check:
            if kind == "farey":
                if not all(isinstance(x, int) for r in rows for x in r):
                    raise ValueError("Farey cells need integer entries")
                if any(x <= 0 for x in rows[2]):
                    raise ValueError("Farey cells need a positive bottom row")
            elif kind == "bary":
                if any(x != 1 for x in rows[2]):
                    raise ValueError("Bary cells need a bottom row of ones")
            else:
                raise ValueError(f"unknown kind {kind!r}")
        self.rows = rows
        self.kind = kind

    @classmethod
    def from_columns(cls, columns, kind="farey"):
        return cls(transpose(tuple(tuple(c) for c in columns)), kind)

    @property
    def columns(self):
        return transpose(self.rows)

    @property
    def r_row(self):
        return self.rows[2]

    def det(self):
        return det3(self.rows)

    def times(self, t):
        """Right-multiply by a transformation matrix."""
        return TriangleMatrix(mat_mul(self.rows, t), self.kind, check=False)

    def vertices(self):
        return [phi(c) for c in self.columns]

    def __eq__(self, other):
        return isinstance(other, TriangleMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"TriangleMatrix({self.rows!r}, {self.kind!r})"


M0 = TriangleMatrix(((0, 1, 1), (0, 0, 1), (1, 1, 1)), "farey")
BARY_M0 = TriangleMatrix(((0, 1, 1), (0, 0, 1), (1, 1, 1)), "bary")


def triangle_area(m) -> Fraction:
    """Area |det M| / (2 r1 r2 r3) of the triangle with vertices phi(columns)."""
    rows = m.rows if isinstance(m, TriangleMatrix) else m
    r1, r2, r3 = rows[2]
    return abs(Fraction(det3(rows))) / (2 * r1 * r2 * r3)


class BarycentricCoords(NamedTuple):
    alpha: Fraction
    beta: Fraction
    gamma: Fraction


def barycentric(p, m) -> BarycentricCoords:
    """Exact barycentric coordinates of plane point p in triangle m."""
    rows = m.rows if isinstance(m, TriangleMatrix) else m
    d = det3(rows)
    if d == 0:
        raise DegenerateTriangleError("degenerate triangle")
    x, y = to_fraction(p[0]), to_fraction(p[1])
    c = mat_vec(adjugate(rows), (x, y, 1))
    r = rows[2]
    return BarycentricCoords(*(Fraction(c[i] * r[i]) / d for i in range(3)))


class Where(enum.Enum):
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def locate(p, children):
    """Index of the child whose interior holds p, else BOUNDARY or OUTSIDE."""
    on_closed = False
    for i, child in enumerate(children):
        bc = barycentric(p, child)
        if all(c > 0 for c in bc):
            return i
        if all(c >= 0 for c in bc):
            on_closed = True
    return Where.BOUNDARY if on_closed else Where.OUTSIDE


# -- approximate points ------------------------------------------------------------

@dataclass(frozen=True)
class ApproxPoint:
    """A real point known only to lie in the square [x +- radius] x [y +- radius]."""

    x: Fraction
    y: Fraction
    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", to_fraction(self.x))
        object.__setattr__(self, "y", to_fraction(self.y))
        object.__setattr__(self, "radius", to_fraction(self.radius))
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")

    def corners(self):
        x, y, h = self.x, self.y, self.radius
        if h == 0:
            return [triple_of((x, y))]
        return [triple_of(c) for c in ((x - h, y - h), (x + h, y - h), (x + h, y + h), (x - h, y + h))]

    def refine(self, level):
        raise PrecisionExhausted(level)

    @classmethod
    def from_decimal_strings(cls, xs, ys):
        """Read two decimal strings; the radius is one unit in the last place."""
        digits = max(_decimals(xs), _decimals(ys))
        return cls(Fraction(Decimal(xs)), Fraction(Decimal(ys)), Fraction(1, 10**digits))


def _decimals(s):
    s = s.strip()
    return len(s.split(".", 1)[1]) if "." in s else 0


class ExactRegion:
    """Adapter giving an exact rational point the region interface."""

    exact = True

    def __init__(self, p):
        self.point = RationalPoint(to_fraction(p[0]), to_fraction(p[1]))
        self._corners = [triple_of(self.point)]

    def corners(self):
        return self._corners

    def refine(self, level):  # pragma: no cover - exact regions never refine
        raise AssertionError("exact points never need refinement")


def as_region(p):
    """Wrap a point (exact pair, ApproxPoint, or lazy region) for the descent engine."""
    if hasattr(p, "corners") and hasattr(p, "refine"):
        if isinstance(p, ApproxPoint) and p.radius == 0:
            return ExactRegion((p.x, p.y))
        return p
    return ExactRegion(p)


def polygons_disjoint(a: Sequence, b: Sequence) -> bool:
    """Separating-axis test for two convex polygons given as vertex lists.

    Touching polygons count as intersecting.
    """
    for poly in (a, b):
        n = len(poly)
        for i in range(n):
            (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
            nx, ny = y2 - y1, x1 - x2
            if nx == 0 and ny == 0:
                continue
            pa = [nx * x + ny * y for x, y in a]
            pb = [nx * x + ny * y for x, y in b]
            if max(pa) < min(pb) or max(pb) < min(pa):
                return True
    # degenerate (segment) polygons need the perpendicular axes as well
    for poly in (a, b):
        n = len(poly)
        for i in range(n):
            (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
            nx, ny = x2 - x1, y2 - y1
            if nx == 0 and ny == 0:
                continue
            pa = [nx * x + ny * y for x, y in a]
            pb = [nx * x + ny * y for x, y in b]
            if max(pa) < min(pb) or max(pb) < min(pa):
                return True
    return False
