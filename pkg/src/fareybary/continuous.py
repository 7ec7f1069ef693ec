"""The continuous Farey-Bary map.

Every cell is cut into six children using all the Farey sums of its vertices:
the three edge mediants v1+v2, v1+v3, v2+v3 and the center v1+v2+v3.  The Bary
side uses midpoints and the centroid.  Since Bary cells shrink geometrically,
delta is a uniform limit and can be evaluated to any requested precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import mpmath

from .errors import DegenerateTriangleError
from .minkowski import question_mark
from .projective import (
    BARY_M0,
    M0,
    IntegerTriple,
    RationalPoint,
    TriangleMatrix,
    barycentric,
    mat_mul,
    mat_pow,
    phi,
    to_fraction,
)
from .subdivision import Descent, Encoding, Grammar, encode

KINDS = ("I", "II", "III", "IV", "V", "VI")

FAREY = {
    "I": ((1, 1, 1), (0, 1, 1), (0, 0, 1)),
    "II": ((1, 1, 1), (0, 0, 1), (0, 1, 1)),
    "III": ((0, 1, 1), (1, 1, 1), (0, 0, 1)),
    "IV": ((0, 0, 1), (1, 1, 1), (0, 1, 1)),
    "V": ((0, 1, 1), (0, 0, 1), (1, 1, 1)),
    "VI": ((0, 0, 1), (0, 1, 1), (1, 1, 1)),
}


def _bary_of(t):
    # column j of a Farey move holds j+1 ones; divide it by j+1
    return tuple(tuple(Fraction(x, j + 1) for j, x in enumerate(row)) for row in t)


BARY = {k: _bary_of(t) for k, t in FAREY.items()}

# the move that keeps v1 and heads for the center, used by the
# non-convergence example
FIXED_V1 = "II"

GRAMMAR = Grammar("continuous", KINDS, FAREY, BARY, lambda kind: kind)


class SixRun(NamedTuple):
    count: int
    kind: str

    def __str__(self):
        return f"{self.count}({self.kind})"


def _kind(move):
    if move not in KINDS:
        raise ValueError(f"unknown continuous move {move!r}")
    return move


def runs_from_moves(moves) -> list:
    runs = []
    for mv in moves:
        _kind(mv)
        if runs and runs[-1].kind == mv:
            runs[-1] = SixRun(runs[-1].count + 1, mv)
        else:
            runs.append(SixRun(1, mv))
    return runs


def moves_from_runs(runs) -> list:
    out = []
    for count, kind in runs:
        if count < 1:
            raise ValueError("run counts must be positive")
        out.extend([_kind(kind)] * count)
    return out


@dataclass(frozen=True)
class ContinuousCell:
    farey: TriangleMatrix
    bary: TriangleMatrix
    path: tuple

    @property
    def depth(self):
        return len(self.path)


def six_subdivide(m: TriangleMatrix, side="farey") -> list:
    """The six children of a cell, in the order I..VI."""
    table = FAREY if side == "farey" else BARY
    if side not in ("farey", "bary"):
        raise ValueError(f"unknown side {side!r}")
    return [m.times(table[k]) for k in KINDS]


def continuous_partition(depth: int) -> list:
    """All 6^depth cells in lexicographic path order."""
    cells = [ContinuousCell(M0, BARY_M0, ())]
    for _ in range(depth):
        cells = [
            ContinuousCell(c.farey.times(FAREY[k]), c.bary.times(BARY[k]), c.path + (k,))
            for c in cells
            for k in KINDS
        ]
    return cells


def cell_from_moves(moves) -> ContinuousCell:
    segs = [(k, c) for c, k in runs_from_moves(moves)]
    farey = TriangleMatrix(GRAMMAR.farey_product(segs), "farey", check=False)
    bary = TriangleMatrix(GRAMMAR.bary_product(segs), "bary", check=False)
    return ContinuousCell(farey, bary, tuple(moves))


def encode_continuous(p, depth: int) -> Encoding:
    return encode(GRAMMAR, p, depth)


def type_run_child(m, L: int) -> TriangleMatrix:
    """Closed form for L consecutive type I moves: (v1, L v1 + v2, L(L+1)/2 v1 + L v2 + v3)."""
    if L < 1:
        raise ValueError("L must be at least 1")
    rows = m.rows if isinstance(m, TriangleMatrix) else m
    t = ((1, L, L * (L + 1) // 2), (0, 1, L), (0, 0, 1))
    kind = m.kind if isinstance(m, TriangleMatrix) else "farey"
    return TriangleMatrix(mat_mul(rows, t), kind, check=False)


# -- the map ---------------------------------------------------------------------

def _transfer(p, farey_rows, bary_rows):
    a = barycentric(p, farey_rows)
    cols = list(zip(*bary_rows))
    return RationalPoint(
        Fraction(sum(ai * c[0] for ai, c in zip(a, cols))),
        Fraction(sum(ai * c[1] for ai, c in zip(a, cols))),
    )


def closed_path(p, n: int) -> list:
    """A depth-n move list whose closed cell contains p (first match in I..VI order)."""
    p = (to_fraction(p[0]), to_fraction(p[1]))
    enc = encode(GRAMMAR, p, n)
    moves = enc.moves
    if enc.boundary is None:
        return moves
    rows = GRAMMAR.farey_product([(k, 1) for k in moves])
    while len(moves) < n:
        for k in KINDS:
            child = mat_mul(rows, FAREY[k])
            if all(c >= 0 for c in barycentric(p, child)):
                moves.append(k)
                rows = child
                break
        else:  # pragma: no cover - children tile their parent
            raise AssertionError("point escaped its cell")
    return moves


def delta_n_continuous(p, n: int) -> RationalPoint:
    p = (to_fraction(p[0]), to_fraction(p[1]))
    segs = [(k, 1) for k in closed_path(p, n)]
    return _transfer(p, GRAMMAR.farey_product(segs), GRAMMAR.bary_product(segs))


def delta_n_all_sides(p, n: int) -> list:
    """delta_n(p) through every depth-n closed cell that contains p."""
    p = (to_fraction(p[0]), to_fraction(p[1]))
    out = []
    frontier = [(M0.rows, BARY_M0.rows)]
    for _ in range(n):
        nxt = []
        for f, b in frontier:
            for k in KINDS:
                child = mat_mul(f, FAREY[k])
                if all(c >= 0 for c in barycentric(p, child)):
                    nxt.append((child, mat_mul(b, BARY[k])))
        frontier = nxt
    for f, b in frontier:
        out.append(_transfer(p, f, b))
    return out


def depth_for_tolerance(tol) -> int:
    """Smallest depth whose Bary cells are certified to have sides below tol."""
    tol = float(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return max(1, math.ceil(math.log(tol / math.sqrt(2)) / math.log(2 / 3)) + 1)


def consecutive_farey_fractions(a: int, b: int):
    """Fractions n1/a and n2/b that are neighbours at some Farey level.

    Built by the division-algorithm recursion: for a < b write b = q a + r and
    start from neighbours with denominators r and a - r.
    """
    if a < 1 or b < 1:
        raise ValueError("denominators must be positive")
    if math.gcd(a, b) != 1:
        raise ValueError(f"gcd({a}, {b}) != 1")
    if a == b:  # only a = b = 1
        return Fraction(0, 1), Fraction(1, 1)
    if a > b:
        x, y = consecutive_farey_fractions(b, a)
        return y, x
    if a == 1:
        return Fraction(0, 1), Fraction(1, b)
    q, r = divmod(b, a)
    left, right = consecutive_farey_fractions(r, a - r)
    # neighbours are always in lowest terms, so the denominators are r and a - r
    mid = left.numerator + right.numerator
    n1 = left.numerator
    return Fraction(mid, a), Fraction(n1 + q * mid, b)


def edge_transfer(v1, v2, x, image1=None, image2=None) -> RationalPoint:
    """delta at the point (1-x) phi(v1) + x phi(v2) of a Farey edge.

    The images of the endpoints default to their exact delta values.  The
    edge is matched with a pair of consecutive Farey fractions over the
    reduced denominators r1/c and r2/c, c = gcd(r1, r2), and ? is applied there.
    """
    x = to_fraction(x)
    if not 0 <= x <= 1:
        raise ValueError("edge parameter must lie in [0, 1]")
    v1, v2 = tuple(v1), tuple(v2)
    if image1 is None:
        image1 = delta_continuous(phi(v1)).point
    if image2 is None:
        image2 = delta_continuous(phi(v2)).point
    r1, r2 = abs(v1[2]), abs(v2[2])
    c = math.gcd(r1, r2)
    a, b = r1 // c, r2 // c
    left, right = consecutive_farey_fractions(a, b)
    qa, qb = question_mark(left), question_mark(right)
    qt = question_mark((1 - x) * left + x * right)
    s = (qt - qa) / (qb - qa)
    return RationalPoint(
        (1 - s) * to_fraction(image1[0]) + s * to_fraction(image2[0]),
        (1 - s) * to_fraction(image1[1]) + s * to_fraction(image2[1]),
    )


class DeltaResult(NamedTuple):
    point: RationalPoint
    error: Fraction
    exact: bool
    depth: int


def _longest_side_sq(rows):
    cols = list(zip(*rows))
    return max(
        (cols[i][0] - cols[j][0]) ** 2 + (cols[i][1] - cols[j][1]) ** 2
        for i in range(3)
        for j in range(i + 1, 3)
    )


def _exact_on_cell(p, farey, bary, depth):
    a = barycentric(p, farey)
    fcols, bcols = list(zip(*farey)), list(zip(*bary))
    nonzero = [i for i in range(3) if a[i] != 0]
    if len(nonzero) == 1:
        i = nonzero[0]
        return DeltaResult(RationalPoint(Fraction(bcols[i][0]), Fraction(bcols[i][1])), Fraction(0), True, depth)
    i, j = nonzero
    pt = edge_transfer(fcols[i], fcols[j], a[j], bcols[i][:2], bcols[j][:2])
    return DeltaResult(pt, Fraction(0), True, depth)


def delta_continuous(p, tol=Fraction(1, 10**12)) -> DeltaResult:
    """delta(p) to within ``tol``, or exactly when p lies on a partition edge."""
    tol = to_fraction(tol)
    walk = Descent(GRAMMAR, p)
    bary = tuple(tuple(Fraction(x) for x in r) for r in BARY_M0.rows)
    limit = depth_for_tolerance(tol)
    tol_sq = tol * tol
    exact_p = getattr(walk.region, "exact", False)
    while True:
        if walk.boundary is not None:
            q = walk.region.point
            if walk.boundary == 0:
                return _exact_on_cell(q, walk.matrix, bary, 0)
            for k in KINDS:
                child = mat_mul(walk.matrix, FAREY[k])
                if all(c >= 0 for c in barycentric(q, child)):
                    return _exact_on_cell(q, child, mat_mul(bary, BARY[k]), walk.boundary)
            raise DegenerateTriangleError("edge point found in no child")  # pragma: no cover
        side = _longest_side_sq(bary)
        if side <= tol_sq or walk.depth >= limit:
            if exact_p:
                pt = _transfer(walk.region.point, walk.matrix, bary)
            else:
                cols = list(zip(*bary))
                pt = RationalPoint(sum(c[0] for c in cols) / 3, sum(c[1] for c in cols) / 3)
            return DeltaResult(pt, tol, False, walk.depth)
        segs = walk.step(limit - walk.depth)
        if segs:
            for kind, count in segs:
                bary = mat_mul(bary, mat_pow(BARY[kind], count))


# -- the non-convergence example -------------------------------------------------

class DemoRow(NamedTuple):
    n: int
    v2: tuple  # coefficients of (v1, v2, v3) in v2(n)
    v3: tuple
    p2: RationalPoint
    p3: RationalPoint


@dataclass
class DemoReport:
    rows: list
    limit: tuple  # ((3 - sqrt5)/2, sqrt5 - 2) as floats
    distance: float  # max distance of the moving vertices from the limit at the last row
    fibonacci_ok: bool


def _fib(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def nonconvergence_demo(n: int, kind=FIXED_V1) -> DemoReport:
    """Repeat the move that fixes v1, n times, and record the other two vertices."""
    if n < 1:
        raise ValueError("need at least one iteration")
    b = FAREY[kind]
    power = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    rows = []
    fib_ok = True
    for k in range(1, n + 1):
        power = mat_mul(power, b)
        cols = list(zip(*power))
        v2, v3 = cols[1], cols[2]
        p2 = phi(IntegerTriple(*_apply(M0.rows, v2)))
        p3 = phi(IntegerTriple(*_apply(M0.rows, v3)))
        rows.append(DemoRow(k, v2, v3, p2, p3))
        if kind == FIXED_V1:
            want2 = (_fib(k + 2) - 1, _fib(k - 1), _fib(k))
            want3 = (_fib(k + 3) - 2, _fib(k), _fib(k + 1))
            fib_ok = fib_ok and v2 == want2 and v3 == want3
    with mpmath.workdps(30):
        s5 = mpmath.sqrt(5)
        lx, ly = (3 - s5) / 2, s5 - 2
        last = rows[-1]
        dist = max(
            mpmath.sqrt((mpmath.mpf(pt.x.numerator) / pt.x.denominator - lx) ** 2
                        + (mpmath.mpf(pt.y.numerator) / pt.y.denominator - ly) ** 2)
            for pt in (last.p2, last.p3)
        )
        return DemoReport(rows, (float(lx), float(ly)), float(dist), fib_ok)


def _apply(rows, v):
    return tuple(sum(rows[i][j] * v[j] for j in range(3)) for i in range(3))
