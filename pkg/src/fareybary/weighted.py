"""The weighted Farey-Bary map.

A cell with vertex columns v1, v2, v3 has one new point, the weighted Farey
sum c = m1 v1 + m2 v2 + m3 v3, and three children

    I   = (v1, v2, c)
    II  = (v2, v3, c)
    III = (v1, v3, c)

On the Bary side the same children use the convex weights w_i = m_i / sum(m).
Every child is ``M @ T`` for a fixed matrix ``T``, so a path is a matrix product.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import NonConvergenceError, PartitionFailureError
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
    triangle_area,
)
from .subdivision import Descent, Encoding, Grammar, encode

KINDS = ("I", "II", "III")


@dataclass(frozen=True)
class Weights:
    m1: int
    m2: int
    m3: int

    def __post_init__(self):
        ms = (self.m1, self.m2, self.m3)
        if not all(isinstance(m, int) and m > 0 for m in ms):
            raise ValueError(f"weights must be positive integers, got {ms}")
        if math.gcd(math.gcd(self.m1, self.m2), self.m3) != 1:
            raise ValueError(f"weights must be coprime, got {ms}")

    @classmethod
    def parse(cls, text):
        """Read "m1,m2,m3"."""
        parts = str(text).replace(" ", "").split(",")
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated weights, got {text!r}")
        return cls(*(int(p) for p in parts))

    @property
    def m(self):
        return (self.m1, self.m2, self.m3)

    @property
    def total(self):
        return self.m1 + self.m2 + self.m3

    @property
    def w(self):
        t = self.total
        return tuple(Fraction(m, t) for m in self.m)

    def __str__(self):
        return f"{self.m1},{self.m2},{self.m3}"


UNIT = Weights(1, 1, 1)


def _as_weights(w):
    return w if isinstance(w, Weights) else Weights(*w)


def _matrices(c):
    a, b, d = c
    return {
        "I": ((1, 0, a), (0, 1, b), (0, 0, d)),
        "II": ((0, 0, a), (1, 0, b), (0, 1, d)),
        "III": ((1, 0, a), (0, 0, b), (0, 1, d)),
    }


def farey_matrices(w):
    return _matrices(_as_weights(w).m)


def bary_matrices(w):
    return _matrices(_as_weights(w).w)


@functools.lru_cache(maxsize=64)
def weighted_grammar(w: Weights) -> Grammar:
    return Grammar("weighted", KINDS, farey_matrices(w), bary_matrices(w), lambda kind: "I")


# -- sums ------------------------------------------------------------------------

def weighted_farey_sum(vs, w) -> IntegerTriple:
    """m1 v1 + m2 v2 + ... componentwise, without removing common factors."""
    ms = _as_weights(w).m if isinstance(w, Weights) or len(w) == 3 else tuple(w)
    if len(ms) != len(vs):
        raise ValueError("need one weight per vertex")
    p = sum(m * v[0] for m, v in zip(ms, vs))
    q = sum(m * v[1] for m, v in zip(ms, vs))
    r = sum(m * v[2] for m, v in zip(ms, vs))
    return IntegerTriple(p, q, r)


def weighted_bary_sum(vs, w) -> RationalPoint:
    ws = _as_weights(w).w
    if len(ws) != len(vs):
        raise ValueError("need one weight per vertex")
    x = sum(wi * to_fraction(v[0]) for wi, v in zip(ws, vs))
    y = sum(wi * to_fraction(v[1]) for wi, v in zip(ws, vs))
    return RationalPoint(x, y)


def _kind(move):
    if move not in KINDS:
        raise ValueError(f"unknown weighted move {move!r}")
    return move


def farey_child(m: TriangleMatrix, move, w) -> TriangleMatrix:
    return m.times(farey_matrices(w)[_kind(move)])


def bary_child(m: TriangleMatrix, move, w) -> TriangleMatrix:
    return m.times(bary_matrices(w)[_kind(move)])


# -- runs ------------------------------------------------------------------------

class Run(NamedTuple):
    count: int
    kind: str

    def __str__(self):
        return f"{self.count}({self.kind})"


def runs_from_moves(moves) -> list:
    """Group raw moves as a(i): one move of kind i followed by a-1 type I moves."""
    runs = []
    for mv in moves:
        _kind(mv)
        if mv == "I" and runs:
            runs[-1] = Run(runs[-1].count + 1, runs[-1].kind)
        else:
            runs.append(Run(1, mv))
    return runs


def runs_from_segments(segments) -> list:
    """Same grouping as :func:`runs_from_moves` from (kind, count) blocks."""
    runs = []
    for kind, count in segments:
        if kind == "I":
            if runs:
                runs[-1] = Run(runs[-1].count + count, runs[-1].kind)
            else:
                runs.append(Run(count, "I"))
        else:
            runs.extend(Run(1, kind) for _ in range(count))
    return runs


def moves_from_runs(runs) -> list:
    out = []
    for count, kind in runs:
        if count < 1:
            raise ValueError("run counts must be positive")
        out.append(_kind(kind))
        out.extend(["I"] * (count - 1))
    return out


def segments_from_runs(runs) -> list:
    segs = []
    for count, kind in runs:
        segs.append((_kind(kind), 1))
        if count > 1:
            segs.append(("I", count - 1))
    return segs


# -- cells -----------------------------------------------------------------------

@dataclass(frozen=True)
class WeightedCell:
    farey: TriangleMatrix
    bary: TriangleMatrix
    path: tuple
    weights: Weights

    @property
    def depth(self):
        return len(self.path)

    @property
    def runs(self):
        return runs_from_moves(self.path)


def cell_from_moves(moves, w) -> WeightedCell:
    w = _as_weights(w)
    g = weighted_grammar(w)
    segs = [(_kind(k), 1) for k in moves]
    farey = TriangleMatrix(g.farey_product(segs), "farey", check=False)
    bary = TriangleMatrix(g.bary_product(segs), "bary", check=False)
    return WeightedCell(farey, bary, tuple(moves), w)


def cell_from_runs(runs, w) -> WeightedCell:
    return cell_from_moves(moves_from_runs(runs), w)


def weighted_partition(w, depth: int) -> list:
    """All 3^depth cells in lexicographic path order."""
    w = _as_weights(w)
    fm, bm = farey_matrices(w), bary_matrices(w)
    cells = [WeightedCell(M0, BARY_M0, (), w)]
    for _ in range(depth):
        cells = [
            WeightedCell(c.farey.times(fm[k]), c.bary.times(bm[k]), c.path + (k,), w)
            for c in cells
            for k in KINDS
        ]
    return cells


# -- encoding and the map --------------------------------------------------------

def encode_weighted(p, w, depth: int) -> Encoding:
    """Raw moves of p down to ``depth``; ``boundary`` is set if p lies on an edge."""
    return encode(weighted_grammar(_as_weights(w)), p, depth)


def _transfer(p, farey_rows, bary_rows):
    a = barycentric(p, farey_rows)
    cols = list(zip(*bary_rows))
    x = sum(ai * c[0] for ai, c in zip(a, cols))
    y = sum(ai * c[1] for ai, c in zip(a, cols))
    return RationalPoint(Fraction(x), Fraction(y))


def _closed_children(p, farey_rows, fm):
    out = []
    for k in KINDS:
        child = mat_mul(farey_rows, fm[k])
        if all(c >= 0 for c in barycentric(p, child)):
            out.append(k)
    return out


def delta_n(p, n: int, w) -> RationalPoint:
    """delta_n(p): barycentric coordinates in the depth-n Farey cell, moved to the Bary cell."""
    w = _as_weights(w)
    g = weighted_grammar(w)
    p = (to_fraction(p[0]), to_fraction(p[1]))
    enc = encode(g, p, n)
    segs = enc.segments
    farey = g.farey_product(segs)
    bary = g.bary_product(segs)
    if enc.boundary is not None and enc.boundary > 0:
        # p sits on an edge of a child; edges are never split again, so any
        # child whose closed triangle holds p gives the same (final) image
        kind = _closed_children(p, farey, g.farey)[0]
        farey = mat_mul(farey, g.farey[kind])
        bary = mat_mul(bary, g.bary[kind])
    return _transfer(p, farey, bary)


def delta_n_all_sides(p, n: int, w) -> list:
    """delta_n evaluated through every closed child at the boundary level."""
    w = _as_weights(w)
    g = weighted_grammar(w)
    p = (to_fraction(p[0]), to_fraction(p[1]))
    enc = encode(g, p, n)
    farey = g.farey_product(enc.segments)
    bary = g.bary_product(enc.segments)
    if enc.boundary is None or enc.boundary == 0:
        return [_transfer(p, farey, bary)]
    return [
        _transfer(p, mat_mul(farey, g.farey[k]), mat_mul(bary, g.bary[k]))
        for k in _closed_children(p, farey, g.farey)
    ]


class DeltaResult(NamedTuple):
    point: RationalPoint
    error: Fraction  # upper bound on the distance to the true image
    exact: bool
    depth: int


def _diameter_sq(rows):
    cols = list(zip(*rows))
    best = Fraction(0)
    for i in range(3):
        for j in range(i + 1, 3):
            d = (cols[i][0] - cols[j][0]) ** 2 + (cols[i][1] - cols[j][1]) ** 2
            best = max(best, d)
    return Fraction(best)


def _sqrt_upper(q: Fraction) -> Fraction:
    """A rational not below sqrt(q), tight to about 1e-30 relative."""
    if q == 0:
        return Fraction(0)
    scale = 10**40
    n = q.numerator * scale * scale // q.denominator
    return Fraction(math.isqrt(n) + 1, scale)


def delta_weighted(p, w, tol=Fraction(1, 10**12), max_moves=1_000_000) -> DeltaResult:
    """delta(p) for the weighted map with m3 = 1.

    Edge points get their exact finite-level image.  Interior points descend
    until the Bary cell has diameter at most ``tol``; the returned point lies in
    that cell, so it is within ``tol`` of the limit.
    """
    w = _as_weights(w)
    if w.m3 != 1:
        raise PartitionFailureError(
            f"weights {w}: m3 > 1, so almost every point has a finite Farey sequence "
            "and the limiting map is undefined (partition failure)"
        )
    tol = to_fraction(tol)
    g = weighted_grammar(w)
    walk = Descent(g, p)
    exact_p = getattr(walk.region, "exact", False)
    bary = tuple(tuple(Fraction(x) for x in r) for r in BARY_M0.rows)
    tol_sq = tol * tol
    while True:
        if walk.boundary is not None:
            if walk.boundary > 0:
                kind = _closed_children(walk.region.point, walk.matrix, g.farey)[0]
                farey = mat_mul(walk.matrix, g.farey[kind])
                bary = mat_mul(bary, g.bary[kind])
            else:
                farey = walk.matrix
            return DeltaResult(_transfer(walk.region.point, farey, bary), Fraction(0), True, walk.depth)
        diam = _diameter_sq(bary)
        if diam <= tol_sq:
            if exact_p:
                pt = _transfer(walk.region.point, walk.matrix, bary)
            else:
                cols = list(zip(*bary))
                pt = RationalPoint(sum(c[0] for c in cols) / 3, sum(c[1] for c in cols) / 3)
            return DeltaResult(pt, _sqrt_upper(diam), False, walk.depth)
        if walk.depth >= max_moves:
            raise NonConvergenceError(f"Bary cell still too large after {walk.depth} moves")
        segs = walk.step(max_moves - walk.depth)
        if segs:
            for kind, count in segs:
                bary = mat_mul(bary, mat_pow(g.bary[kind], count))


# -- areas -----------------------------------------------------------------------

def weighted_area_ratio(runs, w) -> Fraction:
    """area(Bary cell) / area(Farey cell) = r1 r2 r3 / (m1+m2+m3)^s."""
    w = _as_weights(w)
    segs = segments_from_runs(runs)
    rows = weighted_grammar(w).farey_product(segs)
    s = sum(c for _, c in segs)
    r1, r2, r3 = rows[2]
    return Fraction(r1 * r2 * r3, w.total**s)


def t_l_children(rows, L: int, w) -> dict:
    """Matrices of T_L(i): one move of kind i, then L-1 type I moves."""
    if L < 1:
        raise ValueError("L must be at least 1")
    fm = farey_matrices(w)
    tail = mat_pow(fm["I"], L - 1)
    return {k: mat_mul(mat_mul(rows, fm[k]), tail) for k in KINDS}


def t_l_bound(L: int, w) -> Fraction:
    w = _as_weights(w)
    s = w.m1 + w.m2
    if w.m3 == 1:
        return Fraction(L - 1) / (L - 1 + Fraction(1, s))
    return 1 / (1 + Fraction(1, s))


class TLRatio(NamedTuple):
    ratio: Fraction
    bound: Fraction

    @property
    def ok(self):
        return self.ratio <= self.bound


def t_l_region_ratio(cell, L: int, w=None) -> TLRatio:
    """Exact area(T_L)/area(T) for a Farey cell, with the applicable bound."""
    if isinstance(cell, WeightedCell):
        w = cell.weights if w is None else w
        rows = cell.farey.rows
    else:
        rows = cell.rows if isinstance(cell, TriangleMatrix) else cell
    w = _as_weights(w)
    whole = triangle_area(rows)
    kids = t_l_children(rows, L, w)
    rest = whole - sum(triangle_area(m) for m in kids.values())
    return TLRatio(rest / whole, t_l_bound(L, w))


def limit_triangles(rows, w) -> dict:
    """Plane vertices of T_inf(i), the limit of T_L(i) as L grows, for m3 > 1.

    For m3 > 1 the third vertex of T_L(i) converges to u + (m3-1) c where
    u = m1 v_a + m2 v_b for the edge (v_a, v_b) kept by move i, and c is the
    cell's weighted Farey sum.  For m3 = 1 the limit collapses onto that edge.
    """
    w = _as_weights(w)
    cols = list(zip(*rows))
    m1, m2, m3 = w.m
    c = weighted_farey_sum(cols, w)
    pairs = {"I": (0, 1), "II": (1, 2), "III": (0, 2)}
    out = {}
    for k, (a, b) in pairs.items():
        u = [m1 * cols[a][i] + m2 * cols[b][i] for i in range(3)]
        top = tuple(u[i] + (m3 - 1) * tuple(c)[i] for i in range(3))
        out[k] = [phi(cols[a]), phi(cols[b]), phi(top)]
    return out
