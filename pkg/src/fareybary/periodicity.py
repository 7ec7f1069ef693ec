"""Eventually periodic move sequences.

If a point's moves are a preperiod (matrix product A) followed by a repeated
period (product B), its Farey cells are M0 A B^k.  On the Farey side the cells
close in on the dominant eigen-direction of the integer matrix B, so the point
lives in a field of degree at most three; B's characteristic polynomial is the
certificate.  On the Bary side B is stochastic and the limit is a rational
fixed vector, found here by an exact linear solve.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import continuous, weighted
from .errors import NonConvergenceError
from .projective import (
    BARY_M0,
    IDENTITY,
    M0,
    RationalPoint,
    TriangleMatrix,
    adjugate,
    det3,
    mat_mul,
    mat_pow,
    mat_vec,
    rational_nullspace,
)

DPS = 50


@dataclass(frozen=True)
class PeriodicSpec:
    grammar: str
    period: tuple
    preperiod: tuple = ()
    weights: weighted.Weights | None = None

    def __post_init__(self):
        object.__setattr__(self, "period", tuple(self.period))
        object.__setattr__(self, "preperiod", tuple(self.preperiod))
        if self.grammar == "weighted":
            if self.weights is None:
                object.__setattr__(self, "weights", weighted.UNIT)
            elif not isinstance(self.weights, weighted.Weights):
                object.__setattr__(self, "weights", weighted.Weights(*self.weights))
            kinds = weighted.KINDS
        elif self.grammar == "continuous":
            if self.weights is not None:
                raise ValueError("the continuous grammar takes no weights")
            kinds = continuous.KINDS
        else:
            raise ValueError(f"unknown grammar {self.grammar!r}")
        if not self.period:
            raise ValueError("period must be nonempty")
        for mv in self.preperiod + self.period:
            if mv not in kinds:
                raise ValueError(f"move {mv!r} is not valid for the {self.grammar} grammar")

    def _tables(self):
        if self.grammar == "weighted":
            return weighted.farey_matrices(self.weights), weighted.bary_matrices(self.weights)
        return continuous.FAREY, continuous.BARY

    def farey_matrices(self):
        f, _ = self._tables()
        a = _product(f, self.preperiod)
        b = _product(f, self.period)
        return a, b

    def bary_matrices(self):
        _, g = self._tables()
        one = tuple(tuple(Fraction(x) for x in r) for r in IDENTITY)
        return _product(g, self.preperiod, one), _product(g, self.period, one)

    def to_json(self):
        d = {"grammar": self.grammar, "preperiod": list(self.preperiod), "period": list(self.period)}
        if self.weights is not None:
            d["weights"] = list(self.weights.m)
        return d

    @classmethod
    def from_json(cls, d):
        if isinstance(d, str):
            d = json.loads(d)
        return cls(
            grammar=d["grammar"],
            period=tuple(d["period"]),
            preperiod=tuple(d.get("preperiod", ())),
            weights=tuple(d["weights"]) if d.get("weights") is not None else None,
        )


def _product(table, moves, start=IDENTITY):
    m = start
    for mv in moves:
        m = mat_mul(m, table[mv])
    return m


# -- characteristic polynomial ---------------------------------------------------

@dataclass(frozen=True)
class CharPoly:
    """det(M - lambda I) = c0 + c1 lambda + c2 lambda^2 + c3 lambda^3, c3 = -1."""

    c0: Fraction
    c1: Fraction
    c2: Fraction
    c3: Fraction

    @property
    def coefficients(self):
        return (self.c0, self.c1, self.c2, self.c3)

    def monic(self):
        """Coefficients of lambda^3 + a2 lambda^2 + a1 lambda + a0, highest first."""
        return (Fraction(1), -self.c2, -self.c1, -self.c0)

    def __call__(self, lam):
        return self.c0 + lam * (self.c1 + lam * (self.c2 + lam * self.c3))

    def roots(self, dps=DPS):
        # eigenvalues of the companion matrix; unlike polyroots this copes
        # with repeated roots
        with mpmath.workdps(dps):
            _, a2, a1, a0 = (mpmath.mpf(c.numerator) / c.denominator for c in self.monic())
            comp = mpmath.matrix([[-a2, -a1, -a0], [1, 0, 0], [0, 1, 0]])
            return list(mpmath.eig(comp, left=False, right=False))

    def __str__(self):
        a3, a2, a1, a0 = self.monic()
        terms = ["x^3"]
        for coef, mono in ((a2, "x^2"), (a1, "x"), (a0, "")):
            if coef == 0:
                continue
            sign = "-" if coef < 0 else "+"
            mag = abs(coef)
            body = mono if (mag == 1 and mono) else (f"{mag}*{mono}" if mono else f"{mag}")
            terms.append(f"{sign} {body}")
        return " ".join(terms)


def char_poly(m) -> CharPoly:
    rows = m.rows if isinstance(m, TriangleMatrix) else m
    rows = [[Fraction(x) for x in r] for r in rows]
    tr = rows[0][0] + rows[1][1] + rows[2][2]
    minors = (
        rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
        + rows[0][0] * rows[2][2] - rows[0][2] * rows[2][0]
        + rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1]
    )
    return CharPoly(Fraction(det3(rows)), -minors, tr, Fraction(-1))


# -- power iteration -------------------------------------------------------------

@dataclass
class DominantDirection:
    vector: tuple  # mpf entries, largest-magnitude entry scaled to 1
    eigenvalue: object
    iterations: int
    converged: bool
    start: int  # 0 for the all-ones start, i for the i-th basis column


def _mp_matrix(rows):
    return [[mpmath.mpf(Fraction(x).numerator) / Fraction(x).denominator for x in r] for r in rows]


def _normalize(v):
    k = max(range(3), key=lambda i: abs(v[i]))
    if v[k] == 0:
        return None
    return [x / v[k] for x in v]


def _iterate(b, start, tol, max_iter):
    v = _normalize(start)
    for it in range(1, max_iter + 1):
        w = [sum(b[i][j] * v[j] for j in range(3)) for i in range(3)]
        w = _normalize(w)
        if w is None:
            return v, it, False
        diff = mpmath.sqrt(sum((w[i] - v[i]) ** 2 for i in range(3)))
        # allow for a sign flip from a negative dominant eigenvalue
        flip = mpmath.sqrt(sum((w[i] + v[i]) ** 2 for i in range(3)))
        v = w
        if diff < tol or flip < tol:
            return v, it, True
    return v, max_iter, False


def dominant_direction(b, tol=1e-30, max_iter=20000, dps=DPS) -> DominantDirection:
    """Power iteration with projective normalization.

    Starts from the all-ones column and falls back to each basis column if the
    result is not the dominant direction.  ``converged`` is False when no
    start settles (complex or tied dominant eigenvalues).
    """
    rows = b.rows if isinstance(b, TriangleMatrix) else b
    if det3(rows) == 0:
        raise ValueError("matrix is singular")
    with mpmath.workdps(dps):
        mb = _mp_matrix(rows)
        roots = char_poly(rows).roots(dps)
        radius = max(abs(r) for r in roots)
        # repeated roots are only known to about a third of the working digits
        slack = mpmath.mpf(10) ** (-(dps // 5)) * max(1, radius)
        tol = mpmath.mpf(tol)
        starts = [[mpmath.mpf(1)] * 3] + [[mpmath.mpf(int(i == j)) for j in range(3)] for i in range(3)]
        last = None
        for idx, s in enumerate(starts):
            v, its, ok = _iterate(mb, s, tol, max_iter)
            bv = [sum(mb[i][j] * v[j] for j in range(3)) for i in range(3)]
            lam = sum(x * y for x, y in zip(v, bv)) / sum(x * x for x in v)
            last = DominantDirection(tuple(v), lam, its, False, idx)
            if not ok or abs(abs(lam) - radius) > slack:
                continue
            # a different eigenvalue of the same modulus means the columns of
            # B^k keep rotating between directions
            if any(abs(abs(r) - radius) <= slack and abs(r - lam) > slack for r in roots):
                return last
            last.converged = True
            return last
        return last


# -- reports ---------------------------------------------------------------------

@dataclass
class PeriodicReport:
    limit_point: tuple | None
    char_poly: CharPoly
    eigenvalue: object
    residual: object
    exact_point: RationalPoint | None = None
    collapse_note: str | None = None
    poly_value: object = None
    fixed_space: list = field(default_factory=list)
    column_limits: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self, digits=30):
        def num(x):
            if x is None:
                return None
            if isinstance(x, Fraction):
                return str(x)
            return mpmath.nstr(x, digits)

        return {
            "limit_point": None if self.limit_point is None else [num(c) for c in self.limit_point],
            "char_poly": [str(c) for c in self.char_poly.coefficients],
            "char_poly_text": str(self.char_poly),
            "eigenvalue": num(self.eigenvalue),
            "residual": num(self.residual),
            "poly_value": num(self.poly_value),
            "exact_point": None if self.exact_point is None else [str(self.exact_point.x), str(self.exact_point.y)],
            "fixed_space": [[str(c) for c in v] for v in self.fixed_space],
            "column_limits": [[str(p.x), str(p.y)] for p in self.column_limits],
            "collapse_note": self.collapse_note,
            "notes": list(self.notes),
        }


def _fixed_columns(b):
    return [i for i in range(3) if tuple(r[i] for r in b) == tuple(int(i == j) for j in range(3))]


def _defective_direction(b, poly, dps=DPS):
    """Exact limit direction when the dominant root is repeated.

    B is an integer matrix, so a repeated root of its monic integer cubic is
    an integer.  Power iteration only creeps towards it (error ~ 1/k), so the
    direction is read off as the range of the highest nonzero power of
    (B - lam), times the factor for any remaining root.  Returns None if that range is not a line.
    """
    roots = poly.roots(dps)
    radius = max(abs(r) for r in roots)
    with mpmath.workdps(dps):
        cand = [r for r in roots if abs(abs(r) - radius) < mpmath.mpf(10) ** -(dps // 5)]
    lam = int(mpmath.nint(mpmath.re(cand[0])))
    d1 = poly.c1 + lam * (2 * poly.c2 + 3 * lam * poly.c3)
    if poly(lam) != 0 or d1 != 0:
        return None
    d2 = 2 * poly.c2 + 6 * lam * poly.c3
    mult = 3 if d2 == 0 else 2
    shift = tuple(tuple(b[i][j] - (lam if i == j else 0) for j in range(3)) for i in range(3))
    e = mat_pow(shift, mult - 1)
    if mult == 3 and not any(any(r) for r in e):
        e = shift  # largest Jordan block has size two
    if mult == 2:
        mu = poly.c2 - 2 * lam  # trace minus the double root
        e = mat_mul(e, tuple(tuple(b[i][j] - (mu if i == j else 0) for j in range(3)) for i in range(3)))
    cols = [c for c in zip(*e) if any(c)]
    if not cols or any(
        cols[0][i] * c[j] != cols[0][j] * c[i] for c in cols for i in range(3) for j in range(3)
    ):
        return None
    v = cols[0]
    if sum(v) < 0:
        v = tuple(-x for x in v)
    with mpmath.workdps(dps):
        vec = _normalize([mpmath.mpf(Fraction(x).numerator) / Fraction(x).denominator for x in v])
        return DominantDirection(tuple(vec), mpmath.mpf(lam), 0, True, -1)


def farey_periodic_eval(spec: PeriodicSpec, tol=1e-10, dps=DPS) -> PeriodicReport:
    """Limit of the Farey cells M0 A B^k and its cubic certificate."""
    a, b = spec.farey_matrices()
    poly = char_poly(b)
    dom = dominant_direction(b, dps=dps)
    if not dom.converged or dom.start != 0:
        dom = _defective_direction(b, poly, dps) or dom
    if not dom.converged:
        raise NonConvergenceError(
            "the period matrix has no unique dominant direction; the cells do not close in on a point"
        )
    with mpmath.workdps(dps):
        ma = mat_mul(M0.rows, a)
        trip = [sum(ma[i][j] * dom.vector[j] for j in range(3)) for i in range(3)]
        alpha, beta = trip[0] / trip[2], trip[1] / trip[2]
        # transfer the limit back through (M0 A)^-1 and test the eigen-equation
        inv = _mp_matrix(adjugate(ma))
        u = [sum(inv[i][j] * c for j, c in enumerate((alpha, beta, mpmath.mpf(1)))) for i in range(3)]
        mb = _mp_matrix(b)
        bu = [sum(mb[i][j] * u[j] for j in range(3)) for i in range(3)]
        norm = mpmath.sqrt(sum(x * x for x in u))
        lam = dom.eigenvalue
        residual = mpmath.sqrt(sum((bu[i] - lam * u[i]) ** 2 for i in range(3))) / norm
        pv = sum(mpmath.mpf(c.numerator) / c.denominator * lam**k for k, c in enumerate(poly.coefficients))
    fixed = _fixed_columns(b)
    note = None
    if fixed:
        names = ", ".join(f"v{i + 1}" for i in fixed)
        note = f"period fixes {names}; other vertices may close in on a segment rather than a point"
    rep = PeriodicReport((alpha, beta), poly, lam, residual, None, note, pv)
    if residual >= tol:
        rep.notes.append(f"residual {mpmath.nstr(residual, 5)} exceeds tolerance {tol}")
    return rep


def _spectrum_notes(poly):
    notes = []
    roots = poly.roots()
    others = [r for r in roots if abs(r - 1) > mpmath.mpf(10) ** -20]
    if any(abs(abs(r) - 1) < mpmath.mpf(10) ** -20 for r in others):
        notes.append("an eigenvalue other than 1 has modulus 1; the Bary cells need not shrink")
    return notes, others


def bary_periodic_eval(spec: PeriodicSpec) -> PeriodicReport:
    """Exact rational limit of the Bary cells for a periodic sequence."""
    a, b = spec.bary_matrices()
    for j in range(3):
        if sum(b[i][j] for i in range(3)) != 1:  # pragma: no cover - moves are stochastic
            raise ValueError("period matrix is not stochastic")
    poly = char_poly(b)
    minus_i = [[b[i][j] - (1 if i == j else 0) for j in range(3)] for i in range(3)]
    basis = rational_nullspace(minus_i)
    start = mat_mul(tuple(tuple(Fraction(x) for x in r) for r in BARY_M0.rows), a)
    notes, others = _spectrum_notes(poly)
    rep = PeriodicReport(None, poly, Fraction(1), Fraction(0), fixed_space=basis, notes=notes)
    if len(basis) == 1:
        v = basis[0]
        v = tuple(x / sum(v) for x in v)
        assert mat_vec(b, v) == v
        pt = mat_vec(start, v)
        rep.exact_point = RationalPoint(pt[0], pt[1])
        rep.limit_point = (pt[0], pt[1])
        return rep
    # several fixed directions: B^k tends to the projector onto them
    if len(basis) == 3:
        proj = b
    else:
        lam3 = sum(b[i][i] for i in range(3)) - 2
        proj = tuple(tuple((b[i][j] - (lam3 if i == j else 0)) / (1 - lam3) for j in range(3)) for i in range(3))
    limit = mat_mul(start, proj)
    rep.column_limits = [RationalPoint(limit[0][j], limit[1][j]) for j in range(3)]
    rep.notes.append(
        f"eigenvalue 1 has a {len(basis)}-dimensional fixed space; the cells tend to the set spanned by the column limits"
    )
    return rep


def iterate_bary(spec: PeriodicSpec, k: int):
    """Columns of M0 A B^k as plane points (exact)."""
    a, b = spec.bary_matrices()
    start = mat_mul(tuple(tuple(Fraction(x) for x in r) for r in BARY_M0.rows), a)
    m = mat_mul(start, mat_pow(b, k))
    return [RationalPoint(m[0][j], m[1][j]) for j in range(3)]
