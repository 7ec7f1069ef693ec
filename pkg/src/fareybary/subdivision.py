"""Point location through nested triangle subdivisions.

Both maps refine a cell ``M`` (columns = vertex triples) into children
``M @ T`` for a fixed family of transformation matrices ``T``.  To decide which
child holds a point ``P = (X, Y, D)`` we track ``lam = sadj(M) @ P``, a positive
multiple of the coordinates of ``P`` in the basis of the cell's columns.  The
point lies strictly inside the cell iff every entry of ``lam`` is positive, and
the child coordinates are ``sadj(T) @ lam``.

Long stretches of identical moves are found by galloping over powers of the
move matrix, so a point very close to an edge costs O(log run) work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import OutsideTriangleError, PrecisionExhausted
from .projective import M0, as_region, mat_mul, mat_pow, mat_vec, signed_adjugate


class Grammar:
    """A family of named transformation matrices acting on one side.

    ``continuation`` maps the kind just played to the kind whose repetition is
    worth galloping over (type I for the weighted map, the same kind for the
    continuous map).
    """

    def __init__(self, name, kinds, farey, bary, continuation):
        self.name = name
        self.kinds = tuple(kinds)
        self.farey = dict(farey)
        self.bary = dict(bary)
        self.continuation = continuation
        self.sadj = {k: signed_adjugate(self.farey[k]) for k in self.kinds}

    def farey_product(self, segments, start=M0.rows):
        m = start
        for kind, count in segments:
            m = mat_mul(m, mat_pow(self.farey[kind], count))
        return m

    def bary_product(self, segments, start=M0.rows):
        m = tuple(tuple(Fraction(x) for x in row) for row in start)
        for kind, count in segments:
            m = mat_mul(m, mat_pow(self.bary[kind], count))
        return m


@dataclass
class Encoding:
    """Result of locating a point.

    ``segments`` lists maximal blocks of identical raw moves as (kind, count).
    ``boundary`` is the partition level whose edges contain the point, or None
    when the point stayed interior for the whole requested depth.
    """

    segments: list = field(default_factory=list)
    boundary: int | None = None

    @property
    def moves(self):
        return [k for k, c in self.segments for _ in range(c)]

    @property
    def depth(self):
        return sum(c for _, c in self.segments)

    @property
    def is_boundary(self):
        return self.boundary is not None


def _pos(v):
    return v[0] > 0 and v[1] > 0 and v[2] > 0


def _nonneg(v):
    return v[0] >= 0 and v[1] >= 0 and v[2] >= 0


def _reduce(v):
    g = math.gcd(math.gcd(v[0], v[1]), v[2])
    return v if g <= 1 else (v[0] // g, v[1] // g, v[2] // g)


class Descent:
    """Stateful walk of one point down a subdivision.

    The walk starts at the base triangle, or at the cell ``root`` if given.  ``step()`` plays the next move
    (plus any galloped continuation) and returns the segments it played, or
    ``None`` once the point is found on a partition edge (``boundary`` is then
    set).  Approximate regions are refined on demand; a region that cannot be
    refined raises :class:`PrecisionExhausted` with the current depth.
    """

    def __init__(self, grammar: Grammar, p, gallop=True, root=None):
        self.grammar = grammar
        self.region = as_region(p)
        self.matrix = M0.rows if root is None else root
        self.depth = 0
        self.boundary = None
        self.gallop = gallop
        self._root_sadj = signed_adjugate(self.matrix)
        self._locate_root()

    # -- helpers ---------------------------------------------------------------
    def _coords(self):
        sadj = signed_adjugate(self.matrix) if self.depth else self._root_sadj
        return [_reduce(mat_vec(sadj, c)) for c in self.region.corners()]

    def _refine(self):
        self.region.refine(self.depth)
        self.lam = self._coords()

    def _locate_root(self):
        while True:
            self.lam = self._coords()
            if all(_pos(v) for v in self.lam):
                return
            if len(self.lam) == 1:
                if _nonneg(self.lam[0]):
                    self.boundary = 0
                    return
                raise OutsideTriangleError("point is outside the starting triangle")
            self.region.refine(0)

    def _classify(self):
        """Kind of the child strictly holding the point, or None on an edge."""
        while True:
            for kind in self.grammar.kinds:
                s = self.grammar.sadj[kind]
                child = [mat_vec(s, v) for v in self.lam]
                if all(_pos(v) for v in child):
                    return kind, child
            if len(self.lam) == 1:
                return None, None
            self._refine()

    def _gallop(self, kind, limit):
        """Largest n <= limit with the point strictly inside M @ T_kind^n."""
        if limit <= 0:
            return 0
        s = self.grammar.sadj[kind]
        t = self.grammar.farey[kind]
        s_pows, t_pows = [s], [t]
        n = 0
        lam = self.lam
        j = 0
        accepted = []
        while n + (1 << j) <= limit:
            if j >= len(s_pows):
                s_pows.append(mat_mul(s_pows[-1], s_pows[-1]))
                t_pows.append(mat_mul(t_pows[-1], t_pows[-1]))
            trial = [mat_vec(s_pows[j], v) for v in lam]
            if not all(_pos(v) for v in trial):
                break
            lam = [_reduce(v) for v in trial]
            n += 1 << j
            accepted.append(j)
            j += 1
        for i in range(j - 1, -1, -1):
            if n + (1 << i) > limit:
                continue
            trial = [mat_vec(s_pows[i], v) for v in lam]
            if all(_pos(v) for v in trial):
                lam = [_reduce(v) for v in trial]
                n += 1 << i
                accepted.append(i)
        if n:
            m = self.matrix
            for i in accepted:
                m = mat_mul(m, t_pows[i])
            self.matrix = m
            self.lam = lam
            self.depth += n
        return n

    # -- public ----------------------------------------------------------------
    def peek(self):
        """Kind of the next move without playing it (None on an edge)."""
        if self.boundary is not None:
            return None
        kind, _ = self._classify()
        return kind

    def step(self, limit=None):
        """Play one move and gallop its continuation, at most ``limit`` moves."""
        if self.boundary is not None:
            return None
        if limit is not None and limit <= 0:
            return []
        kind, child = self._classify()
        if kind is None:
            self.boundary = self.depth + 1
            return None
        self.matrix = mat_mul(self.matrix, self.grammar.farey[kind])
        self.lam = [_reduce(v) for v in child]
        self.depth += 1
        segments = [(kind, 1)]
        if self.gallop:
            cont = self.grammar.continuation(kind)
            room = None if limit is None else limit - 1
            extra = self._gallop(cont, (1 << 62) if room is None else room)
            if extra:
                if cont == kind:
                    segments = [(kind, 1 + extra)]
                else:
                    segments.append((cont, extra))
        return segments


def encode(grammar: Grammar, p, depth: int) -> Encoding:
    """Raw move segments of p down to ``depth`` moves, or up to its boundary level."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    walk = Descent(grammar, p)
    enc = Encoding()
    if walk.boundary is not None:
        enc.boundary = walk.boundary
        return enc
    while walk.depth < depth:
        segs = walk.step(depth - walk.depth)
        if segs is None:
            enc.boundary = walk.boundary
            break
        for kind, count in segs:
            if enc.segments and enc.segments[-1][0] == kind:
                enc.segments[-1] = (kind, enc.segments[-1][1] + count)
            else:
                enc.segments.append((kind, count))
    return enc


__all__ = ["Grammar", "Encoding", "Descent", "encode", "PrecisionExhausted"]
