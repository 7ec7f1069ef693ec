"""Minkowski's question-mark function on [0, 1].

?(x) is evaluated by walking the Stern-Brocot (mediant) tree.  Long runs of
left or right turns are taken in one step using the continued fraction of
x, so the cost is proportional to the number of partial quotients rather than
to their sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import PrecisionExhausted
from .projective import to_fraction


def _check_unit(x: Fraction):
    if not 0 <= x <= 1:
        raise ValueError(f"{x} is outside [0, 1]")


def continued_fraction(x: Fraction) -> list:
    """Partial quotients [a0; a1, a2, ...] of a nonnegative rational."""
    p, q = x.numerator, x.denominator
    out = []
    while q:
        a, r = divmod(p, q)
        out.append(a)
        p, q = q, r
    return out


def question_mark(x) -> Fraction:
    """Exact ?(x) for rational x in [0, 1]; the result is dyadic."""
    x = to_fraction(x)
    _check_unit(x)
    if x == 0 or x == 1:
        return x
    # x = [0; a1, ..., an]: the descent turns left a1 - 1 times, then right a2
    # times, and so on.  Each run of turns contributes a signed power of two.
    quotients = continued_fraction(x)[1:]
    total = Fraction(0)
    s = 0
    sign = 1
    for a in quotients:
        s += a
        total += Fraction(2 * sign, 1 << s)
        sign = -sign
    return total


def question_mark_inverse(d) -> Fraction:
    """The rational x with ?(x) = d, for dyadic d in [0, 1]."""
    d = to_fraction(d)
    _check_unit(d)
    den = d.denominator
    if den & (den - 1):
        raise ValueError(f"{d} is not a dyadic rational")
    s = den.bit_length() - 1
    num = d.numerator
    if s == 0:
        return d
    # Walk the binary expansion of d; bits after the leading prefix come in
    # runs, and a run of equal bits is a run of equal turns in the mediant tree.
    p1, q1, p2, q2 = 0, 1, 1, 1
    bits = format(num, f"0{s}b")
    i = 0
    while i < s - 1:
        j = i
        while j < s - 1 and bits[j] == bits[i]:
            j += 1
        run = j - i
        if bits[i] == "0":
            # move right endpoint toward left: (p2,q2) <- (p1*run + p2, q1*run + q2)
            p2, q2 = p1 * run + p2, q1 * run + q2
        else:
            p1, q1 = p2 * run + p1, q2 * run + q1
        i = j
    # the last bit is a 1 and marks the mediant of the current interval
    return Fraction(p1 + p2, q1 + q2)


class FareyInterval(NamedTuple):
    left: Fraction
    right: Fraction
    depth: int

    @property
    def length(self):
        return self.right - self.left


class BaryInterval(NamedTuple):
    left: Fraction
    right: Fraction
    depth: int

    @property
    def length(self):
        return self.right - self.left


class TraceLevel(NamedTuple):
    farey: FareyInterval
    bary: BaryInterval
    ratio: Fraction


@dataclass(frozen=True)
class ApproxReal:
    """A real number known to lie in [value - radius, value + radius]."""

    value: Fraction
    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", to_fraction(self.value))
        object.__setattr__(self, "radius", to_fraction(self.radius))
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")

    @classmethod
    def from_mpmath(cls, v, dps):
        """Round an mpmath number to ``dps`` decimals with a matching radius."""
        import mpmath

        with mpmath.workdps(dps + 10):
            scaled = int(mpmath.nint(v * mpmath.mpf(10) ** dps))
        return cls(Fraction(scaled, 10**dps), Fraction(1, 10**dps))


@dataclass
class IntervalTrace:
    levels: list
    boundary: int | None = None  # depth at which x is an endpoint, if any

    @property
    def ratios(self):
        return [lv.ratio for lv in self.levels]


def interval_trace(x, k: int) -> IntervalTrace:
    """Nested Farey intervals around x, their Bary partners and length ratios.

    ``x`` is an exact rational or an :class:`ApproxReal`.  Levels run from
    depth 0 up to ``k``; the walk stops early when x is an endpoint of the
    depth-d partition (``boundary = d``).  An approximation too wide to decide
    a containment raises :class:`PrecisionExhausted` carrying the depth reached.
    """
    if k < 0:
        raise ValueError("depth must be nonnegative")
    if isinstance(x, ApproxReal):
        lo, hi = x.value - x.radius, x.value + x.radius
    else:
        lo = hi = to_fraction(x)
    if hi < 0 or lo > 1:
        raise ValueError("x is outside [0, 1]")

    p1, q1, p2, q2 = 0, 1, 1, 1
    b_left, scale = 0, 1  # Bary interval is [b_left/scale, (b_left+1)/scale]
    levels = [TraceLevel(FareyInterval(Fraction(0), Fraction(1), 0), BaryInterval(Fraction(0), Fraction(1), 0), Fraction(1))]
    if lo == hi and lo in (0, 1):
        return IntervalTrace(levels, 0)
    for depth in range(1, k + 1):
        m = Fraction(p1 + p2, q1 + q2)
        if lo == hi == m:
            return IntervalTrace(levels, depth)
        if hi < m:
            p2, q2 = p1 + p2, q1 + q2
            b_left, scale = 2 * b_left, 2 * scale
        elif lo > m:
            p1, q1 = p1 + p2, q1 + q2
            b_left, scale = 2 * b_left + 1, 2 * scale
        else:
            raise PrecisionExhausted(depth - 1)
        farey = FareyInterval(Fraction(p1, q1), Fraction(p2, q2), depth)
        bary = BaryInterval(Fraction(b_left, scale), Fraction(b_left + 1, scale), depth)
        levels.append(TraceLevel(farey, bary, Fraction(q1 * q2, scale)))
    return IntervalTrace(levels, None)


def farey_partition(k: int) -> list:
    """Endpoints of the depth-k Farey partition of [0, 1] (2^k + 1 values)."""
    pts = [Fraction(0), Fraction(1)]
    for _ in range(k):
        nxt = [pts[0]]
        for a, b in zip(pts, pts[1:]):
            nxt.append(Fraction(a.numerator + b.numerator, a.denominator + b.denominator))
            nxt.append(b)
        pts = nxt
    return pts


def bary_partition(k: int) -> list:
    """Endpoints of the depth-k dyadic partition of [0, 1]."""
    return [Fraction(i, 1 << k) for i in range((1 << k) + 1)]
