from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fareybary.errors import PrecisionExhausted
from fareybary.minkowski import (
    ApproxReal,
    bary_partition,
    continued_fraction,
    farey_partition,
    interval_trace,
    question_mark,
    question_mark_inverse,
)

F = Fraction

I3 = [F(0), F(1, 4), F(1, 3), F(2, 5), F(1, 2), F(3, 5), F(2, 3), F(3, 4), F(1)]
BARY3 = [F(i, 8) for i in range(9)]

unit_rationals = st.builds(
    lambda q, p: F(p % (q + 1), q), st.integers(1, 10**6), st.integers(0, 10**7)
)


def test_partition_tables():
    assert farey_partition(3) == I3
    assert bary_partition(3) == BARY3


@pytest.mark.parametrize(
    "x, want", [(F(1, 3), F(1, 4)), (F(2, 5), F(3, 8)), (0, 0), (1, 1), (F(1, 2), F(1, 2))]
)
def test_question_mark_examples(x, want):
    assert question_mark(x) == want


@pytest.mark.parametrize("d, want", [(F(1, 4), F(1, 3)), (F(1, 2), F(1, 2)), (F(7, 8), F(3, 4)), (0, 0), (1, 1)])
def test_inverse_examples(d, want):
    assert question_mark_inverse(d) == want


def test_against_partition_oracle():
    # ?(x) maps the k-th Farey partition onto the k-th dyadic one, index by index
    k = 12
    for x, d in zip(farey_partition(k), bary_partition(k)):
        assert question_mark(x) == d
        assert question_mark_inverse(d) == x


def test_round_trip_small_denominators():
    for q in range(1, 201):
        for p in range(q + 1):
            x = F(p, q)
            assert question_mark_inverse(question_mark(x)) == x


@given(unit_rationals, unit_rationals)
def test_monotone(a, b):
    if a == b:
        return
    a, b = min(a, b), max(a, b)
    assert question_mark(a) < question_mark(b)


@given(st.integers(1, 12), st.data())
def test_mediant_identity(k, data):
    pts = farey_partition(k)
    i = data.draw(st.integers(0, len(pts) - 2))
    a, b = pts[i], pts[i + 1]
    med = F(a.numerator + b.numerator, a.denominator + b.denominator)
    assert question_mark(med) == (question_mark(a) + question_mark(b)) / 2


def test_errors():
    with pytest.raises(ValueError):
        question_mark(F(3, 2))
    with pytest.raises(ValueError):
        question_mark_inverse(F(1, 3))
    with pytest.raises(ValueError):
        interval_trace(F(1, 2), -1)


def test_continued_fraction():
    assert continued_fraction(F(2, 5)) == [0, 2, 2]


def test_trace_boundary():
    tr = interval_trace(F(1, 2), 1)
    assert tr.boundary == 1
    assert tr.ratios == [1]


def _oracle_trace(x, k):
    """Brute force: the consecutive pair of the k-th partitions around x."""
    fp, bp = farey_partition(k), bary_partition(k)
    for i in range(len(fp) - 1):
        if fp[i] < x < fp[i + 1]:
            return (fp[i], fp[i + 1]), (bp[i], bp[i + 1])
    return None


@given(st.integers(2, 10**6), st.data())
def test_trace_matches_brute_force(q, data):
    x = F(data.draw(st.integers(1, q - 1)), q)
    tr = interval_trace(x, 8)
    for lv in tr.levels[1:]:
        (a, b), (c, d) = _oracle_trace(x, lv.farey.depth)
        assert (lv.farey.left, lv.farey.right) == (a, b)
        assert (lv.bary.left, lv.bary.right) == (c, d)
        assert lv.ratio == (d - c) / (b - a)
        # neighbours are unimodular
        assert lv.farey.left.denominator * lv.farey.right.numerator - lv.farey.left.numerator * lv.farey.right.denominator == 1


def test_trace_near_one_third():
    tr = interval_trace(F(1, 3) + F(1, 10**9), 3)
    assert tr.levels[3].farey[:2] == (F(1, 3), F(2, 5))


def test_trace_sqrt2_minus_one():
    with mpmath.workdps(80):
        x = ApproxReal.from_mpmath(mpmath.sqrt(2) - 1, 60)
    tr = interval_trace(x, 8)
    # frozen from an exact integer oracle: p/q < sqrt2 - 1  iff  (p+q)^2 < 2 q^2
    want = [F(1), F(1), F(3, 2), F(5, 4), F(35, 16), F(15, 8), F(51, 16), F(87, 32), F(1189, 256)]
    assert tr.ratios == want
    assert all(r > 0 for r in tr.ratios)


def test_trace_golden_conjugate_depth_20():
    with mpmath.workdps(80):
        x = ApproxReal.from_mpmath((mpmath.sqrt(5) - 1) / 2, 60)
    tr = interval_trace(x, 20)
    # frozen from the exact oracle (2p+q)^2 < 5 q^2
    assert tr.ratios[-1] == F(96932303, 524288)


def test_trace_precision_exhausted():
    x = ApproxReal(F(1, 3), F(1, 10**3))
    with pytest.raises(PrecisionExhausted) as info:
        interval_trace(x, 30)
    assert info.value.level >= 1
