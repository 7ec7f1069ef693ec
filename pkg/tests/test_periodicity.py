import json
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fareybary import continuous, weighted
from fareybary.errors import NonConvergenceError
from fareybary.periodicity import (
    PeriodicSpec,
    bary_periodic_eval,
    char_poly,
    dominant_direction,
    farey_periodic_eval,
    iterate_bary,
)
from fareybary.projective import M0, det3, mat_mul, mat_pow

F = Fraction


def _bisect(f, lo, hi, steps=200):
    with mpmath.workdps(60):
        lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
        for _ in range(steps):
            mid = (lo + hi) / 2
            if (f(lo) < 0) == (f(mid) < 0):
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2


def test_spec_validation_and_json():
    spec = PeriodicSpec("weighted", ["II"], ["I"], (1, 1, 1))
    assert PeriodicSpec.from_json(json.dumps(spec.to_json())) == spec
    with pytest.raises(ValueError):
        PeriodicSpec("weighted", ["IV"])
    with pytest.raises(ValueError):
        PeriodicSpec("continuous", ["I"], weights=(1, 1, 1))
    with pytest.raises(ValueError):
        PeriodicSpec("continuous", [])
    with pytest.raises(ValueError):
        PeriodicSpec("other", ["I"])


@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=3, max_size=3))
def test_char_poly_vanishes_on_matrix(rows):
    # Cayley-Hamilton, exactly
    p = char_poly(rows)
    n = [[F(x) for x in r] for r in rows]

    def mul(a, b):
        return [[sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)] for i in range(3)]

    eye = [[F(int(i == j)) for j in range(3)] for i in range(3)]
    n2 = mul(n, n)
    n3 = mul(n2, n)
    total = [[p.c0 * eye[i][j] + p.c1 * n[i][j] + p.c2 * n2[i][j] + p.c3 * n3[i][j] for j in range(3)] for i in range(3)]
    assert all(x == 0 for r in total for x in r)
    assert p.c0 == det3(rows)


def test_char_poly_text():
    b = weighted.farey_matrices(weighted.UNIT)["II"]
    assert str(char_poly(b)) == "x^3 - x^2 - x - 1"


def test_dominant_direction_repeated_root():
    d = dominant_direction(((2, 0, 0), (0, 2, 0), (0, 0, 2)))
    assert d.converged and abs(d.eigenvalue - 2) < 1e-20


def test_dominant_direction_complex_pair_not_converged():
    d = dominant_direction(((0, -2, 0), (2, 0, 0), (0, 0, 1)))
    assert not d.converged


def test_dominant_direction_singular():
    with pytest.raises(ValueError):
        dominant_direction(((1, 0, 0), (0, 0, 0), (0, 0, 1)))


def test_tribonacci():
    rep = farey_periodic_eval(PeriodicSpec("weighted", ["II"]))
    assert rep.char_poly.monic() == (1, -1, -1, -1)
    lam = _bisect(lambda x: x**3 - x**2 - x - 1, 1, 2)
    with mpmath.workdps(60):
        v1, v3 = 1, lam
        v2 = (1 + lam) / lam
        want = ((v2 + v3) / (v1 + v2 + v3), v3 / (v1 + v2 + v3))
        assert abs(rep.eigenvalue - lam) < mpmath.mpf(10) ** -25
        assert abs(rep.limit_point[0] - want[0]) < mpmath.mpf(10) ** -25
        assert abs(rep.limit_point[1] - want[1]) < mpmath.mpf(10) ** -25
    assert rep.residual < 1e-10
    assert abs(rep.poly_value) < 1e-25
    assert float(rep.limit_point[0]) == pytest.approx(0.771844506346, abs=1e-12)


def test_preperiod_shifts_limit():
    spec = PeriodicSpec("weighted", ["II"], ["I"])
    rep = farey_periodic_eval(spec)
    assert float(rep.limit_point[0]) == pytest.approx(0.647798871261, abs=1e-12)
    assert float(rep.limit_point[1]) == pytest.approx(0.228155493654, abs=1e-12)
    # oracle: the columns of M0 A B^k themselves, exactly, for large k
    a, b = spec.farey_matrices()
    m = mat_mul(M0.rows, a)
    for _ in range(80):
        m = mat_mul(m, b)
    for c in zip(*m):
        assert abs(F(c[0], c[2]) - F(str(mpmath.nstr(rep.limit_point[0], 40)))) < F(1, 10**15)
        assert abs(F(c[1], c[2]) - F(str(mpmath.nstr(rep.limit_point[1], 40)))) < F(1, 10**15)


def test_direction_stable_under_powers():
    b = weighted.farey_matrices(weighted.UNIT)["II"]
    dirs = [dominant_direction(mat_pow(b, k)).vector for k in (1, 2, 3)]
    for d in dirs[1:]:
        assert max(abs(x - y) for x, y in zip(d, dirs[0])) < 1e-25


def test_continuous_fixed_v1_period():
    rep = farey_periodic_eval(PeriodicSpec("continuous", [continuous.FIXED_V1]))
    assert str(rep.char_poly) == "x^3 - 2*x^2 + 1"
    assert rep.collapse_note and "v1" in rep.collapse_note
    s5 = 5**0.5
    assert float(rep.limit_point[0]) == pytest.approx((3 - s5) / 2, abs=1e-12)
    assert float(rep.limit_point[1]) == pytest.approx(s5 - 2, abs=1e-12)


def test_repeated_dominant_root_uses_exact_direction():
    # weighted I repeats: v1 and v2 stay, the third vertex slides to their mediant
    rep = farey_periodic_eval(PeriodicSpec("weighted", ["I"]))
    assert rep.limit_point == (0.5, 0)
    assert "v1, v2" in rep.collapse_note
    rep = farey_periodic_eval(PeriodicSpec("continuous", ["I"]))
    assert rep.limit_point == (0, 0)


class _SwapSpec:
    """Period matrix that swaps v1 and v2: eigenvalues 1, 1, -1."""

    def farey_matrices(self):
        return ((1, 0, 0), (0, 1, 0), (0, 0, 1)), ((0, 1, 0), (1, 0, 0), (0, 0, 1))


def test_farey_nonconvergence_raises():
    with pytest.raises(NonConvergenceError):
        farey_periodic_eval(_SwapSpec())


def test_bary_vi_exact():
    rep = bary_periodic_eval(PeriodicSpec("continuous", ["VI"]))
    assert rep.exact_point == (F(5, 6), F(1, 2))
    cols = iterate_bary(PeriodicSpec("continuous", ["VI"]), 100)
    for c in cols:
        assert abs(c.x - F(5, 6)) < F(1, 10**12) and abs(c.y - F(1, 2)) < F(1, 10**12)


def test_bary_fixed_vertex():
    assert bary_periodic_eval(PeriodicSpec("continuous", ["I"])).exact_point == (0, 0)
    rep = bary_periodic_eval(PeriodicSpec("weighted", ["I"]))
    assert rep.exact_point is None
    assert rep.column_limits == [(0, 0), (1, 0), (F(1, 2), 0)]


def test_bary_two_dimensional_fixed_space():
    spec = PeriodicSpec("weighted", ["I"], weights=(3, 2, 1))
    rep = bary_periodic_eval(spec)
    assert rep.exact_point is None
    assert len(rep.fixed_space) == 2
    assert rep.column_limits == [(0, 0), (1, 0), (F(2, 5), 0)]
    cols = iterate_bary(spec, 40)
    for got, want in zip(cols, rep.column_limits):
        assert abs(got.x - want.x) < F(1, 10**12) and abs(got.y - want.y) < F(1, 10**12)


@given(
    st.sampled_from(["weighted", "continuous"]),
    st.lists(st.integers(0, 5), min_size=1, max_size=4),
    st.lists(st.integers(0, 5), max_size=2),
)
def test_bary_limit_is_fixed_by_iteration(grammar, period, pre):
    kinds = weighted.KINDS if grammar == "weighted" else continuous.KINDS
    spec = PeriodicSpec(grammar, [kinds[i % len(kinds)] for i in period], [kinds[i % len(kinds)] for i in pre])
    rep = bary_periodic_eval(spec)
    if rep.exact_point is None:
        return
    # distance after many periods shrinks below a loose bound unless the spectrum says otherwise
    cols = iterate_bary(spec, 200)
    if rep.notes:
        return
    for c in cols:
        assert abs(float(c.x - rep.exact_point.x)) < 1e-6
        assert abs(float(c.y - rep.exact_point.y)) < 1e-6


@given(
    st.sampled_from(["weighted", "continuous"]),
    st.lists(st.integers(0, 5), min_size=1, max_size=4),
    st.lists(st.integers(0, 5), max_size=2),
)
def test_farey_limit_certificate(grammar, period, pre):
    kinds = weighted.KINDS if grammar == "weighted" else continuous.KINDS
    spec = PeriodicSpec(grammar, [kinds[i % len(kinds)] for i in period], [kinds[i % len(kinds)] for i in pre])
    try:
        rep = farey_periodic_eval(spec)
    except NonConvergenceError:
        return
    assert rep.residual < 1e-10
    assert abs(rep.poly_value) < 1e-10 * max(1, abs(rep.eigenvalue) ** 3)
    x, y = rep.limit_point
    eps = 1e-20
    assert -eps <= y <= x + eps and x <= 1 + eps


def test_report_json():
    out = bary_periodic_eval(PeriodicSpec("continuous", ["VI"])).to_json()
    assert out["exact_point"] == ["5/6", "1/2"]
    out = farey_periodic_eval(PeriodicSpec("weighted", ["II"])).to_json(digits=12)
    assert out["limit_point"][0].startswith("0.77184450634")
    json.dumps(out)
