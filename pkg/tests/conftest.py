from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def record_acceptance(number, ok, detail=""):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
    ACCEPTANCE_LINES.append((number, line))
    print(line)


@pytest.fixture
def acceptance():
    return record_acceptance


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@st.composite
def triangle_points(draw, max_den=10**6):
    """Rational points with 1 >= x >= y >= 0."""
    den = draw(st.integers(1, max_den))
    x = draw(st.integers(0, den))
    y = draw(st.integers(0, x))
    return (Fraction(x, den), Fraction(y, den))


@st.composite
def interior_points(draw, max_den=10**6):
    den = draw(st.integers(3, max_den))
    x = draw(st.integers(2, den - 1))
    y = draw(st.integers(1, x - 1))
    return (Fraction(x, den), Fraction(y, den))
