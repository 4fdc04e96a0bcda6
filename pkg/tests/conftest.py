from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from supercontact.scalars import I, Scalar, const, sym
from supercontact.superline import SuperPoly

settings.register_profile(
    "exact",
    max_examples=30,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("exact")

small_fraction = st.fractions(min_value=-6, max_value=6, max_denominator=20)


@st.composite
def scalars(draw, names=("lambda", "p"), gaussian=True):
    """Small rational functions in a couple of symbols."""
    def poly():
        out = const(draw(small_fraction))
        for name in names:
            k = draw(st.integers(0, 2))
            out = out + sym(name) ** k * draw(small_fraction)
        if gaussian and draw(st.booleans()):
            out = out + I * draw(small_fraction)
        return out

    num = poly()
    den = poly()
    if not den:
        den = const(1)
    return num / den


@st.composite
def superpolys(draw, max_degree=4, circle=False):
    low = -3 if circle else 0
    keys = draw(st.lists(st.tuples(st.integers(0, 1), st.integers(low, max_degree)), min_size=1, max_size=4))
    return SuperPoly({k: draw(small_fraction) for k in keys}, circle=circle)


def half_integers(lo=-1, hi=4):
    return st.integers(2 * lo, 2 * hi).map(lambda t: Fraction(t, 2))


# criterion number -> (suite key, passed, seconds, budget, note); filled by test_acceptance
ACCEPTANCE: dict[int, tuple] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        key, passed, seconds, budget, note = ACCEPTANCE[n]
        line = f"criterion {n:2d} {'PASS' if passed else 'FAIL'}  {key:<17} {seconds:6.1f} s (budget {budget} s)"
        terminalreporter.write_line(line + (f"  {note}" if note else ""))
