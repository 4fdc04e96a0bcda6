from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from conftest import small_fraction, superpolys
from supercontact.scalars import PoleError, c_param, const, sym
from supercontact.superline import DensityElement, SuperPoly, e
from supercontact.operators import SuperOp, sigma_action
from supercontact.conformal import (
    S_GENERATORS,
    B_rs,
    CJiTable,
    ExceptionalClassError,
    ResonanceError,
    apply_step,
    b_bruteforce,
    b_closed_form,
    casimir_apply,
    conformal_quantize,
    conformal_symbol,
    cq_lowest_weight,
    equivariance_residual,
    equivalence_invariant_j6,
    lowest_weight_vector,
    matrix_entry,
    step_element,
    step_scalar,
    symmetry_check,
)

L, P, S, E0 = sym("lambda"), sym("p"), sym("s"), sym("e0")
HALF = Fraction(1, 2)
generic = st.fractions(min_value=-5, max_value=5, max_denominator=20).filter(lambda x: (2 * x).denominator > 1)


def test_s_spans_close():
    assert S_GENERATORS.closes()


@pytest.mark.parametrize("degree", range(9))
def test_scasimir_squares_to_casimir(degree):
    for a in (0, 1):
        v = DensityElement(L, SuperPoly.monomial(a, degree))
        t2 = casimir_apply("T", casimir_apply("T", v))
        assert t2 - v * Fraction(1, 16) == casimir_apply("Q", v)


@given(superpolys(max_degree=3), st.integers(0, 5), st.integers(0, 1))
def test_cq_is_equivariant_symbolically(G, j, shift):
    v = DensityElement(P - Fraction(j, 2), G, shift)
    for g in S_GENERATORS.s:
        assert equivariance_residual(g, v, L, P).is_zero()


@settings(max_examples=15)
@given(superpolys(max_degree=3), st.integers(0, 5), st.integers(0, 1), small_fraction, generic)
def test_symbol_inverts_quantization(G, j, shift, lam, p):
    v = DensityElement(p - Fraction(j, 2), G, shift)
    T = conformal_quantize([v], lam, p)
    back = [w for w in conformal_symbol(T) if not w.is_zero()]
    assert back == ([v] if not v.is_zero() else [])


@given(superpolys(max_degree=3), st.integers(0, 4), st.integers(0, 1))
def test_lowest_weight_route_matches_table(G, j, shift):
    v = DensityElement(P - Fraction(j, 2), G, shift)
    assert cq_lowest_weight(v, L, P) == conformal_quantize([v], L, P).padded(j)


def test_cji_table_is_the_unique_solution():
    thm = CJiTable.from_theorem(6)
    assert thm.agrees_with(CJiTable.from_equivariance(6))
    assert all(thm[j, j] == 1 for j in range(7))


@given(small_fraction, small_fraction, generic, st.sampled_from([3, 4, 5]), st.integers(0, 1))
def test_three_routes_to_b_agree(lam, p, s, d2, m):
    r = s + Fraction(d2, 2)
    try:
        closed = b_closed_form(r, s, m, lam, p)
        routes = [b_bruteforce(r, s, m, lam, p, route) for route in ("assembly", "matrix")]
    except (PoleError, ResonanceError, ZeroDivisionError):
        assume(False)
    assert routes == [closed, closed]


@pytest.mark.parametrize("d", [HALF, Fraction(1)])
def test_short_subdiagonals_vanish(d):
    for j in range(int(2 * d), 7):
        s = P - Fraction(j, 2)
        for m in (0, 1):
            for G in (SuperPoly.constant(1), SuperPoly.xi(), SuperPoly.x()):
                v = DensityElement(s, G, m)
                for n in (-1, -HALF, 0, HALF, 1, Fraction(3, 2), 2):
                    assert matrix_entry(s + d, s, e(n), L, P, v, m).is_zero()


def test_normalizing_factors():
    assert B_rs(S + Fraction(3, 2), S) == 4
    assert B_rs(S + 2, S) == 4 * S
    assert B_rs(S + Fraction(5, 2), S) == 8 * S


def test_b_values_at_c_zero():
    p = Fraction(3, 1)
    lam = Fraction(1, 4) - p / 2
    s = Fraction(2, 7)
    got = b_closed_form(s + Fraction(3, 2), s, 1, lam, p)
    want = (p - s - HALF) * (4 * p * s + 2 * p + 1) / (16 * (s + HALF))
    assert got == want


@pytest.mark.parametrize("mu", [Fraction(3, 2), Fraction(2), Fraction(5, 2)])
@pytest.mark.parametrize("p", [3, 4, Fraction(9, 2)])
def test_step_output_is_lowest_weight(mu, p):
    st_ = step_element(mu)
    for m in (0, 1):
        T = lowest_weight_vector(L, p, 0, m)
        out = apply_step(st_, T)
        assert sigma_action(e(-HALF), out).is_zero()
        assert sigma_action(e(-1), out).is_zero()


def test_step_elements_in_e0():
    a, b = 2 * E0 - 1, 2 * E0 - 3
    assert step_element(Fraction(3, 2)).coeffs == (const(1), -1 / (E0 - 1))
    assert step_element(2).coeffs[1] == -Fraction(3, 2) / a
    # the e_{1/2}^5 coefficient of the 5/2 step element, computed from the projector
    s52 = step_element(Fraction(5, 2)).coeffs
    assert s52[1] == -2 / a and s52[3] == 6 / (a * b)


@pytest.mark.parametrize("p", range(3, 9))
def test_step_scalar_integral_p(p):
    c = c_param(L, p)
    T = SuperOp(L, p, 2 * p - 3, 1, [SuperPoly.constant(1)])
    assert step_scalar(step_element(Fraction(3, 2)), T) == -(p - 2) * (16 * c * c - 8 * p - 1) / 8


def test_step_pole_is_reported():
    with pytest.raises(ResonanceError):
        step_element(Fraction(3, 2)).at(1)


@pytest.mark.parametrize("which", ["cod", "sncr"])
@pytest.mark.parametrize("d2", [3, 4, 5])
def test_b_symmetries(which, d2):
    for m in (0, 1):
        ok, residual = symmetry_check(which, S + Fraction(d2, 2), S, m)
        assert ok, residual


def test_j6_invariant_is_exceptional_on_zero_denominator():
    v = equivalence_invariant_j6(Fraction(1, 3), 0, sym("nu"), sym("q"))
    assert not v.is_constant()
    with pytest.raises(ExceptionalClassError):
        # b^0_{lambda+2,lambda} carries the factor binom(q - lambda, 2)
        equivalence_invariant_j6(Fraction(1, 3), 0, Fraction(1, 2), Fraction(1, 3))
