from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import half_integers, superpolys
from supercontact.scalars import I, const, sym
from supercontact.superline import DensityElement, SuperPoly, e, density_action, k_bracket
from supercontact.operators import (
    SuperOp,
    adler_trace,
    apply_to_density,
    compose,
    conjugate,
    fine_symbol,
    pi_operator,
    sbol,
    sigma_action,
    sncr,
)

L, P, Q = sym("lambda"), sym("p"), sym("q")
HALF = Fraction(1, 2)


def sign(a, b):
    return -1 if a * b % 2 else 1


@st.composite
def diff_ops(draw, source=L, shift=P, max_order=3):
    z = draw(st.integers(0, max_order))
    coeffs = [draw(superpolys(max_degree=3)) for _ in range(z + 1)]
    return SuperOp(source, shift, z, z % 2, coeffs)


@given(diff_ops(L, P), diff_ops(L + P, Q), diff_ops(L + P + Q, Fraction(1, 3)))
def test_compose_is_associative(S, T, U):
    assert compose(U, compose(T, S)) == compose(compose(U, T), S)


@given(diff_ops(L, P), superpolys())
def test_compose_matches_application(T, F):
    v = DensityElement(L, F)
    S = SuperOp(L + P, Q, 1, 1, [SuperPoly.x(), SuperPoly.xi()])
    assert apply_to_density(compose(S, T), v) == apply_to_density(S, apply_to_density(T, v))


@given(half_integers(-1, 3), diff_ops(L, Q, 2), diff_ops(L + Q, P, 2))
def test_sigma_is_a_superderivation(n, S, T):
    X = e(n)
    for pt, Tp in T.parts():
        lhs = sigma_action(X, compose(Tp, S))
        rhs = compose(sigma_action(X, Tp), S) + compose(Tp, sigma_action(X, S)) * sign(X.parity(), pt)
        assert lhs == rhs


@pytest.mark.parametrize("a", [Fraction(t, 2) for t in range(-2, 8)])
def test_sigma_is_a_representation(a):
    T = SuperOp(L, P, 2, 0, [SuperPoly.x(), SuperPoly.xi(), SuperPoly.x(2)])
    for twice_b in range(-2, 11 - int(2 * a)):
        b = Fraction(twice_b, 2)
        X, Y = e(a), e(b)
        sg = sign(X.parity(), Y.parity())
        lhs = sigma_action(k_bracket(X, Y), T)
        rhs = sigma_action(X, sigma_action(Y, T)) - sigma_action(Y, sigma_action(X, T)) * sg
        assert lhs == rhs, (a, b)


def test_sigma_of_pi_is_the_bracket():
    for a in (Fraction(-1, 2), 0, Fraction(3, 2)):
        for b in (Fraction(1, 2), 1, 2):
            got = sigma_action(e(a), pi_operator(e(b), L), depth=4)
            assert got == pi_operator(k_bracket(e(a), e(b)), L)


@given(half_integers(-1, 3), diff_ops(L, P, 3))
def test_plain_sigma_preserves_fine_degree(n, T):
    T = T.trimmed()
    out = sigma_action(e(n), T)
    if not out.is_zero() and not T.is_zero():
        assert (out.z0 - T.z0).as_fraction() <= 0


@given(half_integers(-1, 3), diff_ops(L, P, 3))
def test_twisted_sigma_raises_fine_degree_by_at_most_one(n, T):
    # fine degree is z0/2, so one step of degree is two D-bar slots
    T = T.trimmed()
    out = sigma_action(e(n), T, variant="parity_twisted")
    if not out.is_zero() and not T.is_zero():
        assert (out.z0 - T.z0).as_fraction() <= 2


def test_twisted_sigma_reaches_the_bound():
    T = SuperOp(L, P, 3, 1, [SuperPoly.constant(1)])
    assert sigma_action(e(HALF), T, variant="parity_twisted").z0 == 5


def test_fine_symbol_of_pi():
    v = fine_symbol(pi_operator(e(1), L), 1)
    assert v.weight == -1 and v.body == SuperPoly.x(2) * -1


@given(diff_ops(L, P, 3), diff_ops(L + P, Q, 3))
def test_conjugation_is_an_anti_involution(S, T):
    for pt, Tp in T.parts():
        for ps, Sp in S.parts():
            lhs = conjugate(compose(Tp, Sp))
            rhs = compose(conjugate(Sp), conjugate(Tp)) * sign(pt, ps)
            assert lhs == rhs


@given(diff_ops(L, P, 4))
def test_conjugation_squares_to_the_phase(T):
    # e^{i pi (2k + l)} with k = z/2
    assert conjugate(conjugate(T)) == T * sign(1, (T.z0 + T.m0).as_fraction())


def test_conjugation_phase_is_gaussian():
    T = SuperOp(L, 0, 1, 0, [SuperPoly.constant(1)])
    assert conjugate(T).coeff(0) == SuperPoly.constant(I)


def test_residue_and_trace_examples():
    T = SuperOp(0, 0, -1, 1, [SuperPoly.monomial(1, -1, circle=True)])
    assert sncr(T) == 1
    assert adler_trace(SuperOp.identity(0), T) == 1
    assert sncr(SuperOp(0, 0, -1, 1, [SuperPoly.monomial(0, -1, circle=True)])) == 0


def _sbol_zero_set(twice_p):
    out = sigma_action(e(Fraction(3, 2)), sbol(Fraction(twice_p, 2), L))
    return out


@pytest.mark.parametrize("twice_p", range(0, 10))
def test_sbol_invariance_boundary(twice_p):
    out = _sbol_zero_set(twice_p)
    if twice_p == 0:
        assert out.is_zero()
        return
    assert not out.is_zero()
    vanishes_at_zero = out.subs({"lambda": 0}).is_zero()
    assert vanishes_at_zero == (twice_p == 1)
    for lam in (Fraction(1, 3), Fraction(-5, 2), 1):
        assert not out.subs({"lambda": lam}).is_zero()


def test_sbol_needs_nonnegative_p():
    with pytest.raises(ValueError):
        sbol(Fraction(-1, 2), L)
