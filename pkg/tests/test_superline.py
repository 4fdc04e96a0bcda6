from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import half_integers, superpolys
from supercontact.scalars import HalfInt, const, sym
from supercontact.superline import (
    DensityElement,
    KElement,
    SuperPoly,
    berezinian,
    contact_bracket,
    contact_hamiltonian,
    density_action,
    e,
    hamiltonian_of,
    jacobi_check,
    k_bracket,
    pairing_B,
)

L = sym("lambda")
HALF = Fraction(1, 2)


def sign(a, b):
    return -1 if a * b % 2 else 1


@given(superpolys(max_degree=6))
def test_dee_squares(F):
    assert F.D().D() == F.dx()
    assert F.Dbar().Dbar() == -F.dx()
    assert F.D().Dbar() + F.Dbar().D() == SuperPoly.zero()


@given(superpolys(), superpolys())
def test_superpoly_product_is_supercommutative(F, G):
    for pf, f in F.parts():
        for pg, g in G.parts():
            assert f * g == g * f * sign(pf, pg)


def test_basis_bracket_table():
    assert k_bracket(e(HALF), e(HALF)) == e(1, 2)
    assert k_bracket(e(-1), e(1)) == e(0, 2)
    assert k_bracket(e(0), e(Fraction(3, 2))) == e(Fraction(3, 2), Fraction(3, 2))
    assert k_bracket(e(-HALF), e(-HALF)) == e(-1, 2)


@given(half_integers(-1, 6), half_integers(-1, 6))
def test_hamiltonians_intertwine_brackets(n, m):
    lhs = hamiltonian_of(k_bracket(e(n), e(m)))
    assert lhs == contact_bracket(hamiltonian_of(e(n)), hamiltonian_of(e(m)))
    f = DensityElement(-1, hamiltonian_of(e(m)))
    assert contact_hamiltonian(density_action(e(n), f)) == k_bracket(e(n), e(m))


@given(half_integers(-1, 4), half_integers(-1, 4), half_integers(-1, 4))
def test_jacobi(a, b, c):
    assert jacobi_check(e(a), e(b), e(c))


@given(half_integers(-1, 4), half_integers(-1, 4), superpolys(), st.integers(0, 1))
def test_density_action_is_a_representation(n, m, F, shift):
    X, Y = e(n), e(m)
    v = DensityElement(L, F, shift)
    sg = sign(HalfInt.of(n).parity, HalfInt.of(m).parity)
    lhs = density_action(k_bracket(X, Y), v)
    rhs = density_action(X, density_action(Y, v)) - density_action(Y, density_action(X, v)) * sg
    assert lhs == rhs


@pytest.mark.parametrize("twice_n", range(-8, 9))
def test_berezinian_kills_the_image(twice_n):
    X = e(Fraction(twice_n, 2))
    for a in (0, 1):
        for b in range(-6, 7):
            v = DensityElement(HALF, SuperPoly.monomial(a, b, circle=True))
            assert berezinian(density_action(X, v)) == 0


def test_berezinian_and_pairing_examples():
    assert berezinian(DensityElement(HALF, SuperPoly.monomial(1, -1, circle=True))) == 1
    one = DensityElement(HALF - L, SuperPoly.constant(1))
    assert pairing_B(one, DensityElement(L, SuperPoly.monomial(1, -1, circle=True))) == 1
    x = DensityElement(HALF - L, SuperPoly.x())
    assert pairing_B(x, DensityElement(L, SuperPoly.x())) == 0
    xi = DensityElement(HALF - L, SuperPoly.xi())
    assert pairing_B(xi, DensityElement(L, SuperPoly.monomial(0, -1, circle=True))) == 1


@given(half_integers(-2, 4), superpolys(circle=True), superpolys(circle=True))
def test_pairing_is_invariant(n, F, G):
    X = e(n)
    lam = Fraction(2, 7)
    w = DensityElement(lam, G)
    for pu, U in F.parts():
        u = DensityElement(HALF - lam, U)
        total = pairing_B(density_action(X, u), w) + pairing_B(u, density_action(X, w)) * sign(X.parity(), pu)
        assert total == 0


def test_weight_checks():
    with pytest.raises(ValueError):
        berezinian(DensityElement(1, SuperPoly.constant(1)))
    with pytest.raises(ValueError):
        contact_hamiltonian(DensityElement(0, SuperPoly.constant(1)))
