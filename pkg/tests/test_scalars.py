from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import scalars
from supercontact.scalars import (
    ONE,
    ZERO,
    HalfInt,
    I,
    PoleError,
    Scalar,
    binomial_general,
    c_param,
    const,
    falling_factorial,
    sym,
)

L, P = sym("lambda"), sym("p")


@given(scalars(), scalars(), scalars())
def test_field_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == ZERO


@given(scalars())
def test_inverse(a):
    if a:
        assert a * a.inverse() == ONE
    else:
        with pytest.raises(ZeroDivisionError):
            a.inverse()


@given(scalars(), scalars(), scalars(), scalars())
def test_fraction_equality_is_cross_multiplication(a, b, c, d):
    if b and d:
        assert (a / b == c / d) == (a * d - b * c).is_zero()


@given(scalars())
def test_normal_form_is_canonical(a):
    again = Scalar.parse(str(a)) if a.is_real() else a
    assert again == a
    assert hash(again) == hash(a)


@pytest.mark.parametrize("n", range(13))
def test_falling_factorial_recursion(n):
    z = sym("z")
    assert falling_factorial(z, n + 1) == falling_factorial(z, n) * (z - n)


def test_binomial_general_matches_integers():
    for top in range(8):
        for k in range(top + 2):
            from math import comb

            assert binomial_general(top, k) == comb(top, k)


def test_c_param_and_parse():
    assert c_param() == L + P / 2 - Fraction(1, 4)
    assert Scalar.parse("c") == c_param()
    assert Scalar.parse("lambda^2 - 1/2*lambda") == L * L - L / 2
    assert Scalar.parse("I*I") == const(-1)


def test_subs_raises_at_pole():
    with pytest.raises(PoleError):
        (ONE / (L - 1)).subs({"lambda": 1})
    assert (L / (L - 1)).subs({"lambda": 2}) == const(2)


def test_gaussian_parts():
    z = const(3) + I * 2
    assert z.conj() == const(3) - I * 2
    assert z.real_part() == const(3) and z.imag_part() == const(2)
    assert z * z.conj() == const(13)


@given(st.integers(-20, 20), st.integers(-20, 20))
def test_halfint_arithmetic(a, b):
    x, y = HalfInt(a), HalfInt(b)
    assert (x + y).value == x.value + y.value
    assert (x - y).value == x.value - y.value
    assert x.parity == a % 2
    assert HalfInt.of(x.value) == x


def test_halfint_rejects_thirds():
    with pytest.raises(ValueError):
        HalfInt.of(Fraction(1, 3))
