from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given, settings, strategies as st

from conftest import half_integers, small_fraction
from supercontact.scalars import HalfInt, sym
from supercontact.superline import DensityElement, SuperPoly, e, k_bracket
from supercontact.cohomology import (
    Cochain,
    DensityModule,
    InsufficientPopulation,
    NonUniqueTransvectant,
    _coboundary_at,
    _sympy_lambda,
    ad_half_coefficient,
    beta_bar,
    canonical_word,
    coboundary,
    constant_cochain,
    cocycle_condition,
    cube_multiplicities,
    cup,
    direct_multiplicities,
    ext0_dimension,
    ext1_classify,
    ext2_dimension,
    extension_report,
    is_coboundary,
    multiplicity,
    named_cocycle,
    relative_cochain_dimension,
    transvectant_classify,
    transvectant_k_equivariant,
    transvectant_solve,
)

L = sym("lambda")
HALF = Fraction(1, 2)
CUTOFF = 5


@st.composite
def one_cochains(draw, weight=L):
    parity = draw(st.integers(0, 1))
    vals = {}
    for t in draw(st.lists(st.integers(-2, 2 * CUTOFF + 2), max_size=5, unique=True)):
        n = HalfInt(t)
        a = (parity + n.parity) % 2
        body = SuperPoly({(a, draw(st.integers(0, 3))): draw(small_fraction)})
        vals[(n,)] = DensityElement(weight, body)
    return Cochain(1, parity, DensityModule(weight), values=vals)


@st.composite
def zero_cochains(draw, weight=L):
    body = SuperPoly({(draw(st.integers(0, 1)), draw(st.integers(0, 4))): draw(small_fraction)})
    return constant_cochain(DensityElement(weight, body), DensityModule(weight))


@given(zero_cochains())
def test_dd_vanishes_in_degree_zero(phi):
    assert coboundary(coboundary(phi)).is_zero(CUTOFF)


@given(one_cochains())
def test_dd_vanishes_in_degree_one(phi):
    assert coboundary(coboundary(phi)).is_zero(CUTOFF)


@given(one_cochains(), half_integers(-1, 3), half_integers(-1, 3))
def test_superalternation(phi, a, b):
    x, y = HalfInt.of(a), HalfInt.of(b)
    d = coboundary(phi)
    swap = -1 if x.parity * y.parity == 0 else 1
    assert _coboundary_at(phi, (y, x)) == d.value((x, y)) * swap
    assert d.value((y, x)) == _coboundary_at(phi, (y, x))


def test_wedge_square_of_odd_generator_survives():
    odd, even = HalfInt(3), HalfInt(2)
    assert canonical_word((odd, odd))[0] == 1
    assert canonical_word((even, even))[0] == 0


@given(one_cochains(), one_cochains(weight=Fraction(1, 3)))
def test_cup_is_compatible_with_the_coboundary(a, b):
    lhs = coboundary(cup(a, b))
    rhs = cup(coboundary(a), b) - cup(a, coboundary(b))
    assert (lhs - rhs).is_zero(CUTOFF - 1)


@given(zero_cochains(), one_cochains(weight=Fraction(1, 3)))
def test_cup_leibniz_in_degree_zero(a, b):
    lhs = coboundary(cup(a, b))
    assert (lhs - cup(coboundary(a), b) - cup(a, coboundary(b))).is_zero(CUTOFF - 1)


@pytest.mark.parametrize("which", ["theta", "alpha", "beta"])
def test_named_cocycles_are_closed_and_nontrivial(which):
    c = named_cocycle(which)
    assert coboundary(c).is_zero(6)
    assert not is_coboundary(c, 6).exact


def test_relativity():
    alpha, beta = named_cocycle("alpha"), named_cocycle("beta")
    for t in (-2, -1, 0):
        assert alpha(HalfInt(t)).is_zero()
    for t in (-2, -1, 0, 1, 2):
        assert beta(HalfInt(t)).is_zero()
    assert not alpha(HalfInt(1)).is_zero()
    assert not beta(HalfInt(3)).is_zero()


def test_theta_cup_theta_vanishes():
    theta = named_cocycle("theta")
    assert cup(theta, theta).is_zero(6)


@given(one_cochains(), one_cochains(weight=Fraction(1, 3)), half_integers(-1, 3), half_integers(-1, 3))
def test_cup_of_one_cochains_is_the_two_term_formula(a, b, x, y):
    X, Y = HalfInt.of(x), HalfInt.of(y)
    comp = DensityModule.compose
    first = comp(a(X), b(Y)) * (-1 if X.parity * b.parity else 1)
    second = comp(a(Y), b(X)) * (-1 if Y.parity * (X.parity + b.parity) % 2 else 1)
    assert cup(a, b).value((X, Y)) == first - second


def test_beta_cup_beta_magnitude():
    # the two-term formula gives -2 beta(e_3/2)^2 with beta(e_3/2) = 4 omega^(3/2)
    beta = named_cocycle("beta")
    assert beta(HalfInt(3)).body == SuperPoly.constant(4)
    v = cup(beta, beta).value((HalfInt(3), HalfInt(3)))
    assert v.weight == 3 and v.body == SuperPoly.constant(-32)


def test_table_cochain_reports_missing_weights():
    phi = Cochain(1, 0, DensityModule(L), values={}, populated=2)
    with pytest.raises(InsufficientPopulation):
        phi(HalfInt(8))


@pytest.mark.parametrize("p", [Fraction(3, 2), 2, Fraction(5, 2)])
def test_beta_bar_is_closed_in_the_generic_range(p):
    assert coboundary(beta_bar(p, L)).is_zero(6)


def test_beta_bar_special_values():
    assert not coboundary(beta_bar(3, L)).is_zero(6)
    assert coboundary(beta_bar(3, 0)).is_zero(6)
    assert coboundary(beta_bar(3, Fraction(-5, 2))).is_zero(6)


def test_cocycle_conditions():
    lam = _sympy_lambda()
    ratio = sympy.cancel(cocycle_condition(Fraction(4)) / (16 * lam**2 + 56 * lam + 16))
    assert ratio.is_number and ratio != 0
    report = ext1_classify(None, 4)
    assert report.conditions["cocycle_in_c"] == "16*c**2 - 33 = 0"


@pytest.mark.parametrize(
    "lam, p, dim",
    [
        (Fraction(1, 3), 2, 1),
        (Fraction(1, 3), 3, 0),
        (0, 3, 1),
        (Fraction(-5, 2), 3, 1),
        (Fraction(-1, 2), Fraction(3, 2), 0),
        (Fraction(1, 5), Fraction(3, 2), 1),
        ("(-7+sqrt(33))/4", 4, 1),
        (Fraction(1, 3), Fraction(9, 2), 0),
    ],
)
def test_ext1_dimensions(lam, p, dim):
    assert ext1_classify(lam, p).dimension == dim


@pytest.mark.parametrize(
    "lam, p, dim",
    [
        (Fraction(1, 3), 2, 0),
        (Fraction(1, 3), Fraction(5, 2), 0),
        (0, 3, 1),
        (Fraction(-5, 2), 3, 1),
        (Fraction(1, 3), 3, 0),
        (Fraction(-3, 2), Fraction(7, 2), 1),
        (Fraction(1, 3), Fraction(7, 2), 0),
        ("(-7+sqrt(33))/4", 4, 1),
        (Fraction(1, 3), 4, 0),
        (-2, Fraction(9, 2), 1),
        (Fraction(1, 3), Fraction(9, 2), 0),
        (Fraction(1, 3), 5, 1),
        (Fraction(-5, 2), Fraction(11, 2), 2),
        (Fraction(1, 3), Fraction(11, 2), 1),
    ],
)
def test_ext2_dimensions(lam, p, dim):
    rep = ext2_dimension(lam, p)
    assert rep.covered and rep.dimension == dim


def test_ext2_beyond_the_table_is_unknown():
    rep = ext2_dimension(Fraction(1, 3), 6)
    assert not rep.covered and rep.dimension is None


@pytest.mark.parametrize("twice_p", range(0, 16))
def test_relative_cochains_match_decompositions(twice_p):
    # s-maps F(mu) -> D(lam, p) exist once for every mu <= p with p - mu in N/2
    p = Fraction(twice_p, 2)
    from_squares = sum(multiplicity("sym", j, 2) for j in range(0, twice_p - 6 + 1))
    from_cubes = sum(cube_multiplicities(max(twice_p - 9, 0))) if twice_p >= 9 else 0
    assert relative_cochain_dimension(2, p) == from_squares
    assert relative_cochain_dimension(3, p) == from_cubes


@pytest.mark.parametrize("twice_n", range(3, 16))
def test_ad_half_coefficient_is_the_iterated_bracket(twice_n):
    n = Fraction(twice_n, 2)
    X = e(Fraction(3, 2))
    for _ in range(twice_n - 3):
        X = k_bracket(e(HALF), X)
    assert X == e(n, ad_half_coefficient(n))


def test_invariant_operators():
    assert ext0_dimension(Fraction(2, 3), 0) == 1
    assert ext0_dimension(0, HALF) == 1
    assert ext0_dimension(Fraction(2, 3), HALF) == 0


@pytest.mark.parametrize("kind", ["sym", "wedge"])
@pytest.mark.parametrize("n", [2, 3])
def test_multiplicities_match_dimension_counts(kind, n):
    direct = direct_multiplicities(kind, n, 10)
    assert [multiplicity(kind, j, n) for j in range(11)] == direct


def test_cube_multiplicities():
    assert cube_multiplicities(10) == direct_multiplicities("sym", 3, 10)


@pytest.mark.parametrize(
    "mu, nu, k, invariant",
    [
        (Fraction(1, 3), Fraction(2, 7), HALF, True),
        (Fraction(1, 3), Fraction(2, 7), 1, True),
        (0, Fraction(2, 7), Fraction(3, 2), True),
        (Fraction(1, 3), Fraction(2, 7), Fraction(3, 2), False),
        (0, 0, 2, True),
        (0, Fraction(1, 3), 2, False),
        (Fraction(1, 3), Fraction(2, 7), Fraction(5, 2), False),
        (Fraction(1, 3), Fraction(2, 7), 3, False),
    ],
)
def test_transvectant_classification(mu, nu, k, invariant):
    assert transvectant_classify(mu, nu, k) == invariant


@settings(max_examples=15)
@given(small_fraction, small_fraction, st.integers(1, 6))
def test_transvectant_routes_agree(mu, nu, twice_k):
    off_diagonal_resonance = mu != nu and (2 * (mu + nu)).denominator == 1 and mu + nu <= 0
    assume(not off_diagonal_resonance)
    J = transvectant_solve(mu, nu, Fraction(twice_k, 2), require_unique=False)
    if J.nullity == 1:
        assert transvectant_k_equivariant(J) == transvectant_classify(mu, nu, Fraction(twice_k, 2))


def test_off_diagonal_resonance_is_refused():
    with pytest.raises(NonUniqueTransvectant):
        transvectant_classify(0, -1, HALF)


def test_extension_examples():
    assert extension_report(-2, [Fraction(3, 2), Fraction(3, 2)]).exists is False
    rep = extension_report(1, [2, Fraction(3, 2), Fraction(3, 2)])
    assert rep.exists and rep.unique
    assert extension_report(Fraction(-1, 2), [Fraction(3, 2)]).exists is False
    assert extension_report(1, [5, 5, 5, 5]).covered is False
