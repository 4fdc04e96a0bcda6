"""Exact coefficient arithmetic.

Every coefficient in the package is a :class:`Scalar`: a rational function
in a fixed, ordered set of parameter symbols with Gaussian-rational
coefficients.  Numerators and the shared denominator are multivariate
polynomials over Q held by python-flint; the imaginary unit is carried as a
second numerator, so gcd normalization only ever runs over Q.

The symbol ``c`` is accepted on input only and is immediately replaced by
``lambda + p/2 - 1/4``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Union

import flint

__all__ = [
    "SYMBOLS",
    "PoleError",
    "HalfInt",
    "Scalar",
    "I",
    "ZERO",
    "ONE",
    "sym",
    "const",
    "c_param",
    "as_scalar",
    "falling_factorial",
    "binomial_general",
    "eval_at",
]

# Canonical variable order.  "e0" is reserved for step-algebra coefficients.
SYMBOLS: tuple[str, ...] = (
    "lambda", "p", "s", "r", "q", "nu", "mu", "z", "e0", "t", "u", "v", "w",
)
_CTX = flint.fmpq_mpoly_ctx.get(SYMBOLS, "deglex")
_GENS = dict(zip(SYMBOLS, _CTX.gens()))
_ALIASES = {"λ": "lambda", "lam": "lambda", "ν": "nu", "μ": "mu"}
_P0 = _CTX.from_dict({})
_P1 = _P0 + 1


class PoleError(ZeroDivisionError):
    """Raised when a denominator vanishes identically or at a point."""


Number = Union[int, Fraction, "Scalar", "HalfInt"]


@dataclass(frozen=True, order=True)
class HalfInt:
    """An element of Z/2 stored doubled, so 3/2 has ``twice == 3``."""

    twice: int

    @classmethod
    def of(cls, value) -> "HalfInt":
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, Scalar):
            value = value.as_fraction()
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, int):
            return cls(2 * value)
        f = Fraction(value)
        if (2 * f).denominator != 1:
            raise ValueError(f"{value} is not a half-integer")
        return cls(int(2 * f))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice, 2)

    @property
    def floor(self) -> int:
        return self.twice // 2

    @property
    def frac(self) -> Fraction:
        """Fractional part, 0 or 1/2."""
        return Fraction(self.twice % 2, 2)

    @property
    def parity(self) -> int:
        """0 for integers, 1 for half-odd values; (-1)^(2 value) = (-1)^parity."""
        return self.twice % 2

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __add__(self, other) -> "HalfInt":
        return HalfInt(self.twice + HalfInt.of(other).twice)

    __radd__ = __add__

    def __sub__(self, other) -> "HalfInt":
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __rsub__(self, other) -> "HalfInt":
        return HalfInt(HalfInt.of(other).twice - self.twice)

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __int__(self) -> int:
        if self.twice % 2:
            raise ValueError(f"{self} is not an integer")
        return self.twice // 2

    def __str__(self) -> str:
        return str(self.value)

    def __repr__(self) -> str:
        return f"HalfInt({self.value})"


class Scalar:
    """(re + i*im)/den with re, im, den in Q[symbols], gcd-reduced.

    The denominator has leading coefficient 1 in deglex order, so equal
    rational functions have identical components.
    """

    __slots__ = ("re", "im", "den", "_key")

    def __init__(self, re, im=None, den=None, *, _normalized: bool = False):
        im = _P0 if im is None else im
        den = _P1 if den is None else den
        if not _normalized:
            re, im, den = _normalize(re, im, den)
        self.re = re
        self.im = im
        self.den = den
        self._key = None

    # construction -----------------------------------------------------
    @staticmethod
    def parse(text: str) -> "Scalar":
        """Parse an expression in the symbols, ``c`` and ``I``."""
        import sympy

        names = {n: sympy.Symbol(n) for n in SYMBOLS}
        names.update({a: names[b] for a, b in _ALIASES.items()})
        names["c"] = names["lambda"] + names["p"] / 2 - sympy.Rational(1, 4)
        names["I"] = sympy.I
        # "lambda" is a Python keyword, so it cannot reach the parser verbatim
        text = re.sub(r"\blambda\b", "lam", text)
        return Scalar.from_sympy(sympy.sympify(text, locals=names))

    @staticmethod
    def from_sympy(expr) -> "Scalar":
        import sympy

        if expr.is_Rational:
            return const(Fraction(int(expr.p), int(expr.q)))
        if expr is sympy.I:
            return I
        if expr.is_Symbol:
            if expr.name == "c":
                return c_param()
            return sym(expr.name)
        if expr.is_Add:
            return reduce(lambda a, b: a + b, (Scalar.from_sympy(a) for a in expr.args))
        if expr.is_Mul:
            return reduce(lambda a, b: a * b, (Scalar.from_sympy(a) for a in expr.args))
        if expr.is_Pow and expr.exp.is_Integer:
            return Scalar.from_sympy(expr.base) ** int(expr.exp)
        raise ValueError(f"cannot convert {expr!r} to a Scalar")

    def to_sympy(self):
        import sympy

        gens = [sympy.Symbol(n) for n in SYMBOLS]

        def conv(poly):
            return sympy.Add(*[
                sympy.Rational(int(c.p), int(c.q)) * sympy.Mul(*[g ** int(e) for g, e in zip(gens, m)])
                for m, c in zip(poly.monoms(), poly.coeffs())
            ])

        return (conv(self.re) + sympy.I * conv(self.im)) / conv(self.den)

    # predicates --------------------------------------------------------
    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_real(self) -> bool:
        return self.im.is_zero()

    def is_constant(self) -> bool:
        return self.re.is_constant() and self.im.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def free_symbols(self) -> set[str]:
        used = set()
        for poly in (self.re, self.im, self.den):
            for name, deg in zip(SYMBOLS, poly.degrees()):
                if deg > 0:
                    used.add(name)
        return used

    def as_fraction(self) -> Fraction:
        """The value as a Fraction; only for real constants."""
        if not (self.is_constant() and self.is_real()):
            raise ValueError(f"{self} is not a rational constant")
        val = self.re.leading_coefficient() if not self.re.is_zero() else flint.fmpq(0)
        val = val / self.den.leading_coefficient()
        return Fraction(int(val.p), int(val.q))

    def as_int(self) -> int:
        f = self.as_fraction()
        if f.denominator != 1:
            raise ValueError(f"{self} is not an integer")
        return f.numerator

    # arithmetic ----------------------------------------------------------
    def __add__(self, other) -> "Scalar":
        o = as_scalar(other)
        if self.den == o.den:
            return Scalar(self.re + o.re, self.im + o.im, self.den,
                          _normalized=self.den == _P1)
        return Scalar(self.re * o.den + o.re * self.den,
                      self.im * o.den + o.im * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im, self.den, _normalized=True)

    def __sub__(self, other) -> "Scalar":
        return self + (-as_scalar(other))

    def __rsub__(self, other) -> "Scalar":
        return as_scalar(other) - self

    def __mul__(self, other) -> "Scalar":
        o = as_scalar(other)
        if self.im.is_zero() and o.im.is_zero():
            re, im = self.re * o.re, _P0
        else:
            re = self.re * o.re - self.im * o.im
            im = self.re * o.im + self.im * o.re
        den = self.den * o.den
        if den == _P1:
            return Scalar(re, im, den, _normalized=True)
        return Scalar(re, im, den)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise PoleError("division by the zero rational function")
        if self.im.is_zero():
            return Scalar(self.den, _P0, self.re)
        # 1/(a+ib) = (a-ib)/(a^2+b^2)
        norm = self.re * self.re + self.im * self.im
        return Scalar(self.den * self.re, -(self.den * self.im), norm)

    def __truediv__(self, other) -> "Scalar":
        return self * as_scalar(other).inverse()

    def __rtruediv__(self, other) -> "Scalar":
        return as_scalar(other) * self.inverse()

    def __pow__(self, n: int) -> "Scalar":
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> "Scalar":
        return Scalar(self.re, -self.im, self.den, _normalized=True)

    def real_part(self) -> "Scalar":
        return Scalar(self.re, _P0, self.den)

    def imag_part(self) -> "Scalar":
        return Scalar(self.im, _P0, self.den)

    def numerator(self) -> "Scalar":
        return Scalar(self.re, self.im, _P1, _normalized=True)

    def denominator(self) -> "Scalar":
        return Scalar(self.den, _P0, _P1, _normalized=True)

    # comparison ----------------------------------------------------------
    def _canon(self):
        if self._key is None:
            self._key = (str(self.re), str(self.im), str(self.den))
        return self._key

    def __eq__(self, other) -> bool:
        try:
            o = as_scalar(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im and self.den == o.den

    def __hash__(self) -> int:
        return hash(self._canon())

    # evaluation ----------------------------------------------------------
    def subs(self, assignment: Mapping[str, Number]) -> "Scalar":
        """Substitute symbols by Scalars (partial evaluation allowed)."""
        values = {}
        for k, v in assignment.items():
            name = _ALIASES.get(k, k)
            if name == "c":
                raise ValueError("c is not an independent symbol")
            if name not in _GENS:
                raise KeyError(f"unknown symbol {k!r}")
            values[name] = as_scalar(v)
        if not values:
            return self
        den = _subs_poly(self.den, values)
        if den.is_zero():
            raise PoleError(f"pole: denominator {self.den} vanishes at {_fmt_assign(values)}")
        num = _subs_poly(self.re, values)
        if not self.im.is_zero():
            num = num + I * _subs_poly(self.im, values)
        return num / den

    def __call__(self, **assignment) -> "Scalar":
        return self.subs(assignment)

    # text ---------------------------------------------------------------
    def __str__(self) -> str:
        if self.im.is_zero():
            num = str(self.re)
        elif self.re.is_zero():
            num = f"I*({self.im})"
        else:
            num = f"{self.re} + I*({self.im})"
        if self.den == _P1:
            return num
        return f"({num})/({self.den})"

    def __repr__(self) -> str:
        return f"Scalar({self})"


def _fmt_assign(values: Mapping[str, Scalar]) -> str:
    return "{" + ", ".join(f"{k}={v}" for k, v in values.items()) + "}"


def _normalize(re, im, den):
    if den.is_zero():
        raise PoleError("division by the zero rational function")
    if re.is_zero() and im.is_zero():
        return _P0, _P0, _P1
    if not den.is_constant():
        g = den.gcd(re)
        if not im.is_zero():
            g = g.gcd(im)
        if not g.is_constant():
            re, den = re / g, den / g
            im = im / g if not im.is_zero() else im
    lc = den.leading_coefficient()
    if lc != 1:
        inv = 1 / lc
        re, im, den = re * inv, im * inv, den * inv
    return re, im, den


def _subs_poly(poly, values: Mapping[str, Scalar]) -> Scalar:
    if all(v.is_real() and v.is_polynomial() for v in values.values()):
        args = []
        for name in SYMBOLS:
            if name in values:
                v = values[name]
                args.append(v.re * (1 / v.den.leading_coefficient()))
            else:
                args.append(_GENS[name])
        return Scalar(poly.compose(*args))
    total = ZERO
    for monom, coeff in zip(poly.monoms(), poly.coeffs()):
        term = Scalar(_P0 + coeff)
        for name, e in zip(SYMBOLS, monom):
            if e:
                base = values[name] if name in values else sym(name)
                term = term * base ** int(e)
        total = total + term
    return total


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return Scalar(_P0 + x, _normalized=True) if x else ZERO
    if isinstance(x, Fraction):
        return Scalar(_P0 + flint.fmpq(x.numerator, x.denominator))
    if isinstance(x, HalfInt):
        return as_scalar(x.value)
    if isinstance(x, flint.fmpq):
        return Scalar(_P0 + x)
    if isinstance(x, str):
        return Scalar.parse(x)
    raise TypeError(f"cannot interpret {x!r} as a Scalar")


def const(x) -> Scalar:
    return as_scalar(Fraction(x) if not isinstance(x, (Scalar, HalfInt)) else x)


def sym(name: str) -> Scalar:
    name = _ALIASES.get(name, name)
    if name == "c":
        return c_param()
    return Scalar(_GENS[name], _normalized=True)


def c_param(lam=None, p=None) -> Scalar:
    """c(lambda, p) = lambda + p/2 - 1/4."""
    lam = sym("lambda") if lam is None else as_scalar(lam)
    p = sym("p") if p is None else as_scalar(p)
    return lam + p / 2 - Fraction(1, 4)


ZERO = Scalar(_P0, _normalized=True)
ONE = Scalar(_P1, _normalized=True)
I = Scalar(_P0, _P1, _P1, _normalized=True)


def falling_factorial(z, n: int) -> Scalar:
    """z(z-1)...(z-n+1); the empty product for n = 0."""
    if n < 0:
        raise ValueError("n must be natural")
    z = as_scalar(z)
    out = ONE
    for k in range(n):
        out = out * (z - k)
    return out


def binomial_general(z, n: int) -> Scalar:
    """The generalized binomial coefficient falling_factorial(z, n)/n!."""
    out = falling_factorial(z, n)
    fact = 1
    for k in range(2, n + 1):
        fact *= k
    return out / fact


def eval_at(s, assignment: Mapping[str, Number]) -> Scalar:
    """Evaluate at a (partial) point; raises PoleError on a vanishing denominator."""
    return as_scalar(s).subs(assignment)


def scalar_sum(items: Iterable[Scalar]) -> Scalar:
    total = ZERO
    for x in items:
        total = total + x
    return total
