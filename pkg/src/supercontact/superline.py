"""The superline R^{1|1} and the supercircle S^{1|1}.

A superfunction is ``F = f0(x) + xi*f1(x)`` with ``xi**2 = 0``.  In line mode
only nonnegative powers of ``x`` occur; circle mode admits Laurent
polynomials, which is what the residue functionals need.

Conventions used throughout the package:

* ``D = d/dxi + xi d/dx`` and ``Dbar = d/dxi - xi d/dx``, so ``D^2 = d/dx``
  and ``Dbar^2 = -d/dx``.
* ``e_{n-1} = X(x^n)`` and ``e_{n-1/2} = 2 X(xi x^n)``, where ``X`` is the
  contact Hamiltonian map from weight -1 densities to K.
* ``d/dxi`` acts from the left, so ``Ber(omega^{1/2} xi x^{-1}) = 1`` and the
  pairing ``B(omega^{1/2-lambda} F, omega^lambda G) = Ber(omega^{1/2} F G)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .scalars import ZERO, HalfInt, Scalar, as_scalar, const

__all__ = [
    "SuperPoly",
    "KElement",
    "DensityElement",
    "e",
    "apply_derivation",
    "contact_hamiltonian",
    "hamiltonian_of",
    "contact_bracket",
    "k_bracket",
    "density_action",
    "jacobi_check",
    "berezinian",
    "pairing_B",
]

HALF = Fraction(1, 2)


def _hi(n) -> HalfInt:
    return HalfInt.of(n)


class SuperPoly:
    """An element of C[x, xi] (line mode) or C[x, 1/x, xi] (circle mode).

    Stored as a map ``(a, n) -> coefficient`` for the monomial ``xi^a x^n``.
    """

    __slots__ = ("terms", "circle")

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None, circle: bool = False):
        clean: dict[tuple[int, int], Scalar] = {}
        for (a, n), c in (terms or {}).items():
            if a not in (0, 1):
                raise ValueError("xi exponent must be 0 or 1")
            n = int(n)
            if n < 0 and not circle:
                raise ValueError("negative power of x in line mode; pass circle=True")
            c = as_scalar(c)
            if c:
                clean[(a, n)] = c
        self.terms = clean
        self.circle = circle

    # construction -------------------------------------------------------
    @classmethod
    def monomial(cls, a: int, n: int, coeff=1, circle: bool | None = None) -> "SuperPoly":
        return cls({(a, n): coeff}, circle=n < 0 if circle is None else circle)

    @classmethod
    def constant(cls, c=1) -> "SuperPoly":
        return cls({(0, 0): c})

    @classmethod
    def x(cls, n: int = 1) -> "SuperPoly":
        return cls.monomial(0, n)

    @classmethod
    def xi(cls, n: int = 0) -> "SuperPoly":
        return cls.monomial(1, n)

    @classmethod
    def zero(cls, circle: bool = False) -> "SuperPoly":
        return cls({}, circle)

    def _new(self, terms, circle=None) -> "SuperPoly":
        return SuperPoly(terms, self.circle if circle is None else circle)

    # inspection ---------------------------------------------------------
    def coeff(self, a: int, n: int) -> Scalar:
        return self.terms.get((a, n), ZERO)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def even(self) -> "SuperPoly":
        return self._new({k: v for k, v in self.terms.items() if k[0] == 0})

    @property
    def odd(self) -> "SuperPoly":
        return self._new({k: v for k, v in self.terms.items() if k[0] == 1})

    def parity(self) -> int | None:
        """0 or 1 for homogeneous nonzero input, 0 for zero, None if mixed."""
        parities = {a for a, _ in self.terms}
        if len(parities) > 1:
            return None
        return parities.pop() if parities else 0

    def parts(self) -> list[tuple[int, "SuperPoly"]]:
        return [(a, part) for a, part in ((0, self.even), (1, self.odd)) if part]

    def degree(self) -> int:
        return max((n for _, n in self.terms), default=-1)

    def min_exponent(self) -> int:
        return min((n for _, n in self.terms), default=0)

    def is_polynomial(self) -> bool:
        return all(n >= 0 for _, n in self.terms)

    def at_zero(self) -> Scalar:
        """Value at x = 0, xi = 0 (line mode only)."""
        if not self.is_polynomial():
            raise ValueError("evaluation at zero needs a polynomial")
        return self.coeff(0, 0)

    def map_coeffs(self, f) -> "SuperPoly":
        return self._new({k: f(v) for k, v in self.terms.items()})

    def subs(self, assignment) -> "SuperPoly":
        return self.map_coeffs(lambda c: c.subs(assignment))

    # arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "SuperPoly":
        if not isinstance(other, SuperPoly):
            other = SuperPoly.constant(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return SuperPoly(out, self.circle or other.circle)

    __radd__ = __add__

    def __neg__(self) -> "SuperPoly":
        return self.map_coeffs(lambda c: -c)

    def __sub__(self, other) -> "SuperPoly":
        if not isinstance(other, SuperPoly):
            other = SuperPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> "SuperPoly":
        return (-self) + other

    def __mul__(self, other) -> "SuperPoly":
        if not isinstance(other, SuperPoly):
            c = as_scalar(other)
            return self.map_coeffs(lambda v: v * c)
        out: dict[tuple[int, int], Scalar] = {}
        for (a, n), u in self.terms.items():
            for (b, m), v in other.terms.items():
                if a and b:
                    continue
                k = (a + b, n + m)
                out[k] = out[k] + u * v if k in out else u * v
        return SuperPoly(out, self.circle or other.circle)

    def __rmul__(self, other) -> "SuperPoly":
        return self * other

    def __eq__(self, other) -> bool:
        if not isinstance(other, SuperPoly):
            if isinstance(other, (int, Fraction, Scalar)):
                other = SuperPoly.constant(other)
            else:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    # derivations --------------------------------------------------------
    def dx(self) -> "SuperPoly":
        return self._new({(a, n - 1): c * n for (a, n), c in self.terms.items() if n})

    def dxi(self) -> "SuperPoly":
        return self._new({(0, n): c for (a, n), c in self.terms.items() if a})

    def eps(self) -> "SuperPoly":
        return self._new({(a, n): (-c if a else c) for (a, n), c in self.terms.items()})

    def xi_times(self) -> "SuperPoly":
        return self._new({(1, n): c for (a, n), c in self.terms.items() if not a})

    def x_times(self, k: int = 1) -> "SuperPoly":
        terms = {(a, n + k): c for (a, n), c in self.terms.items()}
        return self._new(terms, circle=self.circle or any(n < 0 for _, n in terms))

    def D(self) -> "SuperPoly":
        return self.dxi() + self.dx().xi_times()

    def Dbar(self) -> "SuperPoly":
        return self.dxi() - self.dx().xi_times()

    # rendering ----------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for (a, n) in sorted(self.terms, key=lambda k: (k[0], -k[1])):
            c = self.terms[(a, n)]
            mono = "*".join(filter(None, ["ξ" if a else "", _xpow(n)]))
            cs = str(c)
            if not mono:
                pieces.append(cs)
            elif cs == "1":
                pieces.append(mono)
            elif cs == "-1":
                pieces.append("-" + mono)
            else:
                pieces.append(f"({cs})*{mono}")
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"SuperPoly({self})"


def _xpow(n: int) -> str:
    if n == 0:
        return ""
    if n == 1:
        return "x"
    return f"x^{n}" if n > 0 else f"x^({n})"


_DERIVATIONS = {
    "D": SuperPoly.D,
    "Dbar": SuperPoly.Dbar,
    "dx": SuperPoly.dx,
    "dxi": SuperPoly.dxi,
    "eps": SuperPoly.eps,
}


def apply_derivation(d: str, f: SuperPoly) -> SuperPoly:
    """Apply one of ``D``, ``Dbar``, ``dx``, ``dxi`` or ``eps`` to ``f``."""
    try:
        return _DERIVATIONS[d](f)
    except KeyError:
        raise ValueError(f"unknown derivation {d!r}") from None


# ---------------------------------------------------------------------------
# The contact algebra K
# ---------------------------------------------------------------------------


class KElement:
    """A finite combination of the basis vectors ``e_n`` of K, n in Z/2."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[object, object] | None = None):
        clean: dict[HalfInt, Scalar] = {}
        for n, c in (terms or {}).items():
            c = as_scalar(c)
            if c:
                n = _hi(n)
                clean[n] = clean[n] + c if n in clean else c
        self.terms = {n: c for n, c in clean.items() if c}

    @classmethod
    def basis(cls, n, coeff=1) -> "KElement":
        return cls({_hi(n): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def indices(self) -> list[HalfInt]:
        return sorted(self.terms)

    def parity(self) -> int | None:
        ps = {n.parity for n in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def parts(self) -> list[tuple[int, "KElement"]]:
        out = []
        for a in (0, 1):
            part = KElement({n: c for n, c in self.terms.items() if n.parity == a})
            if part:
                out.append((a, part))
        return out

    def items(self):
        return sorted(self.terms.items())

    def is_circle(self) -> bool:
        return any(n.twice < -2 for n in self.terms)

    def __add__(self, other: "KElement") -> "KElement":
        out = dict(self.terms)
        for n, c in other.terms.items():
            out[n] = out[n] + c if n in out else c
        return KElement(out)

    def __neg__(self) -> "KElement":
        return KElement({n: -c for n, c in self.terms.items()})

    def __sub__(self, other: "KElement") -> "KElement":
        return self + (-other)

    def __mul__(self, c) -> "KElement":
        c = as_scalar(c)
        return KElement({n: v * c for n, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, KElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for n, c in self.items():
            cs = str(c)
            out.append(f"e_{n}" if cs == "1" else f"({cs})*e_{n}")
        return " + ".join(out)

    __repr__ = __str__


def e(n, coeff=1) -> KElement:
    """The basis vector ``coeff * e_n``."""
    return KElement.basis(n, coeff)


def _basis_bracket(n: HalfInt, m: HalfInt) -> tuple[HalfInt, Scalar]:
    nv, mv = n.value, m.value
    if n.is_integer and m.is_integer:
        c = mv - nv
    elif n.is_integer:
        c = mv - nv / 2
    elif m.is_integer:
        c = -(nv - mv / 2)
    else:
        c = Fraction(2)
    return n + m, const(c)


def k_bracket(a: KElement, b: KElement) -> KElement:
    """The Lie superbracket of K, extended bilinearly from the basis table."""
    out: dict[HalfInt, Scalar] = {}
    for n, u in a.terms.items():
        for m, v in b.terms.items():
            idx, c = _basis_bracket(n, m)
            if c:
                t = c * u * v
                out[idx] = out[idx] + t if idx in out else t
    return KElement(out)


def jacobi_check(a: KElement, b: KElement, c: KElement) -> bool:
    """Graded Jacobi identity on the homogeneous components of a, b, c."""
    for pa, A in a.parts():
        for pb, B in b.parts():
            for _, C in c.parts():
                lhs = k_bracket(A, k_bracket(B, C))
                rhs = k_bracket(k_bracket(A, B), C)
                sign = -1 if pa * pb else 1
                rhs = rhs + k_bracket(B, k_bracket(A, C)) * sign
                if lhs != rhs:
                    return False
    return True


# ---------------------------------------------------------------------------
# Tensor densities
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DensityElement:
    """``omega^weight * body`` in F(weight), parity shifted when ``shift`` is 1."""

    weight: Scalar
    body: SuperPoly
    shift: int = 0

    def __post_init__(self):
        object.__setattr__(self, "weight", as_scalar(self.weight))
        object.__setattr__(self, "shift", int(self.shift) % 2)

    @classmethod
    def of(cls, weight, body, shift: int = 0) -> "DensityElement":
        if not isinstance(body, SuperPoly):
            body = SuperPoly.constant(body)
        return cls(as_scalar(weight), body, shift)

    def with_body(self, body: SuperPoly) -> "DensityElement":
        return DensityElement(self.weight, body, self.shift)

    def parity(self) -> int | None:
        p = self.body.parity()
        return None if p is None else (p + self.shift) % 2

    def is_zero(self) -> bool:
        return self.body.is_zero()

    def __bool__(self) -> bool:
        return bool(self.body)

    def _check(self, other: "DensityElement"):
        if self.weight != other.weight or self.shift != other.shift:
            raise ValueError("densities live in different modules")

    def __add__(self, other: "DensityElement") -> "DensityElement":
        self._check(other)
        return self.with_body(self.body + other.body)

    def __sub__(self, other: "DensityElement") -> "DensityElement":
        self._check(other)
        return self.with_body(self.body - other.body)

    def __neg__(self) -> "DensityElement":
        return self.with_body(-self.body)

    def __mul__(self, c) -> "DensityElement":
        return self.with_body(self.body * as_scalar(c))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, DensityElement):
            return NotImplemented
        if self.body.is_zero() and other.body.is_zero():
            return True
        return (self.weight == other.weight and self.shift == other.shift
                and self.body == other.body)

    def __hash__(self) -> int:
        return hash((self.weight, self.shift, self.body))

    def __str__(self) -> str:
        pi = "Π" if self.shift else ""
        return f"ω^({self.weight}){pi}·[{self.body}]"

    __repr__ = __str__


def hamiltonian_of(X: KElement) -> SuperPoly:
    """The superfunction F with ``X(omega^{-1} F) = X``."""
    terms: dict[tuple[int, int], Scalar] = {}
    for n, c in X.terms.items():
        if n.is_integer:
            key, val = (0, int(n) + 1), c
        else:
            key, val = (1, n.floor + 1), c * 2
        terms[key] = terms[key] + val if key in terms else val
    return SuperPoly(terms, circle=X.is_circle())


def contact_hamiltonian(f: DensityElement) -> KElement:
    """The contact vector field ``X(omega^{-1} F)`` of a weight -1 density."""
    if f.weight != -1 or f.shift:
        raise ValueError("contact Hamiltonians are weight -1 densities without shift")
    terms: dict[Fraction, Scalar] = {}
    for (a, n), c in f.body.terms.items():
        if a:
            terms[Fraction(n) - HALF] = c * HALF
        else:
            terms[Fraction(n - 1)] = c
    return KElement(terms)


def contact_bracket(F: SuperPoly, G: SuperPoly) -> SuperPoly:
    """``{F,G} = F G' - F' G - 1/2 (-1)^{|G|} D(F) D(G)``, bilinear in parts."""
    out = SuperPoly.zero(F.circle or G.circle)
    for _, f in F.parts():
        for pg, g in G.parts():
            term = f * g.dx() - f.dx() * g
            dd = f.D() * g.D() * HALF
            out = out + (term + dd if pg else term - dd)
    return out


def density_action(X: KElement, v: DensityElement) -> DensityElement:
    """``pi_lambda(X) v`` with lambda = ``v.weight``; the shift flag is carried along."""
    lam = v.weight
    F = v.body
    circle = F.circle or X.is_circle()
    if circle and not F.circle:
        F = SuperPoly(F.terms, circle=True)
    out = SuperPoly.zero(circle)
    for n, c in X.terms.items():
        if n.is_integer:
            k = int(n) + 1
            term = F.dx().x_times(k)
            if k:
                rest = F * lam + F.odd * HALF
                term = term + rest.x_times(k - 1) * k
        else:
            k = n.floor + 1
            term = F.D().x_times(k)
            if k:
                term = term + F.xi_times().x_times(k - 1) * (lam * (2 * k))
        out = out + term * c
    return v.with_body(out)


def berezinian(v: DensityElement) -> Scalar:
    """The coefficient of ``xi x^{-1}`` in a weight 1/2 density."""
    if v.weight != HALF:
        raise ValueError("the Berezinian is defined on weight 1/2 densities")
    return v.body.coeff(1, -1)


def pairing_B(u: DensityElement, v: DensityElement) -> Scalar:
    """``B(u, v) = Ber(omega^{1/2} F G)`` for u in F(1/2 - lambda), v in F(lambda)."""
    if u.weight + v.weight != HALF:
        raise ValueError("pairing needs weights summing to 1/2")
    return berezinian(DensityElement(const(HALF), u.body * v.body))
