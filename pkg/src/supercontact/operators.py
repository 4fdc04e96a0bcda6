"""Differential and pseudodifferential operators between density modules.

An operator is held in normal form

    omega^p * sum_j G_j Dbar^{z0 - j}_{m0 - j}

with every coefficient function to the left of the formal symbols
``Dbar^z_0 = e^{i pi z/2} d_x^{z/2}`` and ``Dbar^z_1 = e^{i pi (z-1)/2}
d_x^{(z-1)/2} Dbar``.  The lower index only matters mod 2.  The phases are
never stored: the rewriting rule below already has them folded in.

Moving a function past a formal symbol uses

    Dbar^c_0 H = sum_j (-1)^j C(c/2, j) H^(j) Dbar^{c-2j}_0
    Dbar^c_1 H = sum_j (-1)^j C((c-1)/2, j)
                 [ Dbar(H)^(j) Dbar^{c-1-2j}_0 + eps(H)^(j) Dbar^{c-2j}_1 ]

which terminates when H is a polynomial or when the binomial top is a
natural number.  Otherwise the series is cut at a requested depth and the
result is flagged inexact: only its first ``depth`` slots are known.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .scalars import I, ONE, ZERO, HalfInt, Scalar, as_scalar, binomial_general, const
from .superline import DensityElement, KElement, SuperPoly, berezinian

__all__ = [
    "DEFAULT_DEPTH",
    "SuperOp",
    "FineDegree",
    "compose",
    "apply_to_density",
    "pi_operator",
    "sigma_action",
    "sbol",
    "fine_symbol",
    "conjugate",
    "sncr",
    "adler_trace",
    "TruncationError",
]

DEFAULT_DEPTH = 8
HALF = Fraction(1, 2)


class TruncationError(ValueError):
    """A requested slot lies beyond the known part of a truncated operator."""


@lru_cache(maxsize=65536)
def _binom(top: Scalar, j: int) -> Scalar:
    return binomial_general(top, j)


def _natural(s: Scalar) -> int | None:
    if s.is_constant():
        f = s.as_fraction()
        if f.denominator == 1 and f >= 0:
            return int(f)
    return None


def _nth_dx(H: SuperPoly, j: int) -> SuperPoly:
    for _ in range(j):
        if not H:
            break
        H = H.dx()
    return H


def _terminates(c: Scalar, m: int, H: SuperPoly) -> bool:
    return H.is_polynomial() or _natural((c - m) / 2) is not None


def _rewrite(c: Scalar, m: int, H: SuperPoly, max_offset: int | None):
    """Normal form of ``Dbar^c_m o H`` as ``{offset: coefficient}``.

    ``max_offset`` bounds the offsets produced; None means the series must
    terminate on its own.
    """
    top = (c - m) / 2
    nat = _natural(top)
    if max_offset is None and nat is None and not H.is_polynomial():
        raise TruncationError("non-terminating Leibniz series needs a depth")
    out: dict[int, SuperPoly] = {}
    if m == 0:
        branches = [(0, H)]
    else:
        branches = [(0, H.eps()), (1, H.Dbar())]
    j = 0
    while True:
        if max_offset is not None and 2 * j > max_offset:
            break
        if nat is not None and j > nat:
            break
        b = _binom(top, j)
        alive = False
        for extra, base in branches:
            off = 2 * j + extra
            if max_offset is not None and off > max_offset:
                continue
            d = _nth_dx(base, j)
            if d:
                alive = True
                term = d * (b if j % 2 == 0 else -b)
                if term:
                    out[off] = out[off] + term if off in out else term
        if not alive and all(_nth_dx(base, j).is_polynomial() for _, base in branches):
            break
        j += 1
    return out


@dataclass(frozen=True)
class FineDegree:
    k: Scalar
    ell: int


class SuperOp:
    """``omega^shift sum_j coeffs[j] Dbar^{z0-j}_{m0-j}`` from F(source) to F(source+shift)."""

    __slots__ = ("source", "shift", "z0", "m0", "coeffs", "exact")

    def __init__(self, source, shift, z0, m0: int, coeffs: Sequence[SuperPoly], exact: bool = True):
        self.source = as_scalar(source)
        self.shift = as_scalar(shift)
        self.z0 = as_scalar(z0)
        self.m0 = int(m0) % 2
        cs = [c if isinstance(c, SuperPoly) else SuperPoly.constant(c) for c in coeffs]
        if exact:
            while cs and not cs[-1]:
                cs.pop()
        self.coeffs = tuple(cs)
        self.exact = exact

    # construction ------------------------------------------------------
    @classmethod
    def monomial(cls, source, shift, G, z, m: int | None = None) -> "SuperOp":
        z = as_scalar(z)
        if m is None:
            n = _natural(z)
            if n is None:
                raise ValueError("lower index required for non-integral order")
            m = n
        return cls(source, shift, z, m, [G])

    @classmethod
    def identity(cls, source) -> "SuperOp":
        return cls(source, 0, 0, 0, [SuperPoly.constant(1)])

    @classmethod
    def zero(cls, source, shift, z0=0, m0: int = 0) -> "SuperOp":
        return cls(source, shift, z0, m0, [])

    @classmethod
    def differential(cls, source, shift, by_order: dict[int, SuperPoly]) -> "SuperOp":
        """Build ``omega^shift sum_j G_j Dbar^j`` from ``{j: G_j}``."""
        if not by_order:
            return cls.zero(source, shift)
        top = max(by_order)
        coeffs = [by_order.get(top - j, SuperPoly.zero()) for j in range(top + 1)]
        return cls(source, shift, top, top, coeffs)

    def _like(self, coeffs, z0=None, m0=None, exact=None, source=None, shift=None) -> "SuperOp":
        return SuperOp(
            self.source if source is None else source,
            self.shift if shift is None else shift,
            self.z0 if z0 is None else z0,
            self.m0 if m0 is None else m0,
            coeffs,
            self.exact if exact is None else exact,
        )

    # inspection ---------------------------------------------------------
    @property
    def depth(self) -> int:
        return len(self.coeffs)

    @property
    def target(self) -> Scalar:
        return self.source + self.shift

    def coeff(self, j: int) -> SuperPoly:
        if j < len(self.coeffs):
            return self.coeffs[j]
        if self.exact:
            return SuperPoly.zero()
        raise TruncationError(f"slot {j} is beyond the known depth {self.depth}")

    def slot_order(self, j: int) -> tuple[Scalar, int]:
        """The formal symbol ``(z, m)`` carried by slot j."""
        return self.z0 - j, (self.m0 - j) % 2

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs)

    def is_differential(self) -> bool:
        if not self.exact:
            return False
        n = _natural(self.z0)
        if self.is_zero():
            return True
        return n is not None and (n - self.m0) % 2 == 0 and len(self.coeffs) <= n + 1

    def is_circle(self) -> bool:
        return any(c.circle for c in self.coeffs)

    def parity(self) -> int | None:
        ps = set()
        for j, G in enumerate(self.coeffs):
            for a, _ in G.parts():
                ps.add((a + self.m0 - j) % 2)
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def parts(self) -> list[tuple[int, "SuperOp"]]:
        """Homogeneous components, tagged by parity."""
        out = []
        for par in (0, 1):
            cs = []
            for j, G in enumerate(self.coeffs):
                want = (par - self.m0 + j) % 2
                cs.append(G.odd if want else G.even)
            op = self._like(cs)
            if not op.is_zero():
                out.append((par, op))
        return out

    def fine_degree(self) -> FineDegree:
        return FineDegree(self.z0 / 2, self.m0)

    def trimmed(self) -> "SuperOp":
        """Drop vanishing leading slots, lowering the lead degree."""
        cs = list(self.coeffs)
        k = 0
        while k < len(cs) and not cs[k]:
            k += 1
        if k == len(cs):
            if self.exact:
                return self._like([], z0=self.z0, m0=self.m0)
            k = max(0, k - 1)
        if k == 0:
            return self
        return self._like(cs[k:], z0=self.z0 - k, m0=self.m0 - k)

    def padded(self, z0) -> "SuperOp":
        """Re-express with a higher lead degree ``z0`` by prepending zero slots."""
        d = _natural(as_scalar(z0) - self.z0)
        if d is None:
            raise ValueError("lead degrees differ by a non-natural amount")
        if d == 0:
            return self
        cs = [SuperPoly.zero()] * d + list(self.coeffs)
        return self._like(cs, z0=as_scalar(z0), m0=self.m0 + d)

    def map_coeffs(self, f) -> "SuperOp":
        return self._like([f(c) for c in self.coeffs])

    def subs(self, assignment) -> "SuperOp":
        return SuperOp(
            self.source.subs(assignment), self.shift.subs(assignment),
            self.z0.subs(assignment), self.m0,
            [c.subs(assignment) for c in self.coeffs], self.exact,
        )

    # arithmetic ---------------------------------------------------------
    def _aligned(self, other: "SuperOp") -> tuple["SuperOp", "SuperOp"]:
        if self.source != other.source or self.shift != other.shift:
            raise ValueError("operators act between different modules")
        if other.is_zero() and other.exact:
            other = SuperOp(self.source, self.shift, self.z0, self.m0, [])
        if self.is_zero() and self.exact:
            return SuperOp(self.source, self.shift, other.z0, other.m0, []), other
        diff = self.z0 - other.z0
        a, b = self, other
        if _natural(diff) is not None:
            b = other.padded(self.z0)
        elif _natural(-diff) is not None:
            a = self.padded(other.z0)
        else:
            raise ValueError("lead degrees are not aligned")
        if a.m0 != b.m0:
            raise ValueError("operators lie in different symbol chains")
        return a, b

    def __add__(self, other: "SuperOp") -> "SuperOp":
        a, b = self._aligned(other)
        exact = a.exact and b.exact
        n = max(a.depth, b.depth)
        if not a.exact:
            n = min(n, a.depth)
        if not b.exact:
            n = min(n, b.depth)
        cs = [a.coeff(j) + b.coeff(j) for j in range(n)]
        return a._like(cs, exact=exact)

    def __neg__(self) -> "SuperOp":
        return self.map_coeffs(lambda c: -c)

    def __sub__(self, other: "SuperOp") -> "SuperOp":
        return self + (-other)

    def __mul__(self, c) -> "SuperOp":
        c = as_scalar(c)
        return self.map_coeffs(lambda g: g * c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, SuperOp):
            return NotImplemented
        try:
            return (self - other).is_zero()
        except ValueError:
            return False

    def __hash__(self):
        return hash((self.source, self.shift, self.z0, self.m0))

    def __str__(self) -> str:
        terms = []
        for j, G in enumerate(self.coeffs):
            if G:
                z, m = self.slot_order(j)
                terms.append(f"[{G}]·D̄^({z})_{m}")
        body = " + ".join(terms) if terms else "0"
        tail = "" if self.exact else f" + O(slot {self.depth})"
        return f"ω^({self.shift})·({body}{tail}) on F({self.source})"

    __repr__ = __str__


# ---------------------------------------------------------------------------
# composition
# ---------------------------------------------------------------------------


def compose(T: SuperOp, S: SuperOp, depth: int | None = None) -> SuperOp:
    """Normal form of ``T o S``.

    The known depth of the result is bounded by the depths of inexact inputs
    and, when some Leibniz series fails to terminate, by ``depth``
    (default ``DEFAULT_DEPTH``).
    """
    if T.source != S.target:
        raise ValueError(f"weight chain mismatch: {T.source} != {S.target}")
    limits = [op.depth for op in (T, S) if not op.exact]
    needs_cut = any(
        not _terminates(T.z0 - i, (T.m0 - i) % 2, H)
        for i, G in enumerate(T.coeffs) if G
        for H in S.coeffs if H
    )
    if needs_cut:
        limits.append(DEFAULT_DEPTH if depth is None else depth)
    elif depth is not None and limits:
        limits.append(depth)
    limit = min(limits) if limits else None
    out: dict[int, SuperPoly] = {}
    for i, G in enumerate(T.coeffs):
        if not G or (limit is not None and i >= limit):
            continue
        c, m = T.slot_order(i)
        for k, H in enumerate(S.coeffs):
            if not H or (limit is not None and i + k >= limit):
                continue
            max_off = None if limit is None else limit - 1 - i - k
            for t, P in _rewrite(c, m, H, max_off).items():
                term = G * P
                if term:
                    J = i + k + t
                    out[J] = out[J] + term if J in out else term
    n = limit if limit is not None else (max(out) + 1 if out else 0)
    cs = [out.get(J, SuperPoly.zero()) for J in range(n)]
    res = SuperOp(S.source, T.shift + S.shift, T.z0 + S.z0, T.m0 + S.m0, cs, exact=limit is None)
    return res.trimmed()


def _dbar_power(n: int, F: SuperPoly) -> SuperPoly:
    for _ in range(n):
        F = F.Dbar()
    return F


def apply_to_density(T: SuperOp, v: DensityElement) -> DensityElement:
    """Apply a differential operator to a density of weight ``T.source``."""
    if not T.is_differential():
        raise ValueError("only differential operators act on densities")
    if v.weight != T.source:
        raise ValueError("density weight does not match the operator source")
    out = SuperPoly.zero(v.body.circle)
    z = _natural(T.z0) if T.coeffs else 0
    for j, G in enumerate(T.coeffs):
        if G:
            out = out + G * _dbar_power(z - j, v.body)
    return DensityElement(T.target, out, v.shift)


# ---------------------------------------------------------------------------
# the K-actions
# ---------------------------------------------------------------------------


def pi_operator(X: KElement, lam) -> SuperOp:
    """``pi_lambda(X)`` as a second-order operator in normal form."""
    lam = as_scalar(lam)
    slots = [SuperPoly.zero(), SuperPoly.zero(), SuperPoly.zero()]
    for n, c in X.terms.items():
        if n.is_integer:
            k = int(n) + 1
            add = [SuperPoly.monomial(0, k, -1), SuperPoly.monomial(1, k - 1, Fraction(k, 2)) if k else SuperPoly.zero(),
                   SuperPoly.monomial(0, k - 1, lam * k) if k else SuperPoly.zero()]
        else:
            k = n.floor + 1
            add = [SuperPoly.monomial(1, k, -2), SuperPoly.monomial(0, k),
                   SuperPoly.monomial(1, k - 1, lam * (2 * k)) if k else SuperPoly.zero()]
        slots = [s + a * c for s, a in zip(slots, add)]
    return SuperOp(lam, 0, 2, 0, slots).trimmed()


def sigma_action(X: KElement, T: SuperOp, variant: str = "plain", depth: int | None = None) -> SuperOp:
    """``pi_{lambda+p}(X) o T -/+ T o pi_lambda(X)`` with the super sign.

    ``variant="parity_twisted"`` treats T as a map into the parity-shifted
    target, which flips the sign exponent to ``|X|(|T|+1)``.
    """
    if variant not in ("plain", "parity_twisted"):
        raise ValueError(f"unknown variant {variant!r}")
    twist = 1 if variant == "parity_twisted" else 0
    result = None
    for px, Xp in X.parts():
        left = pi_operator(Xp, T.target)
        right = pi_operator(Xp, T.source)
        for pt, Tp in T.parts():
            sign = -1 if px * (pt + twist) % 2 == 0 else 1
            term = compose(left, Tp, depth) + compose(Tp, right, depth) * sign
            result = term if result is None else result + term
    if result is None:
        return SuperOp(T.source, T.shift, T.z0, T.m0, [], T.exact)
    return result.trimmed()


def sbol(p, lam) -> SuperOp:
    """The affine super Bol operator ``omega^p Dbar^{2p}`` on F(lambda)."""
    p = HalfInt.of(p)
    if p.twice < 0:
        raise ValueError("p must be nonnegative")
    return SuperOp(lam, p.value, p.twice, p.twice, [SuperPoly.constant(1)])


def fine_symbol(T: SuperOp, k) -> DensityElement:
    """The image of T in ``D^k / D^{k-1/2}``, a density of weight p - k."""
    k = as_scalar(k)
    bit = _natural(2 * k)
    shift = 0 if bit is None else bit % 2
    U = T.trimmed()
    G = SuperPoly.zero()
    if not U.is_zero():
        gap = _natural(2 * k - U.z0)
        if gap is None:
            raise ValueError("operator is not in the requested filtration level")
        if gap == 0:
            G = U.coeff(0)
    return DensityElement(T.shift - k, G, shift)


# ---------------------------------------------------------------------------
# conjugation, residue and trace
# ---------------------------------------------------------------------------

_I_POWERS = (ONE, I, -ONE, -I)


def conjugate(T: SuperOp, depth: int | None = None) -> SuperOp:
    """``C(omega^p G Dbar^z_m) = e^{i pi (z+m)/2} (-1)^{m|G|} omega^p Dbar^z_m o G``.

    Lands in the operators from F(1/2 - p - lambda).  Needs integral orders so
    the phase is a fourth root of unity.
    """
    new_source = const(HALF) - T.shift - T.source
    slots = []
    for j, G in enumerate(T.coeffs):
        if not G:
            continue
        z, m = T.slot_order(j)
        if not z.is_constant() or z.as_fraction().denominator != 1:
            raise ValueError("conjugation needs integral orders (phase outside the Gaussian rationals)")
        slots.append((j, G, z, m))
    limit = None if T.exact else T.depth
    if any(not _terminates(z, m, G) for _, G, z, m in slots):
        cut = DEFAULT_DEPTH if depth is None else depth
        limit = cut if limit is None else min(limit, cut)
    out: dict[int, SuperPoly] = {}
    for j, G, z, m in slots:
        if limit is not None and j >= limit:
            continue
        phase = _I_POWERS[int(z.as_fraction() + m) % 4]
        bound = None if limit is None else limit - 1 - j
        for a, Gp in G.parts():
            sgn = -phase if m * a else phase
            for t, P in _rewrite(z, m, Gp, bound).items():
                J = j + t
                out[J] = out[J] + P * sgn if J in out else P * sgn
    n = limit if limit is not None else (max(out) + 1 if out else 0)
    cs = [out.get(J, SuperPoly.zero()) for J in range(n)]
    return SuperOp(new_source, T.shift, T.z0, T.m0, cs, exact=limit is None)


def sncr(T: SuperOp) -> Scalar:
    """Super noncommutative residue: Ber of the ``Dbar^{-1}_1`` coefficient."""
    if T.shift != 0:
        raise ValueError("the residue is defined on operators with p = 0")
    U = T
    if not U.z0.is_constant() or U.z0.as_fraction().denominator != 1:
        return ZERO
    j = int(U.z0.as_fraction()) + 1
    if j < 0 or (U.m0 - j) % 2 != 1:
        return ZERO
    G = U.coeff(j)
    return berezinian(DensityElement(const(HALF), G))


def adler_trace(T: SuperOp, S: SuperOp, depth: int | None = None) -> Scalar:
    """``A(T, S) = SNCR(T o S)`` for operators of opposite shifts."""
    if T.shift + S.shift != 0:
        raise ValueError("Adler trace pairs operators with opposite shifts")
    return sncr(compose(T, S, depth))
