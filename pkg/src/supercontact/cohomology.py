"""Weight-truncated Chevalley-Eilenberg cochains of K.

A cochain of degree n is evaluated on wedge words ``e_{i1} ^ ... ^ e_{in}``.
Words are stored in canonical order ``i1 <= ... <= in``; swapping two
adjacent generators X, Y multiplies by ``-(-1)^{|X||Y|}``, so a repeated
even generator kills the word while a repeated odd one does not.

Values live either in a density module F(lambda) (possibly parity shifted)
or in an operator module Hom(F(lambda), F(lambda+p)); K acts on the latter
by the supercommutator.  Cochains are populated up to a weight cutoff W on
the sum of the word indices; asking for a word beyond W raises
:class:`InsufficientPopulation` instead of silently returning zero.

Conventions, all exercised by the test suite:

* coboundary::

      d phi(X_0 ^ ... ^ X_n)
        = sum_i (-1)^{i + |X_i|(|phi| + |X_0| + ... + |X_{i-1}|)} X_i . phi(... no X_i ...)
          - (-1)^i phi(X_0 ^ ... ^ X_{i-1} ^ ad(X_i)(X_{i+1} ^ ... ^ X_n))

  with ad(X_i) acting as a derivation on the trailing factors;
* cup products are the shuffle products with Koszul signs, so on
  1-cochains ``a u b (X ^ Y) = (-1)^{|X||b|} a(X) b(Y) - (-1)^{|Y|(|X|+|b|)} a(Y) b(X)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .linalg import LinearSystem
from .operators import SuperOp, compose, sbol, sigma_action
from .scalars import ONE, ZERO, HalfInt, PoleError, Scalar, as_scalar, c_param, const, sym
from .superline import DensityElement, KElement, SuperPoly, contact_hamiltonian, density_action, e, hamiltonian_of, k_bracket

__all__ = [
    "InsufficientPopulation",
    "ModuleMismatch",
    "DensityModule",
    "OperatorModule",
    "Cochain",
    "canonical_word",
    "canonical_words",
    "coboundary",
    "cup",
    "zero_cochain",
    "constant_cochain",
    "named_cocycle",
    "srel_cochain",
    "ad_half_coefficient",
    "beta_bar",
    "sbol_cochain",
    "alpha_bar",
    "SpecialValueError",
    "CoboundaryResult",
    "word_weight",
    "is_coboundary",
    "cocycle_condition",
    "coboundary_condition",
    "ExtReport",
    "ext0_dimension",
    "ext1_classify",
    "relative_cochain_dimension",
    "ext2_dimension",
    "multiplicity",
    "power_weight_dimensions",
    "direct_multiplicities",
    "cube_multiplicities",
    "NonUniqueTransvectant",
    "TransvectantMap",
    "transvectant_solve",
    "transvectant_k_equivariant",
    "transvectant_conditions",
    "transvectant_classify",
    "cup_obstruction",
    "cup_is_exact",
    "dual_signature",
    "PsiFamily",
    "PSI_FAMILIES",
    "psido_witness",
    "psido_realization",
    "extension_report",
]

HALF = Fraction(1, 2)
Word = tuple[HalfInt, ...]


class InsufficientPopulation(LookupError):
    """A cochain was evaluated on a word above its populated weight."""


class ModuleMismatch(ValueError):
    """Values of two cochains cannot be added or composed."""


# ---------------------------------------------------------------------------
# coefficient modules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityModule:
    """F(weight), parity shifted when ``shift`` is 1."""

    weight: Scalar
    shift: int = 0

    def __post_init__(self):
        object.__setattr__(self, "weight", as_scalar(self.weight))
        object.__setattr__(self, "shift", int(self.shift) % 2)

    def zero(self) -> DensityElement:
        return DensityElement(self.weight, SuperPoly.zero(), self.shift)

    def act(self, X: KElement, v: DensityElement) -> DensityElement:
        return density_action(X, v)

    def coords(self, v: DensityElement) -> dict:
        return dict(v.body.terms)

    def compose_with(self, inner: "DensityModule") -> "DensityModule":
        if not isinstance(inner, DensityModule):
            raise ModuleMismatch("densities compose only with densities")
        return DensityModule(self.weight + inner.weight, self.shift + inner.shift)

    @staticmethod
    def compose(a: DensityElement, b: DensityElement) -> DensityElement:
        return DensityElement(a.weight + b.weight, a.body * b.body, a.shift + b.shift)

    def weight_basis(self, w, parity: int, max_order: int | None = None) -> list[DensityElement]:
        """Monomials of e0-weight ``w`` and total parity ``parity``."""
        d = as_scalar(w) - self.weight
        if not d.is_constant():
            raise ValueError("weight space of a symbolic density module")
        h = HalfInt.of(d.as_fraction()) if (2 * d.as_fraction()).denominator == 1 else None
        if h is None or h.twice < 0:
            return []
        a = h.twice % 2
        if (a + self.shift) % 2 != parity % 2:
            return []
        return [DensityElement(self.weight, SuperPoly.monomial(a, h.floor), self.shift)]

    def __str__(self) -> str:
        return f"F({self.weight})" + ("^Π" if self.shift else "")


@dataclass(frozen=True)
class OperatorModule:
    """Hom(F(lam), F(lam + p)) acted on by the supercommutator."""

    lam: Scalar
    p: Scalar

    def __post_init__(self):
        object.__setattr__(self, "lam", as_scalar(self.lam))
        object.__setattr__(self, "p", as_scalar(self.p))

    def zero(self) -> SuperOp:
        return SuperOp.zero(self.lam, self.p)

    def act(self, X: KElement, T: SuperOp) -> SuperOp:
        return sigma_action(X, T)

    def coords(self, T: SuperOp) -> dict:
        out = {}
        for J, G in enumerate(T.coeffs):
            z, m = T.slot_order(J)
            for key, c in G.terms.items():
                out[(z, m, key)] = c
        return out

    def compose_with(self, inner: "OperatorModule") -> "OperatorModule":
        if not isinstance(inner, OperatorModule) or inner.lam + inner.p != self.lam:
            raise ModuleMismatch("operator modules do not chain")
        return OperatorModule(inner.lam, inner.p + self.p)

    @staticmethod
    def compose(a: SuperOp, b: SuperOp) -> SuperOp:
        return compose(a, b)

    def weight_basis(self, w, parity: int, max_order: int | None = None) -> list[SuperOp]:
        """``omega^p xi^a x^k Dbar^j`` of e0-weight ``p + k + a/2 - j/2 = w``, j <= max_order."""
        if max_order is None:
            raise ValueError("operator weight spaces need a bound on the order")
        d = as_scalar(w) - self.p
        if not d.is_constant():
            raise ValueError("weight space with symbolic p")
        d = d.as_fraction()
        out = []
        for j in range(max_order + 1):
            h = 2 * d + j
            if h.denominator != 1 or h < 0:
                continue
            h = int(h)
            a = h % 2
            if (a + j) % 2 != parity % 2:
                continue
            out.append(SuperOp(self.lam, self.p, j, j, [SuperPoly.monomial(a, h // 2)]))
        return out

    def __str__(self) -> str:
        return f"Hom(F({self.lam}), F({self.lam} + {self.p}))"


Module = DensityModule | OperatorModule


def _is_zero(v) -> bool:
    return v.is_zero()


def _add(u, v):
    return u + v


# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------


def _hi(x) -> HalfInt:
    if isinstance(x, HalfInt):
        return x
    if isinstance(x, Scalar):
        return HalfInt.of(x.as_fraction())
    return HalfInt.of(x)


def word_weight(word: Sequence[HalfInt]) -> HalfInt:
    return HalfInt(sum(i.twice for i in word))


def canonical_word(word: Iterable) -> tuple[int, Word]:
    """Sort a word into canonical order; returns (sign, word), sign 0 if it vanishes."""
    w = [_hi(i) for i in word]
    sign = 1
    # insertion sort, tracking the superalternating sign of each adjacent swap
    for k in range(1, len(w)):
        j = k
        while j > 0 and w[j - 1].twice > w[j].twice:
            a, b = w[j - 1], w[j]
            sign = -sign if (a.parity * b.parity) % 2 == 0 else sign
            w[j - 1], w[j] = b, a
            j -= 1
    for a, b in zip(w, w[1:]):
        if a == b and a.is_integer:
            return 0, tuple(w)
    return sign, tuple(w)


def canonical_words(degree: int, cutoff, lowest=-1) -> Iterator[Word]:
    """All canonical words of the given degree with index sum at most ``cutoff``."""
    W = _hi(cutoff).twice
    lo = _hi(lowest).twice

    def rec(n: int, start: int, budget: int, allow_equal: bool):
        if n == 0:
            yield ()
            return
        i = start if allow_equal else start + 1
        while n * i <= budget:
            # an even generator may not repeat
            for tail in rec(n - 1, i, budget - i, i % 2 == 1):
                yield (HalfInt(i),) + tail
            i += 1

    yield from rec(degree, lo, W, True)


# ---------------------------------------------------------------------------
# cochains
# ---------------------------------------------------------------------------


class Cochain:
    """A K-cochain with values in ``module``.

    Either ``values`` (a sparse table over canonical words, complete up to
    ``populated``) or ``rule`` (a function of a canonical word) supplies the
    values; rule results are cached.
    """

    def __init__(
        self,
        degree: int,
        parity: int,
        module: Module,
        values: Mapping[Word, object] | None = None,
        rule: Callable[[Word], object] | None = None,
        populated=None,
        weight=ZERO,
        name: str = "",
    ):
        if (values is None) == (rule is None):
            raise ValueError("give exactly one of values or rule")
        self.degree = int(degree)
        self.parity = int(parity) % 2
        self.module = module
        self.weight = as_scalar(weight) if weight is not None else None
        self.name = name
        self._values = None if values is None else {canonical_word(w)[1]: v for w, v in values.items()}
        self._rule = rule
        self.populated = None if populated is None else _hi(populated)
        self._cache: dict[Word, object] = {}

    # evaluation ---------------------------------------------------------
    def _raw(self, word: Word):
        if self._rule is not None:
            if word not in self._cache:
                self._cache[word] = self._rule(word)
            return self._cache[word]
        if word in self._values:
            return self._values[word]
        if self.populated is not None and word_weight(word).twice > self.populated.twice:
            raise InsufficientPopulation(f"{self.name or 'cochain'} is populated up to weight "
                                         f"{self.populated}, asked for {[str(i) for i in word]}")
        return self.module.zero()

    def value(self, word: Iterable):
        word = tuple(word)
        if len(word) != self.degree:
            raise ValueError(f"degree {self.degree} cochain evaluated on {len(word)} generators")
        sign, cw = canonical_word(word)
        if sign == 0:
            return self.module.zero()
        v = self._raw(cw)
        return v if sign == 1 else -v

    def __call__(self, *indices):
        return self.value(indices)

    # bookkeeping ---------------------------------------------------------
    def populate(self, cutoff) -> "Cochain":
        """A table-backed copy holding every word up to ``cutoff``."""
        vals = {}
        for w in canonical_words(self.degree, cutoff):
            v = self._raw(w)
            if not _is_zero(v):
                vals[w] = v
        return Cochain(self.degree, self.parity, self.module, values=vals, populated=cutoff,
                       weight=self.weight, name=self.name)

    def nonzero_words(self, cutoff) -> list[Word]:
        return [w for w in canonical_words(self.degree, cutoff) if not _is_zero(self._raw(w))]

    def is_zero(self, cutoff) -> bool:
        return not self.nonzero_words(cutoff)

    def vanishes_on(self, indices: Iterable, cutoff) -> bool:
        """True when every word touching one of ``indices`` evaluates to zero."""
        idx = {_hi(i) for i in indices}
        return all(_is_zero(self._raw(w)) for w in canonical_words(self.degree, cutoff) if idx & set(w))

    def equals(self, other: "Cochain", cutoff) -> bool:
        return (self - other).is_zero(cutoff)

    def map_values(self, f: Callable, module: Module | None = None, name: str = "") -> "Cochain":
        return Cochain(self.degree, self.parity, module or self.module,
                       rule=lambda w: f(self._raw(w)), weight=self.weight, name=name or self.name)

    def _combine(self, other: "Cochain", sign: int) -> "Cochain":
        if self.degree != other.degree or self.module != other.module:
            raise ModuleMismatch("cochains of different degree or module")
        if self.parity != other.parity:
            raise ModuleMismatch("cochains of different parity")

        def rule(w):
            a, b = self._raw(w), other._raw(w)
            return a + b if sign > 0 else a - b

        return Cochain(self.degree, self.parity, self.module, rule=rule, weight=self.weight)

    def __add__(self, other: "Cochain") -> "Cochain":
        return self._combine(other, 1)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self._combine(other, -1)

    def __neg__(self) -> "Cochain":
        return self * -1

    def __mul__(self, c) -> "Cochain":
        c = as_scalar(c)
        return self.map_values(lambda v: v * c)

    __rmul__ = __mul__

    def subs(self, assignment) -> "Cochain":
        module = self.module
        if isinstance(module, DensityModule):
            module = DensityModule(module.weight.subs(assignment), module.shift)
            f = lambda v: DensityElement(v.weight.subs(assignment), v.body.subs(assignment), v.shift)
        else:
            module = OperatorModule(module.lam.subs(assignment), module.p.subs(assignment))
            f = lambda T: T.subs(assignment)
        return self.map_values(f, module=module)

    def __repr__(self) -> str:
        return f"Cochain({self.name or '?'}, degree={self.degree}, parity={self.parity}, {self.module})"


def zero_cochain(degree: int, parity: int, module: Module) -> Cochain:
    return Cochain(degree, parity, module, values={}, name="0")


def constant_cochain(v, module: Module, parity: int | None = None, name: str = "") -> Cochain:
    """The 0-cochain with value ``v``."""
    if parity is None:
        parity = v.parity() or 0
    return Cochain(0, parity, module, values={(): v}, name=name)


def coboundary(phi: Cochain, cutoff=None) -> Cochain:
    """``d phi``; tabulated on every word up to ``cutoff`` when one is given.

    Without a cutoff the result is evaluated lazily.  A table-backed phi
    raises InsufficientPopulation when it is not populated far enough
    (removing a generator of index -1 raises the weight by 1).
    """
    d = Cochain(phi.degree + 1, phi.parity, phi.module, rule=lambda w: _coboundary_at(phi, w),
                weight=phi.weight, name=f"d({phi.name})" if phi.name else "")
    return d if cutoff is None else d.populate(cutoff)


def _coboundary_at(phi: Cochain, word: Word):
    mod = phi.module
    total = mod.zero()
    for i, Xi in enumerate(word):
        pre = sum(x.parity for x in word[:i])
        v = phi.value(word[:i] + word[i + 1:])
        if not _is_zero(v):
            t = mod.act(e(Xi.value), v)
            total = total - t if (i + Xi.parity * (phi.parity + pre)) % 2 else total + t
        between = 0
        for k in range(i + 1, len(word)):
            Xk = word[k]
            for idx, c in k_bracket(e(Xi.value), e(Xk.value)).terms.items():
                u = phi.value(word[:i] + word[i + 1:k] + (idx,) + word[k + 1:])
                if not _is_zero(u):
                    sign = (i + 1 + Xi.parity * between) % 2
                    total = total + u * (-c if sign else c)
            between += Xk.parity
    return total


def _perm_sign(word: Sequence[HalfInt], order: Sequence[int]) -> int:
    """Superalternating sign of rearranging ``word`` into ``[word[k] for k in order]``."""
    sign = 1
    seq = list(order)
    # bubble sort the permutation back to identity, one adjacent swap at a time
    for a in range(len(seq)):
        for b in range(len(seq) - 1 - a):
            if seq[b] > seq[b + 1]:
                x, y = word[seq[b]], word[seq[b + 1]]
                if (x.parity * y.parity) % 2 == 0:
                    sign = -sign
                seq[b], seq[b + 1] = seq[b + 1], seq[b]
    return sign


def cup(a: Cochain, b: Cochain) -> Cochain:
    """Cup product associated to composition of values: ``(a u b)(w) = sum a(.) o b(.)``.

    Shuffle sum with Koszul signs: a generator moving past b contributes
    ``(-1)^{|X||b|}``, and reordering the word contributes its
    superalternating sign.
    """
    module = a.module.compose_with(b.module)
    n, m = a.degree, b.degree
    comp = a.module.compose

    def rule(word: Word):
        total = module.zero()
        for first in itertools.combinations(range(n + m), n):
            second = [k for k in range(n + m) if k not in first]
            sign = _perm_sign(word, list(first) + second)
            passed = sum(word[k].parity for k in first) * b.parity
            if passed % 2:
                sign = -sign
            u = a.value([word[k] for k in first])
            if _is_zero(u):
                continue
            v = b.value([word[k] for k in second])
            if _is_zero(v):
                continue
            t = comp(u, v)
            total = total + t if sign > 0 else total - t
        return total

    w = None if a.weight is None or b.weight is None else a.weight + b.weight
    return Cochain(n + m, a.parity + b.parity, module, rule=rule, weight=w,
                   name=f"{a.name}∪{b.name}" if a.name and b.name else "")


# ---------------------------------------------------------------------------
# named cocycles
# ---------------------------------------------------------------------------


_NAMED = {"theta": HalfInt(2), "alpha": HalfInt(3), "beta": HalfInt(5)}


def _bol_through_hamiltonian(k: HalfInt) -> Callable[[Word], DensityElement]:
    def rule(word: Word) -> DensityElement:
        H = hamiltonian_of(e(word[0].value))
        for _ in range(k.twice):
            H = H.Dbar()
        return DensityElement(const(k.value - 1), H)

    return rule


def named_cocycle(which: str) -> Cochain:
    """theta, alpha or beta: the Bol operator of order 1, 3/2, 5/2 on F(-1) after X^{-1}."""
    if which not in _NAMED:
        raise ValueError(f"unknown cocycle {which!r}; expected one of {sorted(_NAMED)}")
    k = _NAMED[which]
    return Cochain(1, k.parity, DensityModule(k.value - 1), rule=_bol_through_hamiltonian(k),
                   weight=ZERO, name={"theta": "θ", "alpha": "α", "beta": "β"}[which])


def inverse_hamiltonian(X: KElement) -> DensityElement:
    """``X^{-1}``: the weight -1 density whose contact field is X."""
    v = DensityElement(const(-1), hamiltonian_of(X))
    assert contact_hamiltonian(v) == X
    return v


# ---------------------------------------------------------------------------
# s-relative cochains
# ---------------------------------------------------------------------------


def ad_half_coefficient(n) -> Scalar:
    """The scalar with ``ad(e_{1/2})^{2n-3} e_{3/2} = (scalar) e_n``, n >= 3/2."""
    n = _hi(n)
    if n.twice < 3:
        raise ValueError("defined for n >= 3/2")
    k = (n - HalfInt(3)).floor
    out = const(2 if n.is_integer else 1)
    for j in range(1, k + 1):
        out = out * j
    return out


def srel_cochain(v, module: Module, name: str = "") -> Cochain:
    """The s-relative 1-cochain determined by its value ``v`` on e_{3/2}.

    ``phi(e_n) = (-1)^{(2n-1)(|v|+1)} pi(e_{1/2})^{2n-3} v / c_n`` for n >= 3/2,
    where ``c_n`` is :func:`ad_half_coefficient`; phi vanishes on e_{-1..1}.
    """
    pv = v.parity()
    if pv is None:
        raise ValueError("the seed value must be homogeneous")
    parity = (pv + 1) % 2
    powers = [v]
    up = e(HALF)

    def rule(word: Word):
        n = word[0]
        if n.twice < 3:
            return module.zero()
        N = n.twice - 3
        while len(powers) <= N:
            powers.append(module.act(up, powers[-1]))
        val = powers[N] * (ONE / ad_half_coefficient(n))
        if ((n.twice - 1) * parity) % 2:
            val = -val
        return val

    return Cochain(1, parity, module, rule=rule, weight=ZERO, name=name)


def beta_bar(p, lam) -> Cochain:
    """The s-relative operator cochain with ``e_{3/2} -> 4 omega^p Dbar^{2p-3}``."""
    p = _hi(p)
    if p.twice < 3:
        raise ValueError("needs 2p >= 3")
    module = OperatorModule(lam, p.value)
    seed = SuperOp(lam, p.value, p.twice - 3, p.twice - 3, [SuperPoly.constant(4)])
    return srel_cochain(seed, module, name=f"β̄_{p}")


def sbol_cochain(p, lam) -> Cochain:
    """``SBol_p(lambda) = omega^p Dbar^{2p}`` as a 0-cochain."""
    p = _hi(p)
    T = sbol(p, lam)
    return Cochain(0, p.parity, OperatorModule(lam, p.value), values={(): T}, name=f"SBol_{p}")


class SpecialValueError(ArithmeticError):
    """alpha_bar was asked for c = 0 without permission to extend continuously."""


def alpha_bar(p, lam, extend: bool = False) -> Cochain:
    """``(1/c)(d SBol_p + (2p-1)(2p+1-16c^2)/16 beta_bar_p)`` for p in 1/2 + N.

    The division by c is carried out with lambda symbolic and the result is
    specialized afterwards, which realizes the continuous extension to c = 0
    when ``extend`` is set.
    """
    p = _hi(p)
    if p.is_integer or p.twice < 1:
        raise ValueError("p must lie in 1/2 + N")
    lam = as_scalar(lam)
    c_here = c_param(lam, p.value)
    if not c_here and not extend:
        raise SpecialValueError("c = 0: pass extend=True for the continuous extension")
    L = sym("lambda")
    c = c_param(L, p.value)
    d_sbol = coboundary(sbol_cochain(p, L))
    coef = (2 * p.value - 1) * (2 * p.value + 1 - 16 * c * c) / 16
    bb = beta_bar(p, L) if p.twice >= 3 else None
    module = OperatorModule(L, p.value)

    def rule(word: Word):
        val = d_sbol.value(word)
        if bb is not None:
            val = val + bb.value(word) * coef
        val = val.map_coeffs(lambda G: G.map_coeffs(lambda x: x / c))
        return val.subs({"lambda": lam}) if lam != L else val

    target = OperatorModule(lam, p.value)
    return Cochain(1, 1, target if lam != L else module, rule=rule, weight=ZERO, name=f"ᾱ_{p}")


# ---------------------------------------------------------------------------
# coboundary test
# ---------------------------------------------------------------------------


@dataclass
class CoboundaryResult:
    """Outcome of solving ``d psi = phi`` on all words up to ``cutoff``."""

    exact: bool
    primitive: Cochain | None
    cutoff: HalfInt
    unknowns: int

    def __bool__(self) -> bool:
        return self.exact


def _value_weight(phi: Cochain, word: Word) -> Scalar:
    return phi.weight + word_weight(word).value


def is_coboundary(phi: Cochain, cutoff, max_order: int | None = None) -> CoboundaryResult:
    """Look for a weight-preserving primitive of ``phi`` up to ``cutoff``.

    The primitive is searched in the span of weight vectors (operators of
    order at most ``max_order`` for operator modules); a negative answer is
    therefore relative to that truncation.
    """
    if phi.degree == 0:
        raise ValueError("0-cochains are never coboundaries")
    if phi.weight is None:
        raise ValueError("the cochain carries no weight")
    cutoff = _hi(cutoff)
    n = phi.degree - 1
    mod = phi.module
    unknowns: list[tuple[Word, int]] = []
    seeds: dict[tuple[Word, int], object] = {}
    for w in canonical_words(n, cutoff + HalfInt(2)):
        par = (phi.parity + sum(i.parity for i in w)) % 2
        for k, b in enumerate(mod.weight_basis(_value_weight(phi, w), par, max_order)):
            unknowns.append((w, k))
            seeds[(w, k)] = b
    system = LinearSystem(unknowns)
    images = {}
    for u in unknowns:
        psi = Cochain(n, phi.parity, mod, values={u[0]: seeds[u]}, weight=phi.weight)
        images[u] = coboundary(psi)
    for word in canonical_words(phi.degree, cutoff):
        rows: dict = {}
        for u in unknowns:
            if not set(u[0]) <= set(word) and not _touches(u[0], word):
                continue
            for key, c in mod.coords(images[u].value(word)).items():
                rows.setdefault(key, {})[u] = c
        target = mod.coords(phi.value(word))
        for key in set(rows) | set(target):
            system.add(rows.get(key, {}), target.get(key, ZERO))
    sol = system.solve()
    if not sol.consistent:
        return CoboundaryResult(False, None, cutoff, len(unknowns))
    vals = {}
    for u, c in sol.particular.items():
        if c:
            vals[u[0]] = vals[u[0]] + seeds[u] * c if u[0] in vals else seeds[u] * c
    prim = Cochain(n, phi.parity, mod, values=vals, populated=cutoff + HalfInt(2), weight=phi.weight)
    return CoboundaryResult(True, prim, cutoff, len(unknowns))


def _touches(sub: Word, word: Word) -> bool:
    """Whether ``d`` of a cochain supported on ``sub`` can be nonzero on ``word``.

    Either ``sub`` is ``word`` minus one generator, or it arises by replacing
    two generators of ``word`` by their bracket.
    """
    if len(sub) == 0:
        return True
    rest = list(word)
    for x in sub:
        if x in rest:
            rest.remove(x)
    return len(rest) <= 2


# ---------------------------------------------------------------------------
# Ext groups between density modules
# ---------------------------------------------------------------------------

_LAM = sym("lambda")
_S_GENERATORS = (Fraction(-1), Fraction(-1, 2), Fraction(0), HALF, Fraction(1))


def _sympy_lambda():
    import sympy

    return sympy.Symbol("lambda")


def _to_sympy_value(lam):
    """Accept a Scalar, a number, a sympy expression or a string such as '(-7+sqrt(33))/4'."""
    import sympy

    if isinstance(lam, Scalar):
        return lam.to_sympy()
    if isinstance(lam, (int, Fraction)):
        return sympy.Rational(Fraction(lam).numerator, Fraction(lam).denominator)
    if isinstance(lam, str):
        return sympy.nsimplify(sympy.sympify(lam.replace("λ", "lambda")), rational=True) \
            if "sqrt" not in lam else sympy.sympify(lam)
    return sympy.sympify(lam)


def _sym_is_zero(x) -> bool:
    """Exact zero test for algebraic expressions; numbers are screened numerically first."""
    import sympy

    x = sympy.expand(sympy.sympify(x))
    if x == 0:
        return True
    if x.free_symbols and x.is_polynomial(*x.free_symbols):
        return all(_sym_is_zero(k) for k in sympy.Poly(x, *sorted(x.free_symbols, key=str)).coeffs())
    if x.is_number:
        v = x.evalf(60)
        if v.is_number and v.is_finite is not False and abs(v) > sympy.Float("1e-40"):
            return False
    return sympy.expand(sympy.radsimp(x)) == 0 or sympy.simplify(x) == 0


def _is_zero_at(poly, value) -> bool:
    return _sym_is_zero(poly.subs(_sympy_lambda(), value))


def _as_rational(value) -> Fraction | None:
    import sympy

    v = sympy.nsimplify(value) if not isinstance(value, sympy.Basic) else value
    if v.is_Rational:
        return Fraction(int(v.p), int(v.q))
    return None


def _numerator_gcd(values: Iterable[Scalar]):
    import sympy

    g = sympy.Integer(0)
    for s in values:
        if s:
            num = sympy.numer(sympy.together(s.to_sympy()))
            g = sympy.gcd(g, num)
    if g == 0:
        return g
    if not g.free_symbols:
        return sympy.Integer(1)
    return sympy.Poly(g, _sympy_lambda()).primitive()[1].as_expr()


@lru_cache(maxsize=None)
def cocycle_condition(p) -> object:
    """The polynomial in lambda whose vanishing makes ``d beta_bar_p(lambda) = 0``.

    ``d beta_bar_p`` is s-relative, so it vanishes as soon as it kills the
    lowest weight vectors of the s-summands of the 2-chains; those of weight
    mu map into operators of order 2(p - mu), so only words of weight at
    most p matter and the check is exact.  Returns 0 when the cochain is
    closed for every lambda and 1 when it is closed for none.
    """
    p = _hi(p)
    d = coboundary(beta_bar(p, _LAM))
    coords = []
    for w in canonical_words(2, p):
        coords.extend(d.module.coords(d.value(w)).values())
    return _numerator_gcd(coords)


@lru_cache(maxsize=None)
def coboundary_condition(p) -> object:
    """The polynomial in lambda whose vanishing makes SBol_p(lambda) s-invariant.

    s-relative 1-coboundaries of weight 0 are the ``d T`` with T an
    s-invariant operator of weight 0, i.e. a multiple of SBol_p.
    """
    p = _hi(p)
    d = coboundary(sbol_cochain(p, _LAM))
    coords = []
    for g in _S_GENERATORS:
        coords.extend(d.module.coords(d.value((HalfInt.of(g),))).values())
    return _numerator_gcd(coords)


@dataclass
class ExtReport:
    """Dimension or existence verdict together with the conditions behind it."""

    kind: str
    lam: str
    ps: tuple[str, ...]
    dimension: int | None = None
    exists: bool | None = None
    uniserial: bool | None = None
    unique: bool | None = None
    conditions: dict[str, object] = field(default_factory=dict)
    witness: dict[str, object] | None = None
    covered: bool = True
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        def clean(v):
            if isinstance(v, dict):
                return {str(k): clean(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [clean(x) for x in v]
            if isinstance(v, (bool, int, type(None))):
                return v
            return str(v)

        return {k: clean(getattr(self, k)) for k in self.__dataclass_fields__}


def _lam_text(lam) -> str:
    return "lambda" if lam is None else str(_to_sympy_value(lam))


def ext0_dimension(lam, p) -> int:
    """dim of the K-invariant operators F(lam) -> F(lam + p) (weight 0, so SBol_p up to scale)."""
    p = _hi(p)
    lam = as_scalar(lam)
    if p.twice == 0:
        return 1
    T = sbol(p, lam)
    for g in _S_GENERATORS + (Fraction(3, 2),):
        if not sigma_action(e(g), T).is_zero():
            return 0
    return 1


def ext1_classify(lam, p) -> ExtReport:
    """dim of the s-relative Ext^1 between F(lam) and F(lam + p).

    ``lam=None`` returns the conditions on a symbolic lambda.  The cochain
    space is spanned by beta_bar_p for 2p >= 3 and is zero below, so the
    answer is [d beta_bar_p = 0] - [beta_bar_p is a coboundary].
    """
    import sympy

    p = _hi(p)
    if p.twice < 0:
        raise ValueError("p must be nonnegative")
    L = _sympy_lambda()
    rep = ExtReport("ext1", _lam_text(lam), (str(p),))
    if lam is not None:
        r = _as_rational(_to_sympy_value(lam))
        rep.conditions["dim0"] = ext0_dimension(r, p) if r is not None else None
    if p.twice < 3:
        rep.dimension = 0
        rep.conditions["cochains"] = "none: s-relative 1-cochains need 2p >= 3"
        if p.twice == 0:
            rep.notes.append("p = 0 carries a class that is not s-relative")
        return rep
    g = cocycle_condition(p)
    h = coboundary_condition(p)
    rep.conditions["cocycle"] = "always" if g == 0 else ("never" if not g.free_symbols else f"{sympy.factor(g)} = 0")
    rep.conditions["coboundary"] = "never" if not h.free_symbols else f"{sympy.factor(h)} = 0"
    if g != 0 and g.free_symbols:
        rep.conditions["cocycle_roots"] = [str(r) for r in sympy.solve(g, L)]
        c = sympy.Symbol("c")
        in_c = sympy.expand(g.subs(L, c - sympy.Rational(p.twice, 4) + sympy.Rational(1, 4)))
        rep.conditions["cocycle_in_c"] = f"{sympy.factor(sympy.Poly(in_c, c).primitive()[1].as_expr())} = 0"
    if lam is None:
        # generic lambda: closed unless g is a nonzero polynomial, exact only if h is constant zero
        rep.dimension = int(g == 0)
        rep.notes.append("dimension for generic lambda; see conditions for the exceptions")
        return rep
    v = _to_sympy_value(lam)
    closed = g == 0 or (bool(g.free_symbols) and _is_zero_at(g, v))
    exact = bool(h.free_symbols) and _is_zero_at(h, v)
    rep.dimension = int(closed and not exact)
    rep.conditions["closed"] = closed
    rep.conditions["exact"] = exact
    return rep


_EXT2_RANGE = 11


def relative_cochain_dimension(n: int, p) -> int:
    """dim of the s-relative n-cochains of weight p, i.e. the weight-p part of Lambda^n(K/s)."""
    p = _hi(p)
    return sum(1 for w in canonical_words(n, p, lowest=Fraction(3, 2)) if word_weight(w) == p)


def ext2_dimension(lam, p) -> ExtReport:
    """dim of the s-relative Ext^2 between F(lam) and F(lam + p), tabulated for 2p <= 11.

    In that range every 2-cochain is closed modulo the image of the 3-cochains,
    so dim Z^2 = dim C^2 - dim C^3, and the coboundaries are spanned by
    d beta_bar_p, which vanishes exactly on the degree-1 cocycle condition.
    """
    import sympy

    p = _hi(p)
    if p.twice < 0:
        raise ValueError("p must be nonnegative")
    rep = ExtReport("ext2", _lam_text(lam), (str(p),))
    c2, c3 = relative_cochain_dimension(2, p), relative_cochain_dimension(3, p)
    rep.conditions["cochains"] = {"C1": int(p.twice >= 3), "C2": c2, "C3": c3}
    if p.twice > _EXT2_RANGE:
        rep.covered = False
        rep.notes.append("unknown beyond p = 11/2")
        return rep
    if p.twice < 6:
        rep.dimension = 0
        return rep
    g = cocycle_condition(p)
    rep.conditions["d_beta_bar_vanishes"] = "always" if g == 0 else (
        "never" if not g.free_symbols else f"{sympy.factor(g)} = 0")
    if lam is None:
        rep.dimension = c2 - c3 - int(g != 0)
        rep.notes.append("dimension for generic lambda; see conditions for the exceptions")
        return rep
    v = _to_sympy_value(lam)
    closed = g == 0 or (bool(g.free_symbols) and _is_zero_at(g, v))
    rep.dimension = c2 - c3 - int(not closed)
    return rep


# ---------------------------------------------------------------------------
# multiplicities of symmetric and exterior powers
# ---------------------------------------------------------------------------


def _compositions(j: int, n: int, strict_parity: int) -> Iterator[tuple[int, ...]]:
    """Nondecreasing n-tuples summing to j, strictly increasing after entries of parity ``strict_parity``."""

    def rec(k: int, low: int, remaining: int, prefix: tuple[int, ...]):
        if k == 0:
            if remaining == 0:
                yield prefix
            return
        for x in range(low, remaining // k + 1):
            nxt = x + 1 if x % 2 == strict_parity else x
            yield from rec(k - 1, nxt, remaining - x, prefix + (x,))

    yield from rec(n, 0, j, ())


def multiplicity(kind: str, j: int, n: int) -> int:
    """m_j(n) for the s-decomposition of S^n F or Lambda^n F (kind "sym" or "wedge")."""
    if kind not in ("sym", "wedge"):
        raise ValueError(f"kind must be 'sym' or 'wedge', not {kind!r}")
    if n < 1 or j < 0:
        return 0
    if n == 1:
        return int(j == 0)
    strict = 1 if kind == "sym" else 0
    count = 0
    for js in _compositions(j, n, strict):
        a, b = js[-2], js[-1]
        if b - a == (0 if a % 2 != strict else 1):
            count += 1
    return count


def power_weight_dimensions(kind: str, n: int, top: int) -> list[int]:
    """dim of the level-k weight space of S^n F or Lambda^n F, k <= top.

    F has one basis vector at every level h >= 0, of parity h mod 2; super
    symmetry forbids repeating odd vectors and super alternation forbids
    repeating even ones.
    """
    norepeat = 1 if kind == "sym" else 0
    dims = [0] * (top + 1)

    def rec(k: int, low: int, total: int):
        if k == 0:
            dims[total] += 1
            return
        for h in range(low, top - total + 1):
            if k > 1 and (top - total - h) < (k - 1) * h:
                break
            rec(k - 1, h + 1 if h % 2 == norepeat else h, total + h)

    rec(n, 0, 0)
    return dims


def direct_multiplicities(kind: str, n: int, top: int) -> list[int]:
    """Multiplicities read off from weight space dimensions: m_k = d_k - d_{k-1}."""
    d = power_weight_dimensions(kind, n, top)
    return [d[k] - (d[k - 1] if k else 0) for k in range(top + 1)]


def cube_multiplicities(top: int) -> list[int]:
    """Multiplicities of S^3 F from the F(3 lam + b + 2j + 3i), b in {0, 3/2, 5/2, 4}."""
    out = [0] * (top + 1)
    for b2 in (0, 3, 5, 8):
        for j in range(top + 1):
            for i in range(top + 1):
                k = b2 + 4 * j + 6 * i
                if k <= top:
                    out[k] += 1
    return out


# ---------------------------------------------------------------------------
# supertransvectants
# ---------------------------------------------------------------------------


def _density_vector(weight: Scalar, h: int) -> DensityElement:
    return DensityElement(weight, SuperPoly.monomial(h % 2, h // 2))


def _levels(v: DensityElement) -> dict[int, Scalar]:
    return {2 * n + a: c for (a, n), c in v.body.terms.items()}


class NonUniqueTransvectant(ArithmeticError):
    """The equivariance system has no solution or more than one up to scale."""


@dataclass
class TransvectantMap:
    """s-equivariant bilinear map F(mu) x F(nu) -> F(mu + nu + k) up to level cutoff.

    ``table[(h, h')]`` is the coefficient of ``v_{h + h' - 2k}`` in the image
    of ``v_h x v_h'``, where ``v_h`` is the weight vector of level h.
    """

    mu: Scalar
    nu: Scalar
    k: HalfInt
    cutoff: int
    table: dict[tuple[int, int], Scalar]
    nullity: int

    @property
    def parity(self) -> int:
        return self.k.parity

    @property
    def target(self) -> Scalar:
        return self.mu + self.nu + self.k.value

    def apply(self, h: int, h2: int) -> DensityElement:
        level = h + h2 - self.k.twice
        if level < 0:
            return DensityElement(self.target, SuperPoly.zero())
        if h + h2 > self.k.twice + self.cutoff:
            raise InsufficientPopulation("pair above the solved levels")
        return _density_vector(self.target, level) * self.table.get((h, h2), ZERO)

    def csv_rows(self) -> list[tuple[int, int, str]]:
        return [(h, h2, str(c)) for (h, h2), c in sorted(self.table.items())]


def _tensor_action(g: Fraction, mu: Scalar, nu: Scalar, h: int, h2: int) -> dict[tuple[int, int], Scalar]:
    X = e(g)
    out: dict[tuple[int, int], Scalar] = {}
    for lvl, c in _levels(density_action(X, _density_vector(mu, h))).items():
        out[(lvl, h2)] = out.get((lvl, h2), ZERO) + c
    sign = -1 if (HalfInt.of(g).parity * (h % 2)) else 1
    for lvl, c in _levels(density_action(X, _density_vector(nu, h2))).items():
        out[(h, lvl)] = out.get((h, lvl), ZERO) + c * sign
    return out


def _equivariance_rows(mu, nu, k: HalfInt, cutoff: int, g: Fraction) -> list[dict]:
    """Linear rows in the table unknowns expressing ``J o X = (-1)^{|X||J|} X o J`` for one generator."""
    target = mu + nu + k.value
    top = k.twice + cutoff
    shift = HalfInt.of(g).twice
    sign = -1 if (HalfInt.of(g).parity * k.parity) else 1
    rows = []
    for L in range(0, top + 1):
        if L + shift > top or L + shift < 0:
            continue
        for h in range(L + 1):
            h2 = L - h
            eqs: dict[int, dict] = {}
            for (a, b), c in _tensor_action(g, mu, nu, h, h2).items():
                if a + b - k.twice < 0:
                    continue
                eqs.setdefault(a + b - k.twice, {})
                eqs[a + b - k.twice][(a, b)] = eqs[a + b - k.twice].get((a, b), ZERO) + c
            if L >= k.twice:
                image = density_action(e(g), _density_vector(target, L - k.twice))
                for lvl, c in _levels(image).items():
                    eqs.setdefault(lvl, {})
                    eqs[lvl][(h, h2)] = eqs[lvl].get((h, h2), ZERO) - c * sign
            rows.extend(r for r in eqs.values() if any(r.values()))
    return rows


def transvectant_solve(mu, nu, k, cutoff: int = 6, require_unique: bool = True) -> TransvectantMap:
    """Solve the s-equivariance system level by level up to ``cutoff``.

    The solution space must be one-dimensional; the first nonzero entry on
    the lowest level is normalized to 1.  For mu = nu the map is required to
    be supersymmetric when 2k = 0, 3 mod 4 and superalternating otherwise,
    which restores uniqueness on the diagonal mu = nu in -N/2.
    """
    mu, nu, k = as_scalar(mu), as_scalar(nu), _hi(k)
    top = k.twice + cutoff
    unknowns = [(h, L - h) for L in range(k.twice, top + 1) for h in range(L + 1)]
    system = LinearSystem(unknowns)
    for g in _S_GENERATORS:
        for row in _equivariance_rows(mu, nu, k, cutoff, g):
            system.add(row, 0)
    if mu == nu:
        # supersymmetric for 2k = 0, 3 mod 4, superalternating otherwise
        sym_sign = 1 if k.twice % 4 in (0, 3) else -1
        for h, h2 in unknowns:
            if h < h2:
                swap = -1 if (h % 2) * (h2 % 2) else 1
                system.add({(h, h2): ONE, (h2, h): -as_scalar(sym_sign * swap)}, 0)
            elif h == h2 and sym_sign * (-1 if h % 2 else 1) == -1:
                system.add({(h, h): ONE}, 0)
    sol = system.solve()
    if require_unique and sol.nullity != 1:
        raise NonUniqueTransvectant(f"solution space of dimension {sol.nullity}")
    if not sol.nullspace:
        return TransvectantMap(mu, nu, k, cutoff, {}, 0)
    vec = sol.nullspace[0]
    lead = next(vec[u] for u in unknowns if vec[u])
    table = {u: vec[u] / lead for u in unknowns if vec[u]}
    return TransvectantMap(mu, nu, k, cutoff, table, sol.nullity)


def transvectant_k_equivariant(J: TransvectantMap) -> bool:
    """Check equivariance under e_{3/2}, which with s generates K, on the solved levels."""
    sign = -1 if J.k.parity else 1
    top = J.k.twice + J.cutoff
    for L in range(0, top - 2):
        for h in range(L + 1):
            h2 = L - h
            lhs = DensityElement(J.target, SuperPoly.zero())
            for (a, b), c in _tensor_action(Fraction(3, 2), J.mu, J.nu, h, h2).items():
                lhs = lhs + J.apply(a, b) * c
            rhs = density_action(e(Fraction(3, 2)), J.apply(h, h2)) * sign
            if not (lhs - rhs).is_zero():
                return False
    return True


def _b_any(r, s, m, lam, p) -> Scalar:
    from .conformal import b_bruteforce, b_closed_form

    d = _hi(as_scalar(r) - as_scalar(s))
    if d.twice in (1, 2):
        return ZERO
    if d.twice <= 5:
        return b_closed_form(r, s, m, lam, p)
    return b_bruteforce(r, s, m, lam, p, route="assembly")


def transvectant_conditions(mu, nu, k) -> list[tuple[HalfInt, Scalar]]:
    """The scalars ``b^{2l+1}_{mu+nu+k, mu+nu+l}(1/2 - nu, mu + nu - 1/2)``, 0 <= l <= k - 3/2."""
    mu, nu, k = as_scalar(mu), as_scalar(nu), _hi(k)
    out = []
    for l2 in range(0, k.twice - 2):
        l = HalfInt(l2)
        val = _b_any(mu + nu + k.value, mu + nu + l.value, (l2 + 1) % 2, HALF - nu, mu + nu - HALF)
        out.append((l, val))
    return out


def _resonant_pair(mu, nu) -> bool:
    s = as_scalar(mu) + as_scalar(nu)
    if not s.is_constant():
        return False
    f = s.as_fraction()
    return f <= 0 and (2 * f).denominator == 1


def transvectant_classify(mu, nu, k, cutoff: int = 6) -> bool:
    """K-invariance of the supertransvectant.

    Off the resonant set this is the vanishing of the b-conditions.  On the
    diagonal mu = nu in -N/2, where those scalars have poles, the map is
    built by the symmetric solve and tested against e_{3/2} directly.
    """
    mu, nu = as_scalar(mu), as_scalar(nu)
    if _resonant_pair(mu, nu):
        if mu != nu:
            raise NonUniqueTransvectant("mu + nu lies in -N/2 off the diagonal")
        return transvectant_k_equivariant(transvectant_solve(mu, nu, k, cutoff))
    return all(not v for _, v in transvectant_conditions(mu, nu, k))


# ---------------------------------------------------------------------------
# extensions of density modules
# ---------------------------------------------------------------------------

_NON_UNISERIAL_AT_ZERO = {HalfInt(4), HalfInt(5), HalfInt(6)}


def _hi_tuple(ps) -> tuple[HalfInt, ...]:
    return tuple(_hi(Fraction(p) if isinstance(p, str) else p) for p in ps)


@lru_cache(maxsize=None)
def cup_obstruction(p1, p2) -> tuple[object, list]:
    """Polynomials in lambda deciding whether ``beta_bar_{p2}(lam+p1) u beta_bar_{p1}(lam)`` is exact.

    The s-relative 2-coboundaries of weight 0 are spanned by
    ``d beta_bar_{p1+p2}(lam)``, and words of weight at most p1 + p2 carry
    every lowest weight vector that can contribute.  Returns ``(g, minors)``:
    the coboundary vanishes where g does, and the cup is proportional to it
    where all 2x2 minors vanish.
    """
    import sympy

    p1, p2 = _hi(p1), _hi(p2)
    top = p1 + p2
    a = beta_bar(p1, _LAM)
    b = beta_bar(p2, _LAM + p1.value)
    cu = cup(b, a)
    db = coboundary(beta_bar(top, _LAM))
    pairs = []
    for w in canonical_words(2, top):
        x = cu.module.coords(cu.value(w))
        y = db.module.coords(db.value(w))
        for key in set(x) | set(y):
            pairs.append((x.get(key, ZERO), y.get(key, ZERO)))
    g = _numerator_gcd([y for _, y in pairs])
    minors = []
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            m = pairs[i][0] * pairs[j][1] - pairs[j][0] * pairs[i][1]
            if m:
                minors.append(sympy.numer(sympy.together(m.to_sympy())))
    return g, minors


def cup_is_exact(lam, p1, p2) -> bool:
    """Whether the cup of the two beta_bar classes is an s-relative coboundary at lam."""
    g, minors = cup_obstruction(_hi(p1), _hi(p2))
    v = _to_sympy_value(lam)
    if g == 0 or (g.free_symbols and _is_zero_at(g, v)):
        return False  # no coboundaries, and the cup never vanishes on the wedge square of e_{3/2}
    return all(_is_zero_at(m, v) for m in minors)


def _dim1(lam, p: HalfInt) -> int:
    return ext1_classify(lam, p.value).dimension


def _is_value(lam, target) -> bool:
    return _sym_is_zero(_to_sympy_value(lam) - _to_sympy_value(target))


def dual_signature(lam, ps):
    """The dual of a (lam; p_1..p_n) extension is a (1/2 - lam - sum p; p_n..p_1) extension."""
    ps = _hi_tuple(ps)
    total = sum((p.value for p in ps), Fraction(0))
    import sympy

    return sympy.Rational(1, 2) - _to_sympy_value(lam) - sympy.Rational(total.numerator, total.denominator), ps[::-1]


@dataclass(frozen=True)
class PsiFamily:
    """``(Psi^{q-lam}_ell)_{removed} / (Psi^{q-lam-start/2}_{ell+start})_{b_removed}``.

    Components are indexed by j: the summand F(lam + j/2) of the symbol.
    ``removed`` and ``b_removed`` list the half-integers i whose summand
    j = 2i (relative to the module's own start) is left out.
    """

    ells: tuple[int, ...]
    removed: tuple[Fraction, ...]
    start: int
    b_removed: tuple[Fraction, ...]

    def kept(self, top: int) -> tuple[set[int], set[int]]:
        rem = {int(2 * i) for i in self.removed}
        brem = {self.start + int(2 * i) for i in self.b_removed}
        a = {j for j in range(top + 1) if j not in rem}
        b = {j for j in range(self.start, top + 1) if j not in brem}
        return a, b

    def factors(self) -> list[int]:
        top = self.start + 2 * int(2 * max(self.b_removed + self.removed + (Fraction(0),))) + 4
        a, b = self.kept(top)
        if not b <= a:
            raise ValueError("the second module is not contained in the first")
        return sorted(a - b)

    def invariance_pairs(self) -> list[tuple[int, int, int]]:
        """(r, s, start) with removed r above kept s by at least 3/2, in both modules."""
        out = []
        rem = sorted(int(2 * i) for i in self.removed)
        for r in rem:
            for s in range(0, r - 2):
                if s not in rem:
                    out.append((r, s, 0))
        brem = sorted(self.start + int(2 * i) for i in self.b_removed)
        for r in brem:
            for s in range(self.start, r - 2):
                if s not in brem:
                    out.append((r, s, self.start))
        return out


def _F(*x) -> Fraction:
    return Fraction(*x)


PSI_FAMILIES: dict[tuple[int, ...], tuple[PsiFamily, ...]] = {
    (3,): (PsiFamily((0, 1), (HALF, _F(1)), 4, ()),),
    (4,): (PsiFamily((0, 1), (HALF, _F(1)), 3, (HALF,)),),
    (5,): (PsiFamily((0, 1), (HALF, _F(1)), 3, (_F(1),)),),
    (3, 3): (PsiFamily((0, 1), (HALF, _F(1)), 4, (_F(1),)),),
    (4, 3): (PsiFamily((0, 1), (HALF, _F(1), _F(3, 2)), 5, (_F(1),)),),
    (5, 3): (PsiFamily((0, 1), (HALF, _F(1), _F(3, 2)), 4, (HALF, _F(2))),),
    (4, 4): (PsiFamily((0,), (HALF, _F(1), _F(3, 2)), 5, (_F(3, 2),)),
             PsiFamily((0,), (HALF, _F(1), _F(3, 2), _F(5, 2)), 6, (_F(1),))),
    (5, 4): (PsiFamily((0,), (HALF, _F(1), _F(3, 2), _F(3), _F(7, 2)), 4, (HALF, _F(1), _F(3, 2), _F(5, 2))),
             PsiFamily((0,), (HALF, _F(1), _F(3, 2), _F(2), _F(3), _F(7, 2)), 8, (HALF,))),
    (3, 3, 3): (PsiFamily((0, 1), (HALF, _F(1), _F(2)), 5, (HALF, _F(2))),),
    (3, 3, 4): (PsiFamily((0,), (HALF, _F(1), _F(2), _F(5, 2)), 7, (_F(3, 2),)),),
    (4, 4, 3): (PsiFamily((1,), (HALF, _F(1), _F(3, 2), _F(5, 2), _F(3)), 7, (HALF, _F(2))),),
    (5, 3, 4): (PsiFamily((0,), (HALF, _F(1), _F(3, 2), _F(2), _F(3), _F(7, 2)), 9, (_F(3, 2),)),),
    (4, 5, 3): (PsiFamily((0,), (HALF, _F(1), _F(3, 2), _F(5, 2), _F(3), _F(7, 2)), 8, (HALF, _F(2))),),
    (4, 4, 4): (PsiFamily((0,), (HALF, _F(1), _F(3, 2), _F(5, 2), _F(3), _F(7, 2)), 9, (_F(3, 2),)),),
    (5, 4, 4): (PsiFamily((0,), (HALF, _F(1), _F(3, 2), _F(2), _F(3), _F(7, 2)), 8, (HALF, _F(5, 2))),),
}

# signatures realized only through their dual
_LENGTH3_TABLE = {(3, 3), (4, 3), (3, 4), (5, 3), (3, 5), (4, 4), (5, 4), (4, 5), (6, 3), (5, 5), (4, 6)}
_LENGTH4_TABLE = {(3, 3, 3), (4, 3, 3), (3, 3, 4), (4, 4, 3), (3, 4, 4), (5, 3, 4), (4, 3, 5),
                  (4, 5, 3), (3, 5, 4), (4, 4, 4), (5, 4, 4), (4, 4, 5)}

_SAMPLE_VALUES = (Fraction(1, 3), Fraction(2, 7), Fraction(-3, 5), Fraction(5, 11), Fraction(7, 3), Fraction(-8, 13))


@lru_cache(maxsize=None)
def _b_symbolic(r_off: int, s_off: int, m: int):
    """``b^m_{t + r/2, t + s/2}(nu, q)`` as a sympy expression in t, nu, q."""
    t, nu, q = sym("t"), sym("nu"), sym("q")
    return _b_any(t + Fraction(r_off, 2), t + Fraction(s_off, 2), m % 2, nu, q).to_sympy()


_C_STANDIN = "w"


def _b_at(lam, r_off: int, s_off: int, m: int, c_choice):
    """``b^m_{lam + r/2, lam + s/2}`` at nu = c - q/2 + 1/4, over Q(q, c) or Q(t, q, c) for lam = t.

    c is carried by the scalar symbol ``w`` and renamed by the caller.
    """
    q = sym("q")
    cs = ZERO if c_choice == 0 else sym(_C_STANDIN)
    return _b_any(lam + Fraction(r_off, 2), lam + Fraction(s_off, 2), m % 2, cs - q / 2 + Fraction(1, 4), q)


def psido_witness(lam, ps, family: PsiFamily) -> dict | None:
    """Search (nu, q) realizing the (lam; ps) extension as a uniserial subquotient of the family.

    The invariance conditions are the vanishing of b^{ell+s}_{lam+r/2, lam+s/2}
    for every summand r left out above a kept summand s; uniseriality asks
    the b linking consecutive factors to be nonzero.  nu is written as
    c - q/2 + 1/4 and c = 0 is tried before a free c.
    """
    import sympy

    ps = _hi_tuple(ps)
    js = [0]
    for p in ps:
        js.append(js[-1] + p.twice)
    if family.factors() != js:
        raise ValueError("family does not realize this signature")
    t, nu, q, c = sympy.symbols("t nu q c")
    lamv = _to_sympy_value(lam)
    lam_q = _as_rational(lamv)
    for ell in family.ells:
        eqs = [_b_symbolic(r, s, ell + s) for r, s, _ in family.invariance_pairs()]
        ineqs = [_b_symbolic(js[i + 1], js[i], ell + js[i]) for i in range(len(ps))]
        for c_choice in (0, None):
            cval = sympy.Integer(0) if c_choice == 0 else c

            def spec(x):
                return sympy.together(x.subs(nu, cval - q / 2 + sympy.Rational(1, 4)).subs(t, lamv))

            def value(x, r, s, m, numer=False):
                try:
                    b = _b_at(sym("t") if lam_q is None else lam_q, r, s, m, c_choice)
                except ArithmeticError:
                    return sympy.numer(spec(x)) if numer else spec(x)
                b = b.to_sympy().subs(sympy.Symbol(_C_STANDIN), c)
                if lam_q is not None:
                    return sympy.numer(b) if numer else b
                b = sympy.together(b.subs(t, lamv))
                return sympy.numer(b) if numer else b

            E = [value(x, r, s, ell + s, numer=True) for x, (r, s, _) in zip(eqs, family.invariance_pairs())]
            N = [value(x, js[i + 1], js[i], ell + js[i]) for i, x in enumerate(ineqs)]
            E = [sympy.expand(x) for x in E if not _sym_is_zero(x)]
            unknowns = [q] + ([c] if c_choice is None else [])
            if E:
                sols = sympy.solve(E, unknowns, dict=True)
            else:
                sols = [{}]
            for sol in sols:
                free = [u for u in unknowns if u not in sol]
                for sample in itertools.product(_SAMPLE_VALUES, repeat=len(free)):
                    point = dict(sol)
                    sub = dict(zip(free, (sympy.Rational(x.numerator, x.denominator) for x in sample)))
                    point = {k: sympy.sympify(v).subs(sub) for k, v in point.items()}
                    point.update(sub)
                    if c_choice == 0:
                        point[c] = sympy.Integer(0)
                    vals = []
                    ok = True
                    for x in N:
                        v = x.subs(point)
                        if v.has(sympy.zoo, sympy.nan) or _sym_is_zero(v):
                            ok = False
                            break
                        vals.append(sympy.radsimp(v))
                    if ok:
                        nu_v = sympy.simplify(point[c] - point[q] / 2 + sympy.Rational(1, 4))
                        return {"ell": ell, "nu": str(nu_v), "q": str(sympy.simplify(point[q])),
                                "c": str(point[c]), "vanishing": len(E), "linking_b": [str(v) for v in vals]}
                    if not free:
                        break
    return None


def _psido_resonant(lam, ps) -> bool:
    """The subquotients are resonant when -2 lam lies in {0, ..., 2 sum p - 1}."""
    x = _as_rational(_to_sympy_value(lam))
    if x is None:
        return False
    total = sum(p.twice for p in _hi_tuple(ps))
    return (2 * x).denominator == 1 and 0 <= -2 * x <= total - 1


def psido_realization(lam, ps) -> dict:
    """Witness search over the tabulated families, falling back on the dual signature."""
    ps = _hi_tuple(ps)
    key = tuple(p.twice for p in ps)
    if _psido_resonant(lam, ps):
        return {"realized": False, "reason": "resonant subquotient"}
    tried = []
    for route, (l2, sig) in (("direct", (lam, ps)), ("dual", dual_signature(lam, ps))):
        fams = PSI_FAMILIES.get(tuple(p.twice for p in sig))
        if not fams or _psido_resonant(l2, sig):
            continue
        tried.append(route)
        for fam in fams:
            w = psido_witness(l2, sig, fam)
            if w is not None:
                w.update(realized=True, route=route)
                return w
    if tried:
        return {"realized": False, "reason": "no (nu, q) satisfies the conditions", "routes": tried}
    return {"realized": None, "reason": f"no subquotient family tabulated for {key}"}


def extension_report(lam, ps, psido: bool = True) -> ExtReport:
    """Existence, uniqueness and uniseriality of an s-split (lam; p_1, ..., p_n) extension, n <= 3.

    Length 2 follows the Ext^1 dimension.  Length 3 needs both adjacent
    length 2 extensions, uniserial ones, and an exact cup of the two
    beta_bar classes.  Length 4 is decided by the explicit subquotient
    families only.
    """
    ps = _hi_tuple(ps)
    n = len(ps)
    key = tuple(p.twice for p in ps)
    rep = ExtReport("extension", _lam_text(lam), tuple(str(p) for p in ps))
    if n == 0 or n > 3 or any(p.twice < 0 for p in ps):
        rep.covered = False
        rep.notes.append("not covered by the tables")
        return rep
    v = _to_sympy_value(lam)
    import sympy

    partial = [v]
    for p in ps:
        partial.append(partial[-1] + sympy.Rational(p.twice, 2))
    dims = [_dim1(partial[i], ps[i]) for i in range(n)]
    rep.conditions["dim1"] = dims
    if n == 1:
        p = ps[0]
        rep.exists = dims[0] == 1
        rep.unique = rep.exists
        rep.uniserial = rep.exists and not (_is_value(v, 0) and p in _NON_UNISERIAL_AT_ZERO)
        if rep.exists and not rep.uniserial:
            rep.notes.append("contains C + F(p) as a submodule; the quotient by C is uniserial")
    elif n == 2:
        bad_zero = [i for i in range(2) if _is_value(partial[i], 0) and ps[i] in _NON_UNISERIAL_AT_ZERO]
        rep.conditions["non_uniserial_piece"] = bad_zero
        if key not in _LENGTH3_TABLE:
            rep.notes.append("signature outside the tabulated ranges; verdict from the same conditions")
        if all(dims) and not bad_zero:
            exact = cup_is_exact(v, ps[0], ps[1])
            rep.conditions["cup_exact"] = exact
            rep.exists = exact
        else:
            rep.exists = False
        rep.uniserial = rep.exists
        rep.unique = rep.exists
    else:
        if key not in _LENGTH4_TABLE:
            rep.covered = False
            rep.notes.append("not covered by the tables")
            return rep
        real = psido_realization(v, ps)
        rep.witness = real
        rep.exists = bool(real.get("realized"))
        rep.uniserial = rep.exists
        rep.unique = rep.exists and all(dims)
        return rep
    if psido and rep.exists and rep.uniserial and key in PSI_FAMILIES or \
            psido and rep.exists and rep.uniserial and tuple(reversed(key)) in PSI_FAMILIES:
        rep.witness = psido_realization(v, ps)
    return rep
