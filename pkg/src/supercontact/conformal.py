"""Conformal symbol calculus for the operator modules and the scalars b^m_rs.

Operators ``omega^p sum_J G_J Dbar^{z0-J}_{m0-J}`` are compared with their
density subquotients: slot J of an operator corresponds to the density
module of weight ``p - (z0 - J)/2`` with parity shift ``(m0 - J) mod 2``.

The conformal symbol sends the monomial ``omega^p G Dbar^z_m`` to

    sum_t c(z, m, t) omega^{p-(z-t)/2} D^t(G),

where for a differential operator of order j the coefficients are the
``c_{j,j-t}`` of the closed-form table.  The quantization is the inverse.
Both are checked against an independent construction through the lowest
weight vectors ``omega^p Dbar^{2(p-s)}_m``.

The subdiagonal blocks of the transported action are multiples of fixed
cochains; the multiples ``b^m_rs`` are computed by a closed form, by the
step-algebra assembly, by applying the step element to operators, and by
reading matrix entries through CS.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .linalg import LinearSystem
from .operators import DEFAULT_DEPTH, SuperOp, TruncationError, pi_operator, sigma_action
from .scalars import (
    ONE,
    ZERO,
    HalfInt,
    PoleError,
    Scalar,
    as_scalar,
    binomial_general,
    c_param,
    const,
    falling_factorial,
    sym,
)
from .superline import DensityElement, KElement, SuperPoly, density_action, e, k_bracket

__all__ = [
    "ResonanceError",
    "ExceptionalClassError",
    "SGenerators",
    "S_GENERATORS",
    "casimir_apply",
    "cq_coeff",
    "cs_coeff",
    "CJiTable",
    "naive_symbol",
    "naive_quantize",
    "conformal_symbol",
    "conformal_quantize",
    "cq_lowest_weight",
    "lowest_weight_vector",
    "equivariance_residual",
    "matrix_entry",
    "sesquisymbol",
    "extremal_p_coeff",
    "c_mu_n",
    "c_mu_n_bracket",
    "StepElement",
    "step_element",
    "apply_step",
    "step_scalar",
    "z_evaluate",
    "zen_coeff",
    "B_rs",
    "P_rs",
    "b_closed_form",
    "b_bruteforce",
    "symmetry_check",
    "equivalence_invariant_j6",
]

HALF = Fraction(1, 2)
E0 = sym("e0")


class ResonanceError(ArithmeticError):
    """A conformal symbol or step coefficient hits one of its poles."""


class ExceptionalClassError(ArithmeticError):
    """The equivalence invariant has a vanishing denominator."""


def _hi(x) -> HalfInt:
    return HalfInt.of(as_scalar(x).as_fraction())


def _nat(x) -> int | None:
    x = as_scalar(x)
    if not x.is_constant():
        return None
    f = x.as_fraction()
    return int(f) if f.denominator == 1 and f >= 0 else None


def _div(num: Scalar, den: Scalar, what: str) -> Scalar:
    if not den:
        raise ResonanceError(f"{what}: vanishing denominator")
    try:
        return num / den
    except PoleError as exc:  # pragma: no cover - den checked above
        raise ResonanceError(str(exc)) from exc


# ---------------------------------------------------------------------------
# the conformal subalgebra and its Casimir
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SGenerators:
    s: tuple[KElement, ...]
    t: tuple[KElement, ...]
    u: tuple[KElement, ...]

    def closes(self) -> bool:
        """True when each listed span is closed under the bracket."""
        for span in (self.s, self.t, self.u):
            idx = {n for X in span for n in X.indices()}
            for X in span:
                for Y in span:
                    if any(n not in idx for n in k_bracket(X, Y).indices()):
                        return False
        return True


S_GENERATORS = SGenerators(
    s=(e(-1), e(-HALF), e(0), e(HALF), e(1)),
    t=(e(-1), e(-HALF), e(0)),
    u=(e(-1), e(-HALF)),
)


def _apply_word(word: Sequence[KElement], v: DensityElement) -> DensityElement:
    for X in reversed(word):
        v = density_action(X, v)
    return v


def casimir_apply(which: str, v: DensityElement) -> DensityElement:
    """Apply ``Lambda_s``, ``T_s = Lambda_s - 1/4`` or ``Q_s = T_s^2 - 1/16``."""
    key = which.removesuffix("_s")
    lo, hi = e(-HALF), e(HALF)

    def lam(w):
        return (_apply_word([lo, hi], w) - _apply_word([hi, lo], w)) * HALF

    def T(w):
        return lam(w) - w * Fraction(1, 4)

    if key == "Lambda":
        return lam(v)
    if key == "T":
        return T(v)
    if key == "Q":
        return T(T(v)) - v * Fraction(1, 16)
    raise ValueError(f"unknown Casimir element {which!r}")


# ---------------------------------------------------------------------------
# the c_ji table
# ---------------------------------------------------------------------------


def cs_coeff(z, m: int, t: int, lam, p) -> Scalar:
    """Coefficient of ``omega^{p-(z-t)/2} D^t(G)`` in CS(omega^p G Dbar^z_m)."""
    return _cs_coeff(as_scalar(z), int(m) % 2, int(t), as_scalar(lam), as_scalar(p))


@lru_cache(maxsize=65536)
def _cs_coeff(z: Scalar, m: int, t: int, lam: Scalar, p: Scalar) -> Scalar:
    i_par = (m - t) % 2
    a = (t + i_par) // 2
    b = (t + 1 - i_par) // 2
    sign = -1 if ((t + 1) // 2) % 2 else 1
    num = binomial_general((z - m) / 2, a) * binomial_general(2 * lam + (z + m) / 2 - 1, b)
    den = binomial_general(2 * p - z + t - 1, (t + 1) // 2)
    return _div(num * sign, den, f"c at order {z}, offset {t}")


def cq_coeff(j: int, i: int, lam, p) -> Scalar:
    """The table entry ``c_{ji}(lambda, p)``."""
    if not 0 <= i <= j:
        raise ValueError("need 0 <= i <= j")
    return cs_coeff(j, j % 2, j - i, lam, p)


CoeffFn = Callable[[Scalar, int, int], Scalar]


def _table_fn(lam, p) -> CoeffFn:
    cache: dict = {}

    def fn(z, m, t):
        key = (z, m, t)
        if key not in cache:
            cache[key] = cs_coeff(z, m, t, lam, p)
        return cache[key]

    return fn


@dataclass
class CJiTable:
    """Entries ``c_{ji}`` for ``0 <= i <= j <= jmax`` at given (lambda, p)."""

    lam: Scalar
    p: Scalar
    entries: dict[tuple[int, int], Scalar] = field(default_factory=dict)

    @property
    def jmax(self) -> int:
        return max((j for j, _ in self.entries), default=-1)

    def __getitem__(self, key: tuple[int, int]) -> Scalar:
        return self.entries[key]

    @classmethod
    def from_theorem(cls, jmax: int, lam=None, p=None) -> "CJiTable":
        lam = sym("lambda") if lam is None else as_scalar(lam)
        p = sym("p") if p is None else as_scalar(p)
        ents = {(j, i): cq_coeff(j, i, lam, p) for j in range(jmax + 1) for i in range(j + 1)}
        return cls(lam, p, ents)

    @classmethod
    def from_equivariance(cls, jmax: int, lam=None, p=None) -> "CJiTable":
        """Solve CS o sigma(g) = pi(g) o CS row by row with c_jj = 1.

        Raises ResonanceError if some row is not uniquely determined.
        """
        lam = sym("lambda") if lam is None else as_scalar(lam)
        p = sym("p") if p is None else as_scalar(p)
        ents: dict[tuple[int, int], Scalar] = {}
        for j in range(jmax + 1):
            ents[(j, j)] = ONE
            if j == 0:
                continue
            row = _solve_row(j, lam, p, ents)
            for t, val in row.items():
                ents[(j, j - t)] = val
        return cls(lam, p, ents)

    def agrees_with(self, other: "CJiTable") -> bool:
        return self.entries.keys() == other.entries.keys() and all(
            self.entries[k] == other.entries[k] for k in self.entries
        )


def _solve_row(j: int, lam: Scalar, p: Scalar, known: dict) -> dict[int, Scalar]:
    def make_fn(trial: dict[int, Scalar]) -> CoeffFn:
        def fn(z, m, t):
            zi = _nat(z)
            if zi == j:
                return ONE if t == 0 else trial.get(t, ZERO)
            return known[(zi, zi - t)] if t <= zi else ZERO
        return fn

    unknowns = list(range(1, j + 1))
    system = LinearSystem(unknowns)
    monos = [(a, b) for b in range(j // 2 + 1) for a in (0, 1) if 2 * b + a <= j]
    for a, b in monos:
        T = SuperOp(lam, p, j, j, [SuperPoly.monomial(a, b)])
        for g in S_GENERATORS.s:
            U = sigma_action(g, T)
            if not U.is_zero():
                U = U.padded(j)

            def residual(fn):
                left = _cs_slots(U, fn) if not U.is_zero() else {}
                right = {}
                for J, H in _cs_slots(T, fn).items():
                    w = p - Fraction(j - J, 2)
                    right[J] = density_action(g, DensityElement(w, H, (j - J) % 2)).body
                keys = set(left) | set(right)
                return {J: left.get(J, SuperPoly.zero()) - right.get(J, SuperPoly.zero()) for J in keys}

            base = residual(make_fn({}))
            cols = {t: residual(make_fn({t: ONE})) for t in unknowns}
            keys = set(base)
            for c in cols.values():
                keys |= set(c)
            for J in keys:
                mons = set(base.get(J, SuperPoly.zero()).terms)
                for c in cols.values():
                    mons |= set(c.get(J, SuperPoly.zero()).terms)
                for mon in mons:
                    b0 = base.get(J, SuperPoly.zero()).coeff(*mon)
                    rowd = {t: cols[t].get(J, SuperPoly.zero()).coeff(*mon) - b0 for t in unknowns}
                    system.add(rowd, -b0)
    sol = system.solve()
    if not sol.unique:
        raise ResonanceError(f"row {j} of the symbol table is not uniquely determined")
    return {t: sol.particular[t] for t in unknowns}


# ---------------------------------------------------------------------------
# naive and conformal symbols
# ---------------------------------------------------------------------------


def _slot_weight(T: SuperOp, J: int) -> Scalar:
    return T.shift - (T.z0 - J) / 2


def _cs_slots(T: SuperOp, fn: CoeffFn, tmax: int | None = None) -> dict[int, SuperPoly]:
    """Naive-slot components of CS(T) for a coefficient rule ``fn``."""
    limit = None if T.exact else T.depth
    if any(not G.is_polynomial() for G in T.coeffs):
        limit = DEFAULT_DEPTH if limit is None else limit
    out: dict[int, SuperPoly] = {}
    for J, G in enumerate(T.coeffs):
        if not G:
            continue
        z, m = T.slot_order(J)
        t, H = 0, G
        while H and (tmax is None or t <= tmax) and (limit is None or J + t < limit):
            c = fn(z, m, t)
            if c:
                term = H * c
                out[J + t] = out[J + t] + term if J + t in out else term
            H, t = H.D(), t + 1
    return out


def _components(T: SuperOp, slots: dict[int, SuperPoly], n: int | None = None) -> list[DensityElement]:
    if n is None:
        n = max((J + 1 for J, H in slots.items() if H), default=0)
    return [
        DensityElement(_slot_weight(T, J), slots.get(J, SuperPoly.zero()), (T.m0 - J) % 2)
        for J in range(n)
    ]


def naive_symbol(T: SuperOp) -> list[DensityElement]:
    """Slot J holds ``omega^{p-(z0-J)/2} G_J`` with shift ``(m0 - J) mod 2``."""
    return _components(T, dict(enumerate(T.coeffs)), T.depth)


def _layout(components: Sequence[DensityElement], lam, p) -> tuple[Scalar, int]:
    if not components:
        return ZERO, 0
    first = components[0]
    p = as_scalar(p)
    z0 = 2 * (p - first.weight)
    for J, v in enumerate(components):
        if v.weight != first.weight + Fraction(J, 2):
            raise ValueError("components must have consecutive half-step weights")
        if v.body and v.shift != (first.shift + J) % 2:
            raise ValueError("component shifts must alternate")
    return z0, first.shift


def naive_quantize(components: Sequence[DensityElement], lam, p) -> SuperOp:
    """Inverse of naive_symbol."""
    z0, m0 = _layout(components, lam, p)
    return SuperOp(lam, p, z0, m0, [v.body for v in components])


def conformal_symbol(T: SuperOp, method: str = "table", depth: int | None = None) -> list[DensityElement]:
    """CS(T) as a list of density components indexed by naive slot.

    With Laurent coefficients the list holds the first ``depth`` components.
    ``method="lowest_weight"`` inverts the lowest-weight quantization instead
    of using the closed-form table.
    """
    if method == "table":
        fn = _table_fn(T.source, T.shift)
        slots = _cs_slots(T, fn)
        n = None if T.exact and all(G.is_polynomial() for G in T.coeffs) else (depth or T.depth or DEFAULT_DEPTH)
        return _components(T, slots, n)
    if method == "lowest_weight":
        return _cs_by_lowest_weight(T)
    raise ValueError(f"unknown method {method!r}")


def conformal_quantize(components: Sequence[DensityElement], lam, p, method: str = "table") -> SuperOp:
    """Inverse of conformal_symbol."""
    lam, p = as_scalar(lam), as_scalar(p)
    if not any(v.body for v in components):
        z0, m0 = _layout(components, lam, p) if components else (ZERO, 0)
        return SuperOp.zero(lam, p, z0, m0)
    if method == "lowest_weight":
        total = None
        z0, m0 = _layout(components, lam, p)
        for J, v in enumerate(components):
            if v.body:
                piece = cq_lowest_weight(v, lam, p).padded(z0)
                total = piece if total is None else total + piece
        return total.trimmed()
    if method != "table":
        raise ValueError(f"unknown method {method!r}")
    if any(not v.body.is_polynomial() for v in components):
        raise ValueError("quantization needs polynomial components")
    z0, m0 = _layout(components, lam, p)
    fn = _table_fn(lam, p)
    target = {J: v.body for J, v in enumerate(components) if v.body}
    coeffs: list[SuperPoly] = []
    T = SuperOp(lam, p, z0, m0, [])
    J = 0
    while True:
        got = _cs_slots(T, fn)
        keys = [K for K in set(target) | set(got) if target.get(K, SuperPoly.zero()) != got.get(K, SuperPoly.zero())]
        if not keys:
            return T.trimmed() if T.coeffs else T
        J = min(keys)
        diff = target.get(J, SuperPoly.zero()) - got.get(J, SuperPoly.zero())
        while len(coeffs) <= J:
            coeffs.append(SuperPoly.zero())
        coeffs[J] = coeffs[J] + diff
        T = SuperOp(lam, p, z0, m0, coeffs)


def equivariance_residual(g: KElement, v: DensityElement, lam, p) -> SuperOp:
    """``sigma(g) CQ(v) - CQ(pi(g) v)``; zero when CQ is equivariant at v."""
    p = as_scalar(p)
    z0 = 2 * (p - v.weight)
    left = sigma_action(g, conformal_quantize([v], lam, p))
    right = conformal_quantize([density_action(g, v)], lam, p)
    if left.is_zero():
        return right * -1 if not right.is_zero() else right
    if right.is_zero():
        return left
    return left.padded(z0) - right.padded(z0)


def lowest_weight_vector(lam, p, s, m: int) -> SuperOp:
    """``omega^p Dbar^{2(p-s)}_m``, the image of ``Pi^m omega^s`` under CQ."""
    p = as_scalar(p)
    return SuperOp(lam, p, 2 * (p - as_scalar(s)), m, [SuperPoly.constant(1)])


def _raise_count(s: Scalar, n: int) -> Scalar:
    out = ONE
    for b in range((n + 1) // 2):
        out = out * (2 * s + b)
    return out


def cq_lowest_weight(v: DensityElement, lam, p) -> SuperOp:
    """CQ(v) as ``sigma(e_{1/2})^n`` applied to the lowest weight vector.

    ``pi_s(e_{1/2})^n omega^s = (2s)(2s+1)...(2s+floor((n-1)/2)) xi^a x^b omega^s``
    with n = 2b + a, so each monomial is reached by dividing out that count.
    """
    if not v.body.is_polynomial():
        raise ValueError("lowest-weight quantization needs a polynomial body")
    s = v.weight
    base = lowest_weight_vector(lam, p, s, v.shift)
    total = None
    half = e(HALF)
    for (a, b), c in sorted(v.body.terms.items(), key=lambda kv: 2 * kv[0][1] + kv[0][0]):
        n = 2 * b + a
        T = base
        for _ in range(n):
            T = sigma_action(half, T)
        T = T * _div(c, _raise_count(s, n), f"lowest-weight count at weight {s}")
        T = T.padded(base.z0)
        total = T if total is None else total + T
    if total is None:
        return SuperOp.zero(lam, p, base.z0, base.m0)
    return total


def _cs_by_lowest_weight(T: SuperOp) -> list[DensityElement]:
    if not T.exact or any(not G.is_polynomial() for G in T.coeffs):
        raise ValueError("lowest-weight symbol needs an exact polynomial operator")
    comps: dict[int, SuperPoly] = {}
    R = T
    for _ in range(10_000):
        R = R.padded(T.z0) if not R.is_zero() else R
        J = next((K for K, G in enumerate(R.coeffs) if G), None)
        if J is None:
            break
        G = R.coeffs[J]
        comps[J] = G
        v = DensityElement(_slot_weight(T, J), G, (T.m0 - J) % 2)
        R = R - cq_lowest_weight(v, T.source, T.shift).padded(T.z0)
    else:  # pragma: no cover
        raise RuntimeError("lowest-weight inversion did not terminate")
    return _components(T, comps)


def sesquisymbol(T: SuperOp) -> tuple[DensityElement, DensityElement, DensityElement]:
    """The first three conformal-symbol components of T."""
    slots = _cs_slots(T, _table_fn(T.source, T.shift), tmax=2)
    comps = _components(T, slots, 3)
    return comps[0], comps[1], comps[2]


def matrix_entry(r, s, X: KElement, lam, p, v: DensityElement | None = None, m: int = 0) -> DensityElement:
    """The (r, s) block of CS o sigma(X) o CQ applied to v in F(s)^{m Pi}.

    The default v is ``Pi^m omega^s``.  Blocks above the diagonal (r < s)
    are returned as zero densities.
    """
    r, s, p = as_scalar(r), as_scalar(s), as_scalar(p)
    if v is None:
        v = DensityElement(s, SuperPoly.constant(1), m)
    shift_out = (v.shift + (_nat(2 * (r - s)) or 0)) % 2
    gap = _nat(2 * (r - s))
    if gap is None:
        if (r - s).is_constant():
            return DensityElement(r, SuperPoly.zero(), shift_out)
        raise ValueError("r - s must be a constant half-integer")
    z0 = 2 * (p - s)
    T = conformal_quantize([v], lam, p).padded(z0)
    U = sigma_action(X, T)
    if U.is_zero():
        return DensityElement(r, SuperPoly.zero(), shift_out)
    top = _nat(z0 - U.z0)
    if top is None:
        raise ValueError("sigma(X) moved the operator above its source slot")
    U = U.padded(z0)
    comps = conformal_symbol(U)
    if gap < len(comps):
        return comps[gap]
    return DensityElement(r, SuperPoly.zero(), shift_out)


# ---------------------------------------------------------------------------
# extremal projector and step algebra
# ---------------------------------------------------------------------------


def extremal_p_coeff(n: int) -> Scalar:
    """``p_n(e0) = prod_{j=1}^{floor((n+1)/2)} (j - 2 e0)^{-1} / floor(n/2)!``."""
    out = ONE
    for j in range(1, (n + 1) // 2 + 1):
        out = out / (j - 2 * E0)
    fact = 1
    for k in range(2, n // 2 + 1):
        fact *= k
    return out / fact


def c_mu_n(mu, n: int) -> Scalar:
    """``ad(e_{-1/2})^n e_mu = C_{mu n} e_{mu - n/2}`` in closed form."""
    mu = _hi(mu)
    if not 0 <= n <= mu.twice:
        raise ValueError("need 0 <= n <= 2 mu")
    frac_mn = (mu.twice * n) % 2  # 2{mu n}
    length = (n + 1) // 2 - frac_mn
    out = falling_factorial(mu.floor + 1, length)
    if n % 2:
        out = out * (Fraction(1, 2) if mu.is_integer else 2)
    return out


def c_mu_n_bracket(mu, n: int) -> Scalar:
    """The same constant read off from iterated brackets."""
    mu = _hi(mu)
    X = e(mu.value)
    lo = e(-HALF)
    for _ in range(n):
        X = k_bracket(lo, X)
    target = mu - HalfInt(n)
    return X.terms.get(target, ZERO)


@dataclass(frozen=True)
class StepElement:
    """``s_mu = sum_n coeffs[n](e0) e_{1/2}^n e_{mu - n/2}``, n = 0..2mu-2."""

    mu: HalfInt
    coeffs: tuple[Scalar, ...]

    def at(self, weight) -> tuple[Scalar, ...]:
        """Coefficients with e0 set to ``weight``."""
        w = as_scalar(weight)
        out = []
        for n, c in enumerate(self.coeffs):
            try:
                out.append(c.subs({"e0": w}))
            except PoleError as exc:
                raise ResonanceError(f"step coefficient {n} of s_{self.mu} has a pole at e0 = {w}") from exc
        return tuple(out)

    def words(self) -> list[tuple[Scalar, list[KElement]]]:
        out = []
        for n, c in enumerate(self.coeffs):
            out.append((c, [e(HALF)] * n + [e(self.mu.value - Fraction(n, 2))]))
        return out


def step_element(mu) -> StepElement:
    mu = _hi(mu)
    if mu.twice < 3:
        raise ValueError("step elements start at mu = 3/2")
    top = mu.twice - 2
    coeffs = [c_mu_n(mu, n) * extremal_p_coeff(n) for n in range(top)]
    last = (
        c_mu_n(mu, top) * extremal_p_coeff(top)
        + c_mu_n(mu, top + 1) * extremal_p_coeff(top + 1)
        + (E0 - mu.value) * c_mu_n(mu, top + 2) * extremal_p_coeff(top + 2)
    )
    coeffs.append(last)
    return StepElement(mu, tuple(coeffs))


def _is_constant(G: SuperPoly) -> bool:
    return all(key == (0, 0) for key in G.terms)


def _op_weight(T: SuperOp) -> Scalar:
    return T.shift - T.z0 / 2


def apply_step(st: StepElement, T: SuperOp) -> SuperOp:
    """``sigma(s_mu) T`` for a lowest weight vector T; e0 is set to the output weight."""
    T = T.trimmed()
    if T.is_zero():
        return T
    if T.depth != 1 or not _is_constant(T.coeffs[0]):
        raise ValueError("apply_step expects a lowest weight vector omega^p c Dbar^z_m")
    weight = _op_weight(T) + st.mu.value
    total = None
    for (c, word) in zip(st.at(weight), (w for _, w in st.words())):
        if not c:
            continue
        U = T
        for X in reversed(word):
            U = sigma_action(X, U)
        if U.is_zero():
            continue
        U = U * c
        total = U if total is None else (total + U)
    if total is None:
        return SuperOp.zero(T.source, T.shift, T.z0 - st.mu.twice, (T.m0 + st.mu.twice) % 2)
    return total.trimmed()


def step_scalar(st: StepElement, T: SuperOp) -> Scalar:
    """The multiple P with ``sigma(s_mu) T = P omega^p Dbar^{z - 2mu}_{m + 2mu}``."""
    U = apply_step(st, T)
    z = T.trimmed().z0 - st.mu.twice
    if U.is_zero():
        return ZERO
    if U.depth != 1 or U.z0 != z or not _is_constant(U.coeffs[0]):
        raise ValueError("step output is not a lowest weight vector")
    return U.coeffs[0].at_zero()


# ---------------------------------------------------------------------------
# evaluation at zero and the assembled scalars
# ---------------------------------------------------------------------------


def z_evaluate(T: SuperOp) -> SuperOp:
    """Keep only the constant term of every coefficient."""
    if any(not G.is_polynomial() for G in T.coeffs):
        raise ValueError("evaluation at zero needs polynomial coefficients")
    return T.map_coeffs(lambda G: SuperPoly.constant(G.at_zero()))


def _E(z, m, n, lam) -> Scalar:
    z, lam = as_scalar(z), as_scalar(lam)
    m = int(m) % 2
    odd = n % 2
    return falling_factorial((z - m) / 2, n // 2 + (1 - m) * odd) * falling_factorial(
        (z + m) / 2 - 1 + 2 * lam, n // 2 + m * odd
    )


def _F(z, m, k, lam) -> Scalar:
    z, lam = as_scalar(z), as_scalar(lam)
    m = int(m) % 2
    k = _hi(k)
    if k.twice <= 0:
        raise ValueError("F is defined for positive indices")
    n = k.floor
    sign = -1 if n % 2 else 1
    ff = falling_factorial((z - m) / 2, n)
    if k.is_integer:
        return -sign * ff * (z / 2 - Fraction(n, 2 ** m) + (n + 1) * lam)
    # (z - m)/2 here; with (z + m)/2 the m = 1 values disagree with Z o sigma
    return sign * ff * ((z - m) / 2 - n + 2 * m * (n + 1) * lam)


def zen_coeff(kind: str, *args) -> Scalar:
    """Constants of ``Z sigma(...) omega^p Dbar^z_m``.

    ``("E", z, m, n, lam)`` for e_{1/2}^n, ``("F", z, m, k, lam)`` for e_k and
    ``("G", z, m, mu, n, lam)`` for ``e_{1/2}^n e_{mu - n/2}``.
    """
    if kind == "E":
        return _E(*args)
    if kind == "F":
        return _F(*args)
    if kind == "G":
        z, m, mu, n, lam = args
        mu = _hi(mu)
        z = as_scalar(z)
        return _E(z - mu.twice + n, m - mu.twice + n, n, lam) * _F(z, m, mu - HalfInt(n), lam)
    raise ValueError(f"unknown kind {kind!r}")


def B_rs(r, s) -> Scalar:
    """``2^{1+2{r-s}} (2s)(2s+1)...(2s-2+floor(r-s))``."""
    r, s = as_scalar(r), as_scalar(s)
    d = _hi(r - s)
    out = const(2 ** (1 + d.twice % 2))
    for k in range(d.floor - 1):
        out = out * (2 * s + k)
    return out


def _check_range(d: HalfInt) -> None:
    if d.twice < 3:
        raise ValueError("r - s must be at least 3/2")


def P_rs(r, s, m: int, lam, p) -> Scalar:
    """The assembled sum ``sum_n s_{r-s,n}(r) G^{2(p-s),m}_{r-s,n}``."""
    r, s, lam, p = (as_scalar(a) for a in (r, s, lam, p))
    d = _hi(r - s)
    _check_range(d)
    st = step_element(d)
    total = ZERO
    for n, c in enumerate(st.at(r)):
        if c:
            total = total + c * zen_coeff("G", 2 * (p - s), m, d, n, lam)
    return total


def b_closed_form(r, s, m: int, lam, p) -> Scalar:
    """The simplified ``b^m_rs`` for r - s in {3/2, 2, 5/2}."""
    r, s, lam, p = (as_scalar(a) for a in (r, s, lam, p))
    d = _hi(r - s)
    m = int(m) % 2
    c = c_param(lam, p)
    c2 = c * c
    C = binomial_general
    try:
        if d.twice == 3:
            if m == 0:
                return -c * C(p - s, 2) / (s + HALF)
            return (p - s - HALF) * (4 * p * s + 2 * p + 1 - 16 * c2) / (16 * (s + HALF))
        if d.twice == 4:
            if m == 0:
                return C(p - s, 2) * ((2 * s + 3) * (4 * p + 2 * s + 1) - 48 * c2) / (32 * s * (s + Fraction(3, 2)))
            return C(p - s - HALF, 2) * (s * (2 * p + s + 1) - 12 * c2) / (8 * s * (s + Fraction(3, 2)))
        if d.twice == 5:
            if m == 0:
                return -C(p - s, 3) / C(s + 2, 3) * (4 * (s + 1) * p + 3 - 48 * c2) / 64
            return -c * C(p - s - HALF, 2) / C(s + 2, 3) * (4 * (s + 1) * p - s * s - 2 * s + 2 - 12 * c2) / 24
    except PoleError as exc:
        raise ResonanceError(f"b at s = {s}: {exc}") from exc
    raise ValueError("closed forms cover r - s in {3/2, 2, 5/2}; use b_bruteforce")


def b_bruteforce(r, s, m: int, lam, p, route: str = "assembly") -> Scalar:
    """``b^m_rs = P^m_rs / B_rs`` with P computed independently of the closed form.

    ``route`` picks how P is obtained: ``"assembly"`` sums the Z-evaluated
    step terms, ``"step"`` applies the step element to the lowest weight
    operator, ``"matrix"`` reads the block of CS o sigma(e_{r-s}) o CQ.
    Offsets 1/2 and 1 give 0.
    """
    r, s, lam, p = (as_scalar(a) for a in (r, s, lam, p))
    d = _hi(r - s)
    if d.twice in (1, 2):
        if route == "matrix":
            return matrix_entry(r, s, e(d.value), lam, p, m=m).body.at_zero()
        return ZERO
    _check_range(d)
    if route == "assembly":
        P = P_rs(r, s, m, lam, p)
    elif route == "step":
        P = step_scalar(step_element(d), lowest_weight_vector(lam, p, s, m))
    elif route == "matrix":
        P = matrix_entry(r, s, e(d.value), lam, p, m=m).body.at_zero()
    else:
        raise ValueError(f"unknown route {route!r}")
    return _div(P, B_rs(r, s), f"B at s = {s}")


# ---------------------------------------------------------------------------
# symmetries and the equivalence invariant
# ---------------------------------------------------------------------------


def symmetry_check(which: str, r, s, m: int, b: Callable | None = None, lam=None, p=None) -> tuple[bool, Scalar]:
    """Residual of the conjugation (``"cod"``) or residue (``"sncr"``) symmetry."""
    b = b_closed_form if b is None else b
    lam = sym("lambda") if lam is None else as_scalar(lam)
    p = sym("p") if p is None else as_scalar(p)
    r, s = as_scalar(r), as_scalar(s)
    d = _hi(r - s)
    m = int(m) % 2
    sign = -1 if ((d.twice % 2) * m + d.floor) % 2 else 1
    if which == "cod":
        residual = b(r, s, m, HALF - p - lam, p) - b(r, s, m, lam, p) * sign
    elif which == "sncr":
        m2 = (m + 1 + d.twice) % 2
        residual = b(r, s, m, lam + p, -p) - b(HALF - s, HALF - r, m2, lam, p) * sign
    else:
        raise ValueError(f"unknown symmetry {which!r}")
    return (not residual), residual


def equivalence_invariant_j6(lam, ell: int, nu, q, b: Callable | None = None) -> Scalar:
    """``b^l_{lam+5/2,lam} b^{l+1}_{lam+2,lam+1/2} / (b^{l+1}_{lam+5/2,lam+1/2} b^l_{lam+2,lam})``.

    Every b is evaluated at (nu, q).  A vanishing denominator marks an
    exceptional class and raises ExceptionalClassError.
    """
    b = b_closed_form if b is None else b
    lam, nu, q = as_scalar(lam), as_scalar(nu), as_scalar(q)
    ell = int(ell) % 2
    num = b(lam + Fraction(5, 2), lam, ell, nu, q) * b(lam + 2, lam + HALF, ell + 1, nu, q)
    den = b(lam + Fraction(5, 2), lam + HALF, ell + 1, nu, q) * b(lam + 2, lam, ell, nu, q)
    if not den:
        raise ExceptionalClassError("denominator of the invariant vanishes")
    return num / den
