"""Exact Gaussian elimination over Scalars."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .scalars import ZERO, Scalar, as_scalar

__all__ = ["LinearSystem", "Solution", "solve"]

Row = dict[Hashable, Scalar]


@dataclass
class Solution:
    """Result of an exact linear solve.

    ``particular`` sets every free unknown to zero; ``nullspace`` holds one
    basis vector per free unknown.  ``consistent`` is False when some equation
    reduces to ``0 = nonzero``.
    """

    consistent: bool
    particular: dict[Hashable, Scalar]
    nullspace: list[dict[Hashable, Scalar]]
    pivots: list[Hashable]

    @property
    def nullity(self) -> int:
        return len(self.nullspace)

    @property
    def unique(self) -> bool:
        return self.consistent and not self.nullspace


class LinearSystem:
    """Equations ``sum_u row[u] * u = rhs`` in named unknowns."""

    def __init__(self, unknowns: Iterable[Hashable] = ()):
        self.unknowns: list[Hashable] = list(unknowns)
        self._known = set(self.unknowns)
        self.rows: list[tuple[Row, Scalar]] = []

    def add_unknown(self, u: Hashable) -> None:
        if u not in self._known:
            self._known.add(u)
            self.unknowns.append(u)

    def add(self, row: Mapping[Hashable, object], rhs=0) -> None:
        clean = {}
        for u, c in row.items():
            c = as_scalar(c)
            if c:
                self.add_unknown(u)
                clean[u] = c
        rhs = as_scalar(rhs)
        if clean or rhs:
            self.rows.append((clean, rhs))

    def solve(self) -> Solution:
        return solve(self.rows, self.unknowns)


def solve(rows: Sequence[tuple[Row, Scalar]], unknowns: Sequence[Hashable]) -> Solution:
    order = {u: k for k, u in enumerate(unknowns)}
    reduced: list[tuple[Hashable, Row, Scalar]] = []
    consistent = True
    for row, rhs in rows:
        row = dict(row)
        for piv, prow, prhs in reduced:
            c = row.pop(piv, None)
            if c is None:
                continue
            for u, v in prow.items():
                if u == piv:
                    continue
                nv = row.get(u, ZERO) - c * v
                if nv:
                    row[u] = nv
                else:
                    row.pop(u, None)
            rhs = rhs - c * prhs
        if not row:
            if rhs:
                consistent = False
            continue
        piv = min(row, key=order.__getitem__)
        inv = row[piv].inverse()
        row = {u: v * inv for u, v in row.items()}
        rhs = rhs * inv
        # keep earlier pivot rows fully reduced
        new_reduced = []
        for p2, r2, h2 in reduced:
            c = r2.get(piv)
            if c is not None:
                r2 = dict(r2)
                del r2[piv]
                for u, v in row.items():
                    if u == piv:
                        continue
                    nv = r2.get(u, ZERO) - c * v
                    if nv:
                        r2[u] = nv
                    else:
                        r2.pop(u, None)
                h2 = h2 - c * rhs
            new_reduced.append((p2, r2, h2))
        reduced = new_reduced
        reduced.append((piv, row, rhs))
    pivots = [p for p, _, _ in reduced]
    free = [u for u in unknowns if u not in set(pivots)]
    particular = {u: ZERO for u in unknowns}
    for piv, row, rhs in reduced:
        particular[piv] = rhs
    nullspace = []
    for f in free:
        vec = {u: ZERO for u in unknowns}
        vec[f] = as_scalar(1)
        for piv, row, _ in reduced:
            c = row.get(f)
            if c is not None:
                vec[piv] = -c
        nullspace.append(vec)
    return Solution(consistent, particular, nullspace, pivots)
