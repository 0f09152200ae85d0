"""Exact rational matrices with fraction-free (Bareiss) elimination."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import NoSolutionError


@dataclass(frozen=True)
class RationalMatrix:
    rows: tuple  # tuple of tuples of Fraction

    @classmethod
    def of(cls, rows: Sequence[Sequence], cols: int | None = None) -> "RationalMatrix":
        rows = tuple(tuple(Fraction(x) for x in r) for r in rows)
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise ValueError("matrix rows must have equal length")
        if cols is not None and widths and widths != {cols}:
            raise ValueError(f"expected {cols} columns")
        m = cls(rows)
        object.__setattr__(m, "_cols", cols if cols is not None else (widths.pop() if widths else 0))
        return m

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return getattr(self, "_cols", len(self.rows[0]) if self.rows else 0)

    def apply(self, v: Sequence) -> tuple:
        return tuple(sum((a * Fraction(x) for a, x in zip(r, v)), Fraction(0)) for r in self.rows)


def _integer_rows(m: RationalMatrix) -> list[list[int]]:
    out = []
    for r in m.rows:
        den = math.lcm(*(x.denominator for x in r)) if r else 1
        out.append([int(x * den) for x in r])
    return out


def echelon(m: RationalMatrix) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form and pivot columns.

    Pivots are taken in column order, from the first row with a nonzero entry;
    every intermediate entry is a minor of the input, so divisions are exact.
    """
    a = _integer_rows(m)
    nrows, ncols = m.nrows, m.ncols
    prev = 1
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        for i in range(r + 1, nrows):
            lead = a[i][c]
            row = a[i]
            for j in range(c + 1, ncols):
                q, rem = divmod(piv * row[j] - lead * a[r][j], prev)
                assert rem == 0
                row[j] = q
            row[c] = 0
        # rows above keep their entries; their scale no longer matches prev
        prev = piv
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(m: RationalMatrix) -> int:
    return len(echelon(m)[1])


def nullspace(m: RationalMatrix) -> list[tuple[Fraction, ...]]:
    """Basis of ``{v : m v = 0}``: one vector per free column (ascending), that column set to 1."""
    rows, pivots = echelon(m)
    n = m.ncols
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in reversed(list(zip(rows, pivots))):
            s = sum((row[j] * v[j] for j in range(p + 1, n)), Fraction(0))
            v[p] = -s / row[p]
        basis.append(tuple(v))
    return basis


def solve(m: RationalMatrix, rhs: Sequence) -> tuple[tuple[Fraction, ...], list[tuple[Fraction, ...]]]:
    """Particular solution of ``m x = rhs`` (free variables 0) and the nullspace basis."""
    aug = RationalMatrix.of([list(r) + [-Fraction(b)] for r, b in zip(m.rows, rhs)], m.ncols + 1)
    kernel = nullspace(aug)
    n = m.ncols
    particular = next((v for v in kernel if v[n] != 0), None)
    if particular is None:
        raise NoSolutionError("the linear system is inconsistent")
    particular = tuple(x / particular[n] for x in particular[:n])
    homogeneous = [v[:n] for v in kernel if v[n] == 0]
    return particular, homogeneous


def in_span(vectors: Sequence[Sequence], v: Sequence) -> bool:
    if not vectors:
        return not any(v)
    base = RationalMatrix.of(list(vectors))
    return rank(RationalMatrix.of(list(vectors) + [list(v)])) == rank(base)
