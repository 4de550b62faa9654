"""Incremental row spaces for span-membership questions.

Rows are sparse ``{column: coefficient}`` dicts.  :class:`ExactRowSpace`
keeps integer rows in echelon form and eliminates fraction-free (cross
multiplication followed by a content division), so no rational arithmetic
happens inside the loop.  :class:`FloatRowSpace` keeps an orthonormal basis
and tests membership by the relative norm of the projection residual.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

import numpy as np

DEFAULT_RANK_TOL = 1e-8


def _integer_row(row: dict) -> dict:
    row = {c: Fraction(v) for c, v in row.items() if v != 0}
    if not row:
        return {}
    den = lcm(*(v.denominator for v in row.values()))
    ints = {c: int(v * den) for c, v in row.items()}
    return _primitive(ints)


def _primitive(row: dict) -> dict:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        row = {c: v // g for c, v in row.items()}
    return row


class ExactRowSpace:
    def __init__(self, ncols: int):
        self.ncols = ncols
        self._pivots: dict[int, dict] = {}

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def _reduce(self, row: dict) -> dict:
        row = dict(row)
        while row:
            lead = min(row)
            prow = self._pivots.get(lead)
            if prow is None:
                return row
            a = prow[lead]
            b = row[lead]
            new = {c: a * v for c, v in row.items()}
            for c, v in prow.items():
                x = new.get(c, 0) - b * v
                if x:
                    new[c] = x
                else:
                    new.pop(c, None)
            row = _primitive(new) if new else new
        return row

    def add(self, row: dict) -> bool:
        """Insert ``row``; return True when it enlarged the span."""
        r = self._reduce(_integer_row(row))
        if not r:
            return False
        self._pivots[min(r)] = r
        return True

    def contains(self, row: dict) -> bool:
        return not self._reduce(_integer_row(row))


class FloatRowSpace:
    def __init__(self, ncols: int, tol: float = DEFAULT_RANK_TOL):
        self.ncols = ncols
        self.tol = tol
        self._basis: list[np.ndarray] = []

    @property
    def rank(self) -> int:
        return len(self._basis)

    def _dense(self, row: dict) -> np.ndarray:
        v = np.zeros(self.ncols)
        for c, x in row.items():
            v[c] = float(x)
        return v

    def _residual(self, v: np.ndarray) -> np.ndarray:
        # two passes of modified Gram-Schmidt keep the basis orthogonal to working precision
        for _ in range(2):
            for q in self._basis:
                v = v - (q @ v) * q
        return v

    def add(self, row: dict) -> bool:
        v = self._dense(row)
        nv = np.linalg.norm(v)
        if nv == 0:
            return False
        r = self._residual(v / nv)
        nr = np.linalg.norm(r)
        if nr <= self.tol:
            return False
        self._basis.append(r / nr)
        return True

    def contains(self, row: dict) -> bool:
        v = self._dense(row)
        nv = np.linalg.norm(v)
        if nv == 0:
            return True
        return np.linalg.norm(self._residual(v / nv)) <= self.tol


def row_space(ncols: int, exact: bool, tol: float = DEFAULT_RANK_TOL):
    return ExactRowSpace(ncols) if exact else FloatRowSpace(ncols, tol)
