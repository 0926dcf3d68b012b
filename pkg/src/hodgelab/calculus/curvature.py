"""Exact Chern curvature of a polynomial Hermitian metric at a rational point."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

from .._rational import Q
from .poly import Poly, gauss, gconj, ginv, gmul

ZERO = (Q(0), Q(0))


class DomainError(ValueError):
    """The metric is singular or not positive definite at the point."""


def _gadd(a, b):
    return a[0] + b[0], a[1] + b[1]


def _gsub(a, b):
    return a[0] - b[0], a[1] - b[1]


def gaussian_inverse(M: List[List[tuple]]) -> List[List[tuple]]:
    """Exact inverse of a square Gaussian-rational matrix (Gauss-Jordan)."""
    r = len(M)
    A = [list(row) + [(Q(int(i == j)), Q(0)) for j in range(r)] for i, row in enumerate(M)]
    for col in range(r):
        piv = next((i for i in range(col, r) if A[i][col] != ZERO), None)
        if piv is None:
            raise DomainError("metric is singular at the point")
        A[col], A[piv] = A[piv], A[col]
        inv = ginv(A[col][col])
        A[col] = [gmul(inv, x) for x in A[col]]
        for i in range(r):
            if i != col and A[i][col] != ZERO:
                f = A[i][col]
                A[i] = [_gsub(x, gmul(f, y)) for x, y in zip(A[i], A[col])]
    return [row[r:] for row in A]


def _det(M):
    r = len(M)
    if r == 1:
        return M[0][0]
    total = ZERO
    for j in range(r):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = gmul(M[0][j], _det(minor))
        total = _gadd(total, term) if j % 2 == 0 else _gsub(total, term)
    return total


def is_positive_definite(M) -> bool:
    """Sylvester's criterion on a Hermitian Gaussian-rational matrix."""
    r = len(M)
    for i in range(r):
        for j in range(r):
            if M[i][j] != gconj(M[j][i]):
                return False
    for k in range(1, r + 1):
        d = _det([row[:k] for row in M[:k]])
        if d[0] <= 0:
            return False
    return True


@dataclass
class CurvatureResult:
    """``R[i][j][a][b]`` is R_{i jbar a bbar} as a Gaussian rational (re, im)."""

    R: list
    values: List[tuple] = field(default_factory=list)
    semi_nakano_positive: bool = True
    nakano_positive: bool = True

    def as_float(self):
        return [[[[complex(float(x[0]), float(x[1])) for x in row] for row in blk] for blk in Rij]
                for Rij in self.R]


def curvature_tensor(h: Sequence[Sequence[Poly]], point) -> list:
    """R_{i jbar a bbar} = -d_i dbar_j h_{a bbar} + h^{g dbar} d_i h_{a dbar} dbar_j h_{g bbar}.

    ``h[a][b]`` is the polynomial h_{a bbar}; the inverse metric entry
    h^{g dbar} is ``inverse(h)[d][g]``.
    """
    r = len(h)
    n = h[0][0].n
    pt = [gauss(z) for z in point]
    H = [[h[a][b].evaluate(pt) for b in range(r)] for a in range(r)]
    if not is_positive_definite(H):
        raise DomainError("metric is not positive definite at the point")
    Hinv = gaussian_inverse(H)
    dh = [[[h[a][b].d(i).evaluate(pt) for b in range(r)] for a in range(r)] for i in range(n)]
    dbh = [[[h[a][b].dbar(j).evaluate(pt) for b in range(r)] for a in range(r)] for j in range(n)]
    R = []
    for i in range(n):
        Ri = []
        for j in range(n):
            Rij = []
            for a in range(r):
                row = []
                for b in range(r):
                    val = h[a][b].d(i).dbar(j).evaluate(pt)
                    val = (-val[0], -val[1])
                    for g in range(r):
                        for d in range(r):
                            val = _gadd(val, gmul(Hinv[d][g], gmul(dh[i][a][d], dbh[j][g][b])))
                    row.append(val)
                Rij.append(row)
            Ri.append(Rij)
        R.append(Ri)
    return R


def nakano_form(R, u) -> tuple:
    """sum R_{i jbar a bbar} u^{i a} conj(u^{j b}) for ``u[i][a]`` Gaussian rationals."""
    n, r = len(R), len(R[0][0])
    u = [[gauss(x) for x in row] for row in u]
    total = ZERO
    for i in range(n):
        for j in range(n):
            for a in range(r):
                for b in range(r):
                    total = _gadd(total, gmul(R[i][j][a][b], gmul(u[i][a], gconj(u[j][b]))))
    return total


def curvature_nakano(h, point, vectors) -> CurvatureResult:
    """Curvature tensor at ``point`` and its Nakano form on each sample vector.

    The verdicts only cover the supplied samples: ``semi_nakano_positive``
    means every sampled value is >= 0, ``nakano_positive`` that every value
    is > 0.

    Raises
    ------
    DomainError
        if h(point) is singular or not positive definite.
    """
    R = curvature_tensor(h, point)
    res = CurvatureResult(R)
    for u in vectors:
        v = nakano_form(R, u)
        res.values.append(v)
        if v[0] < 0:
            res.semi_nakano_positive = False
        if v[0] <= 0:
            res.nakano_positive = False
    return res
