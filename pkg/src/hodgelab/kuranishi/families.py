"""Families of holomorphic top forms built from a Beltrami series.

``canonical_family`` expands exp(Phi) -| Omega0 coefficient by coefficient;
``kahler_family`` solves the order-by-order cascade
dbar Omega_I = -del(sum_{A+B=I} phi_A -| Omega_B) with the minimal
del-exact solution Omega_I = del dbar* G(sum phi_A -| Omega_B).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Dict, List, Optional, Tuple

from ..torus.forms import FourierForm, omega_zero
from ..torus.operators import (
    adjoint_differential,
    c0_norm,
    differential,
    green,
    harmonic_projection,
    l2_norm,
)
from ..torus.products import contract
from .series import BeltramiSeries, MultiIndex, multi_indices, splittings

Bidegree = Tuple[int, int]


@dataclass
class CanonicalFamily:
    """Coefficients I -> {bidegree: form}; the zero index holds the base form."""

    series: BeltramiSeries
    base: FourierForm
    coeffs: Dict[MultiIndex, Dict[Bidegree, FourierForm]] = field(default_factory=dict)
    residuals: List[dict] = field(default_factory=list)
    kind: str = "canonical"

    @property
    def N(self) -> int:
        return self.series.N

    @property
    def zero_index(self) -> MultiIndex:
        return (0,) * self.series.m

    def top(self, I: MultiIndex) -> FourierForm:
        """The pure (n,0) piece of coefficient I."""
        return self.coeffs[tuple(I)][(self.base.n, 0)]


def _all_with_zero(m: int, N: int):
    yield (0,) * m
    for k in range(1, N + 1):
        yield from multi_indices(m, k)


def _splittings_with_zero(I):
    """(A, B) with A + B = I and |A| >= 1; B may be zero."""
    zero = tuple(0 for _ in I)
    yield I, zero
    yield from splittings(I)


def canonical_family(series: BeltramiSeries, base: Optional[FourierForm] = None) -> CanonicalFamily:
    """Coefficients of exp(Phi(t)) -| base and the per-order holomorphicity residual.

    The residual at index I is ||dbar(base)[I=0] + del(phi_I -| base)||.
    """
    g = series.geometry
    base = omega_zero(g) if base is None else base
    n = g.n
    fam = CanonicalFamily(series, base)
    fam.coeffs[fam.zero_index] = {(n, 0): base}
    # powers[k][I] = sum over ordered k-splittings of phi_I1 -| ... -| phi_Ik -| base
    powers: Dict[int, Dict[MultiIndex, FourierForm]] = {0: {fam.zero_index: base}}
    for k in range(1, n + 1):
        powers[k] = {}
    for order in range(1, series.N + 1):
        for I in multi_indices(series.m, order):
            pieces = {}
            for k in range(1, min(order, n) + 1):
                total = None
                for A, B in _splittings_with_zero(I):
                    if B not in powers[k - 1]:
                        continue
                    c, _ = contract(series.coeffs[A], powers[k - 1][B])
                    total = c if total is None else total + c
                if total is None:
                    continue
                powers[k][I] = total
                pieces[(n - k, k)] = total.scale(1.0 / factorial(k))
            fam.coeffs[I] = pieces
    dbar_base = l2_norm(differential(base, "dbar"))
    fam.residuals.append({"index": list(fam.zero_index), "order": 0, "residual": dbar_base,
                          "scale": l2_norm(base)})
    for I in series.indices():
        u = powers[1][I]
        fam.residuals.append({"index": list(I), "order": sum(I),
                              "residual": l2_norm(differential(u, "del")), "scale": l2_norm(u)})
    return fam


def kahler_family(series: BeltramiSeries, base: Optional[FourierForm] = None) -> CanonicalFamily:
    """Solve the cascade for a family of (n,0) forms starting at ``base``.

    Every coefficient is checked for del-exactness (||O - del del* G O||,
    ||H O||), dbar*-exactness (||O - dbar* dbar G O||) and the cascade
    residual ||dbar O_I + del(sum phi_A -| O_B)||.
    """
    g = series.geometry
    base = omega_zero(g) if base is None else base
    n = g.n
    fam = CanonicalFamily(series, base, kind="kahler")
    fam.coeffs[fam.zero_index] = {(n, 0): base}
    tops: Dict[MultiIndex, FourierForm] = {fam.zero_index: base}
    fam.residuals.append({"index": list(fam.zero_index), "order": 0,
                          "cascade": l2_norm(differential(base, "dbar")), "scale": l2_norm(base)})
    for order in range(1, series.N + 1):
        for I in multi_indices(series.m, order):
            source = None
            for A, B in _splittings_with_zero(I):
                c, _ = contract(series.coeffs[A], tops[B])
                source = c if source is None else source + c
            omega_I = differential(adjoint_differential(green(source), "dbar_star"), "del")
            tops[I] = omega_I
            fam.coeffs[I] = {(n, 0): omega_I}
            cascade = differential(omega_I, "dbar") + differential(source, "del")
            del_exact = differential(adjoint_differential(green(omega_I), "del_star"), "del")
            codiff_exact = adjoint_differential(differential(green(omega_I), "dbar"), "dbar_star")
            fam.residuals.append({
                "index": list(I),
                "order": order,
                "cascade": l2_norm(cascade),
                "delExact": l2_norm(omega_I - del_exact),
                "harmonic": l2_norm(harmonic_projection(omega_I)),
                "codifferentialExact": l2_norm(omega_I - codiff_exact),
                "scale": max(l2_norm(omega_I), l2_norm(differential(source, "del"))),
                "norm": l2_norm(omega_I),
            })
    return fam


def growth_estimate(family: CanonicalFamily) -> List[dict]:
    """Compare sum_{|I|=i} ||Omega_I|| with xi (1 + xi)^(i-1) ||Omega||.

    ``xi`` is the largest order sum of C0 norms of the Beltrami
    coefficients (radius 1), the quantity controlling each cascade step
    through the pointwise bound |phi -| O| <= |phi| |O| and the unit
    operator norm of del dbar* G.
    """
    series = family.series
    sums = {}
    for k in range(1, series.N + 1):
        sums[k] = sum(c0_norm(series.coeffs[I]) for I in multi_indices(series.m, k))
    xi = max(sums.values()) if sums else 0.0
    base = l2_norm(family.base)
    rows = []
    for k in range(1, series.N + 1):
        lhs = sum(l2_norm(family.top(I)) for I in multi_indices(series.m, k))
        rhs = xi * (1 + xi) ** (k - 1) * base
        rows.append({"order": k, "lhs": lhs, "rhs": rhs, "xi": xi, "holds": lhs <= rhs * (1 + 1e-12)})
    return rows


def cohomology_expansion(family: CanonicalFamily) -> List[dict]:
    """Harmonic projections of every graded coefficient.

    Order-one rows also carry ||H(piece) - H(phi_i -| Omega0)|| with the
    right side recomputed from the seed field, and the size of the
    non-harmonic part of phi_i -| Omega0.
    """
    series = family.series
    n = family.base.n
    rows = []
    for I, pieces in family.coeffs.items():
        order = sum(I)
        for bideg, piece in sorted(pieces.items(), reverse=True):
            h = harmonic_projection(piece)
            row = {"index": list(I), "order": order, "bidegree": list(bideg),
                   "harmonic": l2_norm(h), "norm": l2_norm(piece)}
            if order == 1 and bideg == (n - 1, 1):
                direct, _ = contract(series.coeffs[I], family.base)
                hd = harmonic_projection(direct)
                row["mismatch"] = l2_norm(h - hd)
                row["exactCorrection"] = l2_norm(direct - hd)
            rows.append(row)
    return rows
