"""The Beltrami power series and its order-by-order checks.

A multi-index is a tuple of m non-negative integers.  Coefficients are
built order by order from all ordered splittings ``I = J + L`` with
``|J|, |L| >= 1``, so a diagonal index ``2 e_i`` gets the single pair
``(e_i, e_i)`` and an off-diagonal ``e_i + e_j`` gets both orders.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Dict, Iterator, List, Optional, Tuple

from ..torus.forms import FourierForm, TruncationReceipt, omega_zero
from ..torus.operators import (
    adjoint_differential,
    differential,
    green,
    harmonic_projection,
    l2_norm,
)
from ..torus.products import bracket, contract, from_top
from .seeds import DeformationSeed

MultiIndex = Tuple[int, ...]
PATHS = ("contraction", "bracket")


@lru_cache(maxsize=None)
def multi_indices(m: int, order: int) -> Tuple[MultiIndex, ...]:
    """All m-tuples of total ``order`` in graded lexicographic order (e_1 first)."""
    if m == 1:
        return ((order,),)
    out = []
    for first in range(order, -1, -1):
        out.extend((first,) + rest for rest in multi_indices(m - 1, order - first))
    return tuple(out)


def all_indices(m: int, N: int) -> List[MultiIndex]:
    return [I for k in range(1, N + 1) for I in multi_indices(m, k)]


@lru_cache(maxsize=None)
def splittings(I: MultiIndex) -> Tuple[Tuple[MultiIndex, MultiIndex], ...]:
    """Ordered pairs (J, L) with J + L = I and both nonzero."""
    out = []
    for J in product(*(range(v + 1) for v in I)):
        L = tuple(a - b for a, b in zip(I, J))
        if sum(J) and sum(L):
            out.append((J, L))
    return tuple(out)


def _unordered(I):
    """Splittings up to swapping, with multiplicity 1 or 2."""
    seen = {}
    for J, L in splittings(I):
        key = min(J, L), max(J, L)
        seen[key] = seen.get(key, 0) + 1
    return seen.items()


@dataclass
class BeltramiSeries:
    """Truncated series sum_I phi_I t^I of tangent (0,1) forms."""

    seed: DeformationSeed
    N: int
    path: str
    coeffs: Dict[MultiIndex, FourierForm] = field(default_factory=dict)
    receipts: Dict[int, TruncationReceipt] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @property
    def m(self) -> int:
        return self.seed.m

    @property
    def geometry(self):
        return self.seed.geometry

    def __getitem__(self, I) -> FourierForm:
        if isinstance(I, int):
            I = (I,)
        return self.coeffs[tuple(I)]

    def order(self, k: int) -> List[Tuple[MultiIndex, FourierForm]]:
        return [(I, self.coeffs[I]) for I in multi_indices(self.m, k)]

    def indices(self) -> Iterator[MultiIndex]:
        return iter(all_indices(self.m, self.N))

    def bracket_sum(self, I: MultiIndex) -> FourierForm:
        """1/2 sum over ordered splittings of [phi_J, phi_L]; needs all |J| < |I|."""
        total = None
        for (J, L), mult in _unordered(I):
            b, _ = bracket(self.coeffs[J], self.coeffs[L])
            b = b.scale(0.5 * mult)
            total = b if total is None else total + b
        return total


def _coefficient_bracket(coeffs, I) -> Tuple[FourierForm, TruncationReceipt]:
    total = None
    for (J, L), mult in _unordered(I):
        b, _ = bracket(coeffs[J], coeffs[L])
        b = b.scale(0.5 * mult)
        total = b if total is None else total + b
    out = adjoint_differential(green(total), "dbar_star")
    return out, total.receipt


def _coefficient_contraction(coeffs, tops, I, om) -> Tuple[FourierForm, TruncationReceipt]:
    total = None
    for (J, L), mult in _unordered(I):
        c, _ = contract(coeffs[J], tops[L])
        c = c.scale(mult)
        total = c if total is None else total + c
    psi = adjoint_differential(green(differential(total, "del")), "dbar_star").scale(-0.5)
    return from_top(psi), total.receipt


def iterate_beltrami(seed: DeformationSeed, N: int, path: Optional[str] = None,
                     truncation_warning: float = 1e-8) -> BeltramiSeries:
    """Build phi_I for all 1 <= |I| <= N.

    ``path="contraction"`` solves for phi_I -| Omega0 as -1/2 dbar* G del of
    the sum of double contractions with Omega0 and converts back;
    ``path="bracket"`` uses phi_I = dbar* G (1/2 sum [phi_J, phi_L]).  The
    two agree when the seed keeps the top form closed; other seeds always
    use the bracket path.
    """
    if N < 1:
        raise ValueError("truncation order must be at least 1")
    if path is None:
        path = "contraction" if seed.calabi_yau else "bracket"
    if path not in PATHS:
        raise ValueError(f"path must be one of {PATHS}")
    if path == "contraction" and not seed.calabi_yau:
        raise ValueError("the contraction path needs a seed with del(phi -| Omega0) = 0")
    m = seed.m
    om = omega_zero(seed.geometry)
    series = BeltramiSeries(seed, N, path)
    tops = {}
    for i, phi in enumerate(seed.fields):
        I = tuple(int(j == i) for j in range(m))
        series.coeffs[I] = phi
        if path == "contraction":
            tops[I], _ = contract(phi, om)
    series.receipts[1] = TruncationReceipt(0.0, seed.geometry.K)
    for k in range(2, N + 1):
        rec = TruncationReceipt(0.0, seed.geometry.K)
        for I in multi_indices(m, k):
            if path == "contraction":
                phi, r = _coefficient_contraction(series.coeffs, tops, I, om)
                tops[I], _ = contract(phi, om)
            else:
                phi, r = _coefficient_bracket(series.coeffs, I)
            rec = rec.merge(TruncationReceipt(r.discarded_mass, r.cap_used))
            series.coeffs[I] = phi.like(phi.coeffs, receipt=TruncationReceipt(r.discarded_mass, r.cap_used))
        series.receipts[k] = rec
        if rec.discarded_mass > truncation_warning:
            series.warnings.append(f"order {k}: truncation discarded L2 mass {rec.discarded_mass:.3e}")
    return series


# -- checks -----------------------------------------------------------------------


@dataclass(frozen=True)
class ResidualRow:
    index: MultiIndex
    order: int
    residual: float
    scale: float
    discarded_mass: float
    judged: bool

    def to_dict(self) -> dict:
        return {"index": list(self.index), "order": self.order, "residual": self.residual,
                "scale": self.scale, "discardedMass": self.discarded_mass, "judged": self.judged}


def integrability_residual(series: BeltramiSeries) -> List[ResidualRow]:
    """||dbar phi_I - 1/2 sum [phi_J, phi_L]|| for every |I| <= N.

    One extra row per index of order N+1 reports the formal mismatch
    (the missing coefficient) and is marked as not judged.
    """
    rows = []
    m = series.m
    for k in range(1, series.N + 1):
        for I in multi_indices(m, k):
            lhs = differential(series.coeffs[I], "dbar")
            if k == 1:
                diff, scale = lhs, l2_norm(series.coeffs[I])
            else:
                rhs = series.bracket_sum(I)
                diff, scale = lhs - rhs, max(l2_norm(lhs), l2_norm(rhs))
            rows.append(ResidualRow(I, k, l2_norm(diff), scale, series.receipts[k].discarded_mass, True))
    for I in multi_indices(m, series.N + 1):
        rhs = series.bracket_sum(I)
        rows.append(ResidualRow(I, series.N + 1, l2_norm(rhs), l2_norm(rhs), rhs.receipt.discarded_mass, False))
    return rows


def bracket_sum_closedness(series: BeltramiSeries) -> List[ResidualRow]:
    """||dbar(sum_{J+L=I} [phi_J, phi_L])|| for 2 <= |I| <= N+1.

    Once the coefficients up to order |I|-1 solve the integrability
    equation, this sum is dbar-closed.
    """
    rows = []
    for k in range(2, series.N + 2):
        for I in multi_indices(series.m, k):
            s = series.bracket_sum(I)
            rows.append(ResidualRow(I, k, l2_norm(differential(s, "dbar")), l2_norm(s),
                                    s.receipt.discarded_mass, True))
    return rows


@dataclass(frozen=True)
class SideConditionRow:
    index: MultiIndex
    order: int
    codifferential: Optional[float]
    exactness: Optional[float]
    harmonic: Optional[float]
    applicable: bool

    def to_dict(self) -> dict:
        return {"index": list(self.index), "order": self.order, "codifferential": self.codifferential,
                "exactness": self.exactness, "harmonic": self.harmonic,
                "applicable": self.applicable}


def side_conditions_check(series: BeltramiSeries) -> List[SideConditionRow]:
    """dbar* phi_I = 0 and del-exactness of phi_I -| Omega0.

    Exactness is measured by ||u - del del* G u|| and ||H u|| with
    u = phi_I -| Omega0.  Order one is only checked for harmonic seeds and
    is otherwise reported as not applicable.
    """
    om = omega_zero(series.geometry)
    rows = []
    for I in series.indices():
        k = sum(I)
        if k == 1 and not series.seed.harmonic:
            rows.append(SideConditionRow(I, k, None, None, None, False))
            continue
        phi = series.coeffs[I]
        u, _ = contract(phi, om)
        exact_part = differential(adjoint_differential(green(u), "del_star"), "del")
        if k == 1:
            # harmonic seeds: phi -| Omega0 is itself harmonic, so compare with H u
            rows.append(SideConditionRow(I, k, l2_norm(adjoint_differential(phi, "dbar_star")),
                                         l2_norm(u - harmonic_projection(u)), None, True))
            continue
        rows.append(SideConditionRow(I, k, l2_norm(adjoint_differential(phi, "dbar_star")),
                                     l2_norm(u - exact_part), l2_norm(harmonic_projection(u)), True))
    return rows


def two_path_check(seed: DeformationSeed, N: int) -> List[ResidualRow]:
    """Distance between the contraction-path and bracket-path coefficients."""
    a = iterate_beltrami(seed, N, "contraction")
    b = iterate_beltrami(seed, N, "bracket")
    rows = []
    for I in a.indices():
        x, y = a.coeffs[I], b.coeffs[I]
        rows.append(ResidualRow(I, sum(I), l2_norm(x - y), max(l2_norm(x), l2_norm(y)),
                                max(x.receipt.discarded_mass, y.receipt.discarded_mass), True))
    return rows
