"""Comparison of the Beltrami coefficients with the exact majorant series."""

from __future__ import annotations

from typing import List, Optional, Sequence

from ..majorant import majorant_coefficients
from .._rational import to_q
from ..torus.forms import FourierForm, omega_zero
from ..torus.operators import c1_norms, l2_norm
from ..torus.products import contract
from .series import BeltramiSeries, multi_indices


def order_c1_norms(series: BeltramiSeries) -> List[float]:
    """sum_{|I|=k} ||phi_I||_C1 for k = 1..N."""
    out = []
    for k in range(1, series.N + 1):
        forms = [f for _, f in series.order(k)]
        out.append(float(c1_norms(forms).sum()))
    return out


def domination_report(series: BeltramiSeries, c1hat: float, x1: Optional[float] = None) -> List[dict]:
    """Rows (order, C1 norm, majorant x_k, ratio, violation).

    The majorant uses c = ``c1hat`` and x_1 = the order-one C1 norm unless
    ``x1`` is given; both are converted to rationals exactly.
    """
    norms = order_c1_norms(series)
    x1 = norms[0] if x1 is None else x1
    maj = majorant_coefficients(to_q(float(c1hat)), to_q(float(x1)), series.N)
    rows = []
    for k, value in enumerate(norms, start=1):
        bound = float(maj[k])
        rows.append({
            "order": k,
            "c1": value,
            "majorant": bound,
            "ratio": value / bound if bound > 0 else (0.0 if value == 0 else float("inf")),
            "violation": value > bound * (1 + 1e-12),
            "discardedMass": series.receipts[k].discarded_mass,
        })
    return rows


def radius_scan(series: BeltramiSeries, t_grid: Sequence[float], c1hat: float,
                base: Optional[FourierForm] = None) -> List[dict]:
    """Partial sums of sum_k ||phi_k -| Omega0|| |t|^k against the majorant envelope.

    The envelope sum_k x_k |t|^k ||Omega0|| bounds each partial sum because
    the pointwise contraction satisfies |phi -| O| <= |phi| |O|.
    """
    g = series.geometry
    base = omega_zero(g) if base is None else base
    base_norm = l2_norm(base)
    terms = []
    for k in range(1, series.N + 1):
        total = 0.0
        for I in multi_indices(series.m, k):
            u, _ = contract(series.coeffs[I], base)
            total += l2_norm(u)
        terms.append(total)
    norms = order_c1_norms(series)
    maj = majorant_coefficients(to_q(float(c1hat)), to_q(float(norms[0])), series.N)
    rows = []
    for t in t_grid:
        t = abs(float(t))
        partial, envelope = 0.0, 0.0
        partials = []
        for k in range(1, series.N + 1):
            partial += terms[k - 1] * t ** k
            envelope += float(maj[k]) * t ** k * base_norm
            partials.append(partial)
        increments = [partials[0]] + [b - a for a, b in zip(partials, partials[1:])]
        rows.append({
            "t": t,
            "partialSums": partials,
            "envelope": envelope,
            "withinEnvelope": partial <= envelope * (1 + 1e-12),
            "monotone": all(d >= 0 for d in increments),
            "lastIncrement": increments[-1],
        })
    return rows
