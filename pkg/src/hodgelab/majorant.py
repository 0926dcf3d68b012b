"""Exact majorant series for the quadratic recursion x_k = c * sum x_i x_{k-i}.

All coefficients are exact rationals.  Floating point enters only when the
partial sums are compared against the algebraic generating function
S(tau) = (1 - sqrt(1 - 4 c x1 tau)) / (2c).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from ._rational import Q, q_str, to_q


@dataclass(frozen=True)
class MajorantSeries:
    """Coefficients x_1..x_N of the recursion, stored exactly.

    ``coefficients[k - 1]`` is x_k.
    """

    c: Q
    x1: Q
    coefficients: tuple

    @property
    def N(self) -> int:
        return len(self.coefficients)

    def __getitem__(self, k: int) -> Q:
        if k < 1 or k > self.N:
            raise IndexError(f"order {k} outside 1..{self.N}")
        return self.coefficients[k - 1]

    @property
    def radius(self) -> Optional[Q]:
        return convergence_radius(self.c, self.x1)

    def to_csv(self, tau=None) -> str:
        """CSV rows (n, x_n, x_n tau^n, partial sum); tau defaults to the radius."""
        tau = self.radius if tau is None else to_q(tau)
        if tau is None:
            tau = Q(0)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "x_n", "x_n_tau_n", "partial_sum"])
        partial = Q(0)
        power = Q(1)
        for n, x in enumerate(self.coefficients, start=1):
            power *= tau
            term = x * power
            partial += term
            writer.writerow([n, q_str(x), q_str(term), repr(float(partial))])
        return buf.getvalue()


def recursion_coefficients(c, x1, N: int) -> list:
    """x_1..x_N straight from the recursion (quadratic cost)."""
    c, x1 = to_q(c), to_q(x1)
    if N < 1:
        raise ValueError("N must be >= 1")
    xs = [x1]
    for k in range(2, N + 1):
        total = Q(0)
        for i in range(1, k):
            total += xs[i - 1] * xs[k - i - 1]
        xs.append(c * total)
    return xs


def closed_form_coefficient(c, x1, n: int) -> Q:
    """x_n = [1/2 (1 - 1/2) ... ((n-1) - 1/2)] / (2c n!) * (4 c x1)^n, n >= 2."""
    c, x1 = to_q(c), to_q(x1)
    if n == 1:
        return x1
    num = Q(1, 2)
    for j in range(1, n):
        num *= Q(2 * j - 1, 2)
    return num / (2 * c * math.factorial(n)) * (4 * c * x1) ** n


def majorant_coefficients(c, x1, N: int) -> MajorantSeries:
    """Build the series and cross-check recursion against closed form exactly.

    Raises
    ------
    ValueError
        if ``c <= 0`` or ``N < 1``.
    ArithmeticError
        if the recursion and the closed form ever disagree (they must not).
    """
    c, x1 = to_q(c), to_q(x1)
    if c <= 0:
        raise ValueError("c must be positive")
    xs = recursion_coefficients(c, x1, N)
    for n in range(2, N + 1):
        if closed_form_coefficient(c, x1, n) != xs[n - 1]:
            raise ArithmeticError(f"recursion and closed form differ at n={n}")
    return MajorantSeries(c=c, x1=x1, coefficients=tuple(xs))


def convergence_radius(c, x1) -> Optional[Q]:
    """1/(4|c x1|) exactly; ``None`` stands for an infinite radius (x1 = 0)."""
    c, x1 = to_q(c), to_q(x1)
    prod = abs(c * x1)
    if prod == 0:
        return None
    return 1 / (4 * prod)


def generating_function(c, x1, tau: float) -> float:
    """S(tau) on the branch with S(0) = 0."""
    c, x1 = float(to_q(c)), float(to_q(x1))
    disc = 1.0 - 4.0 * c * x1 * float(tau)
    if disc < 0:
        raise ValueError("tau outside the real domain of S")
    return (1.0 - math.sqrt(disc)) / (2.0 * c)


def formal_square_residual(series: MajorantSeries) -> list:
    """Coefficients of c S^2 - (S - x1 tau) up to order N (all exactly zero)."""
    xs = series.coefficients
    N = series.N
    out = []
    for k in range(1, N + 1):
        sq = Q(0)
        for i in range(1, k):
            sq += xs[i - 1] * xs[k - i - 1]
        rhs = Q(0) if k == 1 else xs[k - 1]
        out.append(series.c * sq - rhs)
    return out


@dataclass
class RadiusEvaluation:
    radius: Optional[Q]
    tau: Q
    S: Optional[float]
    partial_sums: list = field(default_factory=list)
    converged: Optional[bool] = None
    difference: Optional[float] = None


def majorant_radius_eval(c, x1, tau, N: int = 200) -> RadiusEvaluation:
    """Partial sums of sum x_k tau^k against S(tau).

    Inside the disc the last partial sum is compared with S(tau); on the
    boundary the partial sums are only required to increase and stay below
    S(radius) = 1/(2c).
    """
    c, x1, tau = to_q(c), to_q(x1), to_q(tau)
    if c <= 0:
        raise ValueError("c must be positive")
    radius = convergence_radius(c, x1)
    series = majorant_coefficients(c, x1, N)
    partial = Q(0)
    sums = []
    power = Q(1)
    for x in series.coefficients:
        power *= tau
        partial += x * power
        sums.append(float(partial))
    ev = RadiusEvaluation(radius=radius, tau=tau, S=None, partial_sums=sums)
    if radius is not None and abs(tau) > radius:
        ev.converged = False
        return ev
    ev.S = generating_function(c, x1, float(tau))
    if radius is None or abs(tau) < radius:
        ev.difference = abs(sums[-1] - ev.S)
        ev.converged = ev.difference <= 1e-8
    else:
        mono = all(b >= a for a, b in zip(sums, sums[1:])) or c * x1 * tau < 0
        ev.difference = ev.S - sums[-1]
        ev.converged = mono and sums[-1] <= ev.S + 1e-15
    return ev


def boundary_decay(c, x1, N: int = 10_000) -> dict:
    """Check x_n r^n decreasing for n >= 2 and its partial sums bounded, r the radius.

    Uses the exact term ratio x_{n+1} r^{n+1} / (x_n r^n) = (n - 1/2)/(n + 1)
    (times the sign of c x1), so the N-term check stays linear in N.
    """
    c, x1 = to_q(c), to_q(x1)
    radius = convergence_radius(c, x1)
    if radius is None:
        return {"decreasing": True, "bounded": True, "partial_sum": 0.0, "bound": 0.0}
    sign = 1 if c * x1 > 0 else -1
    term = x1 * radius  # n = 1
    partial = term
    magnitudes_decrease = True
    prev_abs = None
    bound = Q(1) / (2 * c)
    bounded = True
    for n in range(1, N):
        term = term * Q(2 * n - 1, 2 * (n + 1)) * sign
        partial += term
        if n + 1 >= 2:
            if prev_abs is not None and abs(term) >= prev_abs:
                magnitudes_decrease = False
            prev_abs = abs(term)
        if sign > 0 and partial > bound:
            bounded = False
    return {
        "decreasing": magnitudes_decrease,
        "bounded": bounded,
        "partial_sum": float(partial),
        "bound": float(bound),
        "last_term": float(term),
    }


def catalan(k: int) -> int:
    return math.comb(2 * k, k) // (k + 1)


def majorant_table(series: MajorantSeries, taus: Iterable) -> list:
    """sum_k x_k |tau|^k for each tau (floats, for report envelopes)."""
    rows = []
    for tau in taus:
        t = abs(float(tau))
        rows.append(sum(float(x) * t**k for k, x in enumerate(series.coefficients, 1)))
    return rows


def as_fractions(values: Sequence) -> list:
    return [q_str(v) for v in values]
