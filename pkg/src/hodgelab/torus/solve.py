"""Solving dbar s = del g and the quasi-isometry bookkeeping.

Every operator is diagonal in the Fourier modes, so linear constraints such
as ``dbar del g = 0`` are imposed mode by mode: each mode carries a small
symbol matrix and the orthogonal projection onto its kernel is
``I - pinv(M) M``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence, Tuple

import numpy as np

from .forms import FourierForm, component_keys, frame_weight
from .operators import (
    WHICH_D,
    WHICH_DSTAR,
    _shift_table,
    adjoint_differential,
    differential,
    green,
    harmonic_projection,
    inner,
    l2_norm,
)

# -- mode-wise symbol matrices -------------------------------------------------


def _step_matrix(geometry, op: str, p: int, q: int, kind: str, band: int):
    """Symbol matrix of one first-order operator on (p,q); returns (M, p', q')."""
    n = geometry.n
    shape = (2 * band + 1,) * geometry.axes
    if op in WHICH_D:
        holo = op == "del"
        tp, tq = (p + 1, q) if holo else (p, q + 1)
        ns = len(component_keys(n, p, q, kind))
        nt = len(component_keys(n, tp, tq, kind)) if tp <= n and tq <= n else 0
        M = np.zeros(shape + (nt, ns), complex)
        symbol = geometry.symbol_del if holo else geometry.symbol_dbar
        for src, dst, j, sign in _shift_table(n, p, q, kind, op):
            M[..., dst, src] += sign * np.broadcast_to(symbol(j, band), shape)
        return M, tp, tq
    if op in WHICH_DSTAR:
        holo = op == "del_star"
        sp, sq = (p - 1, q) if holo else (p, q - 1)
        ns = len(component_keys(n, p, q, kind))
        if sp < 0 or sq < 0:
            return np.zeros(shape + (0, ns), complex), max(sp, 0), max(sq, 0)
        forward, _, _ = _step_matrix(geometry, "del" if holo else "dbar", sp, sq, kind, band)
        ratio = frame_weight(p, q, kind) / frame_weight(sp, sq, kind)
        return ratio * np.conj(np.swapaxes(forward, -1, -2)), sp, sq
    raise ValueError(f"unknown operator {op!r}")


def symbol_matrix(geometry, word: Sequence[str], p: int, q: int, kind: str, band: int) -> np.ndarray:
    """Per-mode matrix of the composition ``word`` (applied right to left)."""
    M = None
    for op in reversed(list(word)):
        step, p, q = _step_matrix(geometry, op, p, q, kind, band)
        M = step if M is None else step @ M
    return M


def project_kernel(f: FourierForm, word: Sequence[str]) -> FourierForm:
    """Orthogonal projection of ``f`` onto the kernel of the operator ``word``.

    The frame weight is constant within a bidegree, so the Euclidean
    projection of each mode's coefficient vector is the L2 projection.
    """
    g = f.geometry
    M = symbol_matrix(g, word, f.p, f.q, f.kind, f.band)
    vec = np.moveaxis(f.band_view(), 0, -1)[..., None]
    if M.shape[-2] == 0:
        return f
    pinv = np.linalg.pinv(M, rcond=1e-12)
    vec = vec - pinv @ (M @ vec)
    arr = np.zeros_like(f.coeffs)
    K, b = g.K, f.band
    arr[(slice(None),) + (slice(K - b, K + b + 1),) * g.axes] = np.moveaxis(vec[..., 0], -1, 0)
    return f.like(arr)


# -- the dbar inverse ------------------------------------------------------------


@dataclass(frozen=True)
class DbarInverseDiagnostics:
    residual: float
    solution_norm2: float
    energy_bound: float
    bound_holds: bool
    harmonic_norm: float
    codifferential_norm: float
    del_norm: float

    def to_dict(self) -> dict:
        return asdict(self)


def dbar_inverse(g: FourierForm, tol: float = 1e-10) -> Tuple[FourierForm, float, DbarInverseDiagnostics]:
    """s = dbar* G del g, the minimal solution of dbar s = del g when it exists.

    Parameters
    ----------
    g : FourierForm
        Scalar form of bidegree (n-1, q) on the trivial flat bundle.
    tol : float
        Relative slack allowed in the energy bound.

    Returns
    -------
    s, residual, diagnostics
        ``residual`` is ||dbar s - del g||; it vanishes when dbar del g = 0.
    """
    dg = differential(g, "del")
    Gdg = green(dg)
    s = adjoint_differential(Gdg, "dbar_star")
    if g.q == 0:
        # no (n, -1) forms: the zero solution leaves all of del g as residual
        residual = l2_norm(dg)
    else:
        residual = l2_norm(differential(s, "dbar") - dg)
    s2 = l2_norm(s) ** 2
    bound = inner(dg, Gdg).real
    diag = DbarInverseDiagnostics(
        residual=residual,
        solution_norm2=s2,
        energy_bound=bound,
        bound_holds=s2 <= bound + tol * max(bound, 1.0),
        harmonic_norm=l2_norm(harmonic_projection(s)),
        codifferential_norm=l2_norm(adjoint_differential(s, "dbar_star")),
        del_norm=l2_norm(dg),
    )
    return s, residual, diag


# -- quasi-isometry ----------------------------------------------------------------


def isometric_input(h: FourierForm) -> FourierForm:
    """g = del* h' with h' the projection of h onto ker(dbar del del*).

    Such g is del*-exact and satisfies dbar del g = 0, the equality case of
    the quasi-isometry.
    """
    h = project_kernel(h, ["dbar", "del", "del_star"])
    return adjoint_differential(h, "del_star")


def quasi_isometry_report(g: FourierForm, tol: float = 1e-8) -> dict:
    """Both sides of the energy estimate and the four-term energy identity.

    The identity reads ||dbar* G del g||^2 = ||g||^2 - ||H g||^2
    - <del* g, G del* g> - ||G dbar del g||^2, each term computed on its own.
    """
    n = g.n
    out: dict = {"bidegree": [g.p, g.q]}
    gn2 = l2_norm(g) ** 2
    if g.p == n:
        lhs = l2_norm(adjoint_differential(green(g), "dbar_star")) ** 2
        rhs = inner(g, green(g)).real
        out["estimate"] = {"lhs": lhs, "rhs": rhs, "slack": rhs - lhs}
    lhs = l2_norm(adjoint_differential(green(differential(g, "del")), "dbar_star")) ** 2
    harm = l2_norm(harmonic_projection(g)) ** 2
    dsg = adjoint_differential(g, "del_star")
    codiff = inner(dsg, green(dsg)).real
    ddg = differential(differential(g, "del"), "dbar")
    curv = l2_norm(green(ddg)) ** 2
    rhs = gn2 - harm - codiff - curv
    scale = max(gn2, 1e-300)
    out["identity"] = {
        "lhs": lhs,
        "norm2": gn2,
        "harmonic2": harm,
        "codifferential_energy": codiff,
        "obstruction2": curv,
        "rhs": rhs,
        "residual": abs(lhs - rhs) / scale,
    }
    closed = l2_norm(ddg) <= tol * max(np.sqrt(gn2), 1e-300) * max(1.0, np.pi**2 * g.geometry.K**2)
    exact = np.sqrt(harm + max(l2_norm(dsg) ** 2, 0.0)) <= tol * max(np.sqrt(gn2), 1e-300) * np.pi * g.geometry.K
    out["isometry_case"] = bool(closed and exact)
    out["ratio"] = float(np.sqrt(lhs / gn2)) if gn2 > 0 else 0.0
    return out
