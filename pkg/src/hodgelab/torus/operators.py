"""Mode-diagonal Hodge operators and norms on the flat torus."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Tuple

import numpy as np

from .. import _exterior as ext
from . import kernels
from .forms import FourierForm, TruncationReceipt, component_index, component_keys, frame_weight
from .geometry import TorusGeometry

WHICH_D = ("dbar", "del")
WHICH_DSTAR = ("dbar_star", "del_star")


@lru_cache(maxsize=None)
def _shift_table(n: int, p: int, q: int, kind: str, which: str) -> Tuple[Tuple[int, int, int, int], ...]:
    """(source component, target component, direction j, sign) for d = sum_j dx^j ^ d_j."""
    holo = which == "del"
    tp, tq = (p + 1, q) if holo else (p, q + 1)
    if tp > n or tq > n:
        return ()
    tindex = component_index(n, tp, tq, kind)
    rows = []
    for c, (I, J, v) in enumerate(component_keys(n, p, q, kind)):
        for j in range(n):
            s = ext.del_basis(j, I, J) if holo else ext.dbar_basis(j, I, J)
            if s is None:
                continue
            rows.append((c, tindex[(s[1], s[2], v)], j, s[0]))
    return tuple(rows)


def differential(f: FourierForm, which: str = "dbar") -> FourierForm:
    """dbar f or del f, exactly mode by mode.

    A result of degree above n is returned as the zero form of the clamped
    degree with a warning in its receipt.
    """
    if which not in WHICH_D:
        raise ValueError(f"which must be one of {WHICH_D}")
    g = f.geometry
    n = g.n
    tp, tq = (f.p + 1, f.q) if which == "del" else (f.p, f.q + 1)
    if tp > n or tq > n:
        rec = f.receipt.merge(TruncationReceipt(0.0, g.K, (f"{which} raises the degree past n",)))
        return FourierForm.zero(g, min(tp, n), min(tq, n), f.kind, rec)
    symbol = g.symbol_del if which == "del" else g.symbol_dbar
    out = np.zeros((len(component_keys(n, tp, tq, f.kind)),) + g.mode_shape, complex)
    for src, dst, j, sign in _shift_table(n, f.p, f.q, f.kind, which):
        out[dst] += sign * symbol(j) * f.coeffs[src]
    return f.like(out, p=tp, q=tq)


def adjoint_differential(f: FourierForm, which: str = "dbar_star") -> FourierForm:
    """Formal L2 adjoint of dbar or del for the flat metric, mode by mode."""
    if which not in WHICH_DSTAR:
        raise ValueError(f"which must be one of {WHICH_DSTAR}")
    g = f.geometry
    n = g.n
    holo = which == "del_star"
    sp, sq = (f.p - 1, f.q) if holo else (f.p, f.q - 1)
    if sp < 0 or sq < 0:
        return FourierForm.zero(g, max(sp, 0), max(sq, 0), f.kind, f.receipt)
    symbol = g.symbol_del if holo else g.symbol_dbar
    ratio = frame_weight(f.p, f.q, f.kind) / frame_weight(sp, sq, f.kind)
    out = np.zeros((len(component_keys(n, sp, sq, f.kind)),) + g.mode_shape, complex)
    for src, dst, j, sign in _shift_table(n, sp, sq, f.kind, "del" if holo else "dbar"):
        out[src] += ratio * sign * np.conj(symbol(j)) * f.coeffs[dst]
    return f.like(out, p=sp, q=sq)


def dbar(f):
    return differential(f, "dbar")


def del_(f):
    return differential(f, "del")


def dbar_star(f):
    return adjoint_differential(f, "dbar_star")


def del_star(f):
    return adjoint_differential(f, "del_star")


def laplacian(f: FourierForm) -> FourierForm:
    """The dbar-Laplacian, 2 pi^2 |m|^2 on every component (equal to the del-Laplacian here)."""
    return f.like(f.coeffs * f.geometry.laplacian_eigenvalue())


def harmonic_projection(f: FourierForm) -> FourierForm:
    out = np.zeros_like(f.coeffs)
    zi = (slice(None),) + f.geometry.zero_index
    out[zi] = f.coeffs[zi]
    return f.like(out, band=0)


def green(f: FourierForm) -> FourierForm:
    lam = f.geometry.laplacian_eigenvalue()
    inv = np.zeros_like(lam, dtype=float)
    np.divide(1.0, lam, out=inv, where=lam > 0)
    return f.like(f.coeffs * inv)


def green_harmonic(f: FourierForm) -> Tuple[FourierForm, FourierForm]:
    """(G f, H f) with f = H f + Laplacian(G f)."""
    return green(f), harmonic_projection(f)


# -- inner products and norms ----------------------------------------------------


def inner(a: FourierForm, b: FourierForm) -> complex:
    """<a, b> = sum over components and modes of weight * a * conj(b) (Parseval)."""
    a._check(b)
    return complex(a.weight * np.vdot(b.coeffs, a.coeffs))


def l2_norm(f: FourierForm) -> float:
    return float(np.sqrt(f.weight * np.sum(f.coeffs.real**2 + f.coeffs.imag**2)))


def _evaluation_matrix(L: int, band: int) -> np.ndarray:
    x = np.arange(L)[:, None] / L
    k = np.arange(-band, band + 1)[None, :]
    return np.exp(2j * np.pi * x * k)


def _prefix(arrays: np.ndarray, E: np.ndarray, axes: int) -> np.ndarray:
    """Evaluate axes 0..axes-2 of (F, B, ..., B) arrays on the grid; keep the last axis."""
    out = arrays
    for ax in range(axes - 1):
        # contract axis (1 + ax) with E, put the grid axis back in place
        out = np.moveaxis(np.tensordot(out, E, axes=([1 + ax], [1])), -1, 1 + ax)
    F = out.shape[0]
    return out.reshape(F, -1, out.shape[-1])


def grid_sups(fields: List[Tuple[FourierForm, np.ndarray]], backend=None) -> np.ndarray:
    """Sup over the oversampled grid of the pointwise frame norm of each field.

    ``fields`` lists (form, multiplier) pairs; the multiplier (broadcast over
    the band array) turns the form into e.g. one of its real derivatives.
    """
    if not fields:
        return np.zeros(0)
    g = fields[0][0].geometry
    band = max(f.band for f, _ in fields)
    L = g.grid_points
    E = _evaluation_matrix(L, band)
    stacks, weights, groups = [], [], []
    for gi, (f, mult) in enumerate(fields):
        if f.coeffs.shape[0] == 0:
            continue
        stacks.append(f.band_view(band) * mult)
        weights.extend([f.weight] * f.coeffs.shape[0])
        groups.extend([gi] * f.coeffs.shape[0])
    if not stacks:
        return np.zeros(len(fields))
    arrays = np.concatenate(stacks, axis=0)
    A = _prefix(arrays, E, g.axes)
    return kernels.grid_sup(A, E, np.array(weights), np.array(groups), len(fields), backend)


def c0_norm(f: FourierForm, backend=None) -> float:
    return float(grid_sups([(f, 1.0)], backend)[0])


def c1_norm(f: FourierForm, backend=None) -> float:
    """Grid sup of |f| plus the grid sups of its 2n real first derivatives."""
    g = f.geometry
    fields = [(f, 1.0)] + [(f, g.symbol_real(d, f.band)) for d in range(g.axes)]
    return float(grid_sups(fields, backend).sum())


@dataclass(frozen=True)
class Norms:
    l2: float
    c0: float
    c1: float


def norms(f: FourierForm, backend=None) -> Norms:
    g = f.geometry
    fields = [(f, 1.0)] + [(f, g.symbol_real(d, f.band)) for d in range(g.axes)]
    sups = grid_sups(fields, backend)
    return Norms(l2_norm(f), float(sups[0]), float(sups.sum()))


def c1_norms(forms: Iterable[FourierForm], backend=None) -> np.ndarray:
    """C1 norms of several forms, one kernel call per distinct band."""
    forms = list(forms)
    out = np.zeros(len(forms))
    if not forms:
        return out
    g = forms[0].geometry
    by_band: dict = {}
    for i, f in enumerate(forms):
        by_band.setdefault(f.band, []).append(i)
    for band, idx in by_band.items():
        fields = []
        for i in idx:
            fields.append((forms[i], 1.0))
            fields.extend((forms[i], g.symbol_real(d, band)) for d in range(g.axes))
        sups = grid_sups(fields, backend).reshape(len(idx), 1 + g.axes)
        out[idx] = sups.sum(axis=1)
    return out


def evaluate(f: FourierForm, points: np.ndarray) -> np.ndarray:
    """Component values at real points of shape (P, 2n); returns (ncomp, P)."""
    g = f.geometry
    b = f.band
    coeffs = f.band_view().reshape(f.coeffs.shape[0], -1)
    freqs = np.stack(np.meshgrid(*([np.arange(-b, b + 1)] * g.axes), indexing="ij"), axis=-1).reshape(-1, g.axes)
    phase = np.exp(2j * np.pi * np.asarray(points) @ freqs.T)
    return coeffs @ phase.T


def relative_residual(a: FourierForm, b: FourierForm, scale: float | None = None) -> float:
    """||a - b|| / max(scale or max(||a||, ||b||), tiny)."""
    diff = l2_norm(a - b)
    ref = scale if scale is not None else max(l2_norm(a), l2_norm(b))
    return diff / ref if ref > 1e-300 else diff
