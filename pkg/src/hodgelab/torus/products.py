"""Pointwise products of band-limited forms: wedge, contraction, bracket.

Products are evaluated on a periodic grid large enough that the convolution
of the two input bands is alias free, transformed back, and truncated to
the band limit K.  The L2 mass of the dropped modes goes into the
:class:`TruncationReceipt` of the result.
"""

from __future__ import annotations

import os
from functools import lru_cache
from math import factorial
from typing import Dict, List, Tuple

import numpy as np
import scipy.fft as sfft

from .. import _exterior as ext
from .forms import (
    ContractViolation,
    FourierForm,
    TruncationReceipt,
    component_index,
    component_keys,
    frame_weight,
)
from .geometry import TorusGeometry


def fft_workers() -> int:
    try:
        return max(1, int(os.environ.get("HODGELAB_THREADS", "1")))
    except ValueError:
        return 1


def _grid_len(band: int) -> int:
    return sfft.next_fast_len(2 * band + 1)


def _to_grid(arr: np.ndarray, band: int, L: int, axes: int) -> np.ndarray:
    """Band coefficients (C, 2b+1, ...) -> values on the L^axes grid."""
    C = arr.shape[0]
    full = np.zeros((C,) + (L,) * axes, complex)
    idx = np.arange(-band, band + 1) % L
    full[(slice(None),) + np.ix_(*([idx] * axes))] = arr
    return sfft.ifftn(full, axes=range(1, axes + 1), norm="forward", workers=fft_workers())


def _from_grid(vals: np.ndarray, band: int, L: int, axes: int) -> np.ndarray:
    coeffs = sfft.fftn(vals, axes=range(1, axes + 1), norm="forward", workers=fft_workers())
    idx = np.arange(-band, band + 1) % L
    return coeffs[(slice(None),) + np.ix_(*([idx] * axes))]


def _finish(geometry: TorusGeometry, p: int, q: int, kind: str, out_band_arr: np.ndarray, band: int,
            receipt: TruncationReceipt) -> FourierForm:
    """Place band-``band`` coefficients into a K-form, recording dropped mass."""
    K = geometry.K
    axes = geometry.axes
    ncomp = out_band_arr.shape[0]
    arr = np.zeros((ncomp,) + geometry.mode_shape, complex)
    kept = min(band, K)
    lo = band - kept
    inner = (slice(None),) + (slice(lo, lo + 2 * kept + 1),) * axes
    dropped = 0.0
    if band > K:
        total = np.sum(np.abs(out_band_arr) ** 2)
        dropped = float(np.sqrt(max(total - np.sum(np.abs(out_band_arr[inner]) ** 2), 0.0)
                                * frame_weight(p, q, kind)))
    arr[(slice(None),) + (slice(K - kept, K + kept + 1),) * axes] = out_band_arr[inner]
    rec = receipt.merge(TruncationReceipt(dropped, K))
    return FourierForm(geometry, p, q, kind, arr, kept, rec)


def _bilinear(a: FourierForm, b: FourierForm, terms: List[Tuple[int, int, int, int]],
              p: int, q: int, kind: str, a_arr=None, b_arrs=None) -> FourierForm:
    """sum over terms (ia, ib, out, sign) of sign * a[ia] * b[ib] -> out component.

    ``b_arrs`` optionally replaces b's band coefficients (e.g. derivatives),
    indexed like ``ib``.
    """
    g = a.geometry
    if b.geometry != g:
        raise ContractViolation("forms on different geometries")
    nout = len(component_keys(g.n, p, q, kind)) if p <= g.n and q <= g.n else 0
    band = a.band + b.band
    receipt = a.receipt.merge(b.receipt)
    if nout == 0 or not terms:
        return FourierForm.zero(g, min(p, g.n), min(q, g.n), kind, receipt)
    L = _grid_len(band)
    axes = g.axes
    A = _to_grid(a.band_view() if a_arr is None else a_arr, a.band, L, axes)
    Bv = _to_grid(b.band_view() if b_arrs is None else b_arrs, b.band, L, axes)
    out = np.zeros((nout,) + (L,) * axes, complex)
    for ia, ib, io, s in terms:
        if s > 0:
            out[io] += A[ia] * Bv[ib]
        else:
            out[io] -= A[ia] * Bv[ib]
    return _finish(g, p, q, kind, _from_grid(out, band, L, axes), band, receipt)


@lru_cache(maxsize=None)
def _wedge_terms(n, pa, qa, ka, pb, qb, kb):
    kind = kb if ka == "scalar" else ka
    p, q = pa + pb, qa + qb
    if p > n or q > n:
        return (), kind
    idx = component_index(n, p, q, kind)
    terms = []
    for ia, (I1, J1, v1) in enumerate(component_keys(n, pa, qa, ka)):
        for ib, (I2, J2, v2) in enumerate(component_keys(n, pb, qb, kb)):
            s = ext.wedge(I1, J1, I2, J2)
            if s is None:
                continue
            terms.append((ia, ib, idx[(s[1], s[2], v1 if v1 is not None else v2)], s[0]))
    return tuple(terms), kind


def wedge(f: FourierForm, g: FourierForm) -> Tuple[FourierForm, TruncationReceipt]:
    """f ^ g; at most one factor may be vector valued."""
    if f.kind != "scalar" and g.kind != "scalar":
        raise ContractViolation("wedge of two vector-valued forms")
    n = f.n
    terms, kind = _wedge_terms(n, f.p, f.q, f.kind, g.p, g.q, g.kind)
    out = _bilinear(f, g, list(terms), f.p + g.p, f.q + g.q, kind)
    return out, out.receipt


@lru_cache(maxsize=None)
def _contract_terms(n, s, p, q, kind):
    if p == 0 or q + s > n:
        return ()
    idx = component_index(n, p - 1, q + s, kind)
    terms = []
    for ia, (_, S, t) in enumerate(component_keys(n, 0, s, "tangent")):
        for ib, (I, J, v) in enumerate(component_keys(n, p, q, kind)):
            r = ext.contract(t, S, I, J)
            if r is None:
                continue
            terms.append((ia, ib, idx[(r[1], r[2], v)], r[0]))
    return tuple(terms)


def contract(phi: FourierForm, omega: FourierForm) -> Tuple[FourierForm, TruncationReceipt]:
    """i_phi omega for tangent-valued (0,s) phi; bidegree (p-1, q+s)."""
    if phi.kind != "tangent" or phi.p != 0:
        raise ContractViolation("contraction needs a tangent-valued (0,s) form")
    if omega.p == 0:
        rec = omega.receipt.merge(TruncationReceipt(0.0, omega.geometry.K, ("contraction of a (0,q) form",)))
        out = FourierForm.zero(omega.geometry, 0, min(omega.q + phi.q, omega.n), omega.kind, rec)
        return out, rec
    p, q = omega.p - 1, omega.q + phi.q
    if q > omega.n:
        out = FourierForm.zero(omega.geometry, p, omega.n, omega.kind, omega.receipt)
        return out, out.receipt
    terms = _contract_terms(omega.n, phi.q, omega.p, omega.q, omega.kind)
    out = _bilinear(phi, omega, list(terms), p, q, omega.kind)
    return out, out.receipt


def holomorphic_derivatives(f: FourierForm) -> np.ndarray:
    """d_i of every component on the band array, shape (n, ncomp, 2b+1, ...)."""
    g = f.geometry
    bv = f.band_view()
    return np.stack([bv * g.symbol_del(i, f.band) for i in range(g.n)])


@lru_cache(maxsize=None)
def _bracket_terms(n, pa, pb):
    """Terms of sum_ij phi^i ^ d_i psi^j (x) d_j, with d_i psi^j flattened as (i, comp)."""
    ka = component_keys(n, 0, pa, "tangent")
    kb = component_keys(n, 0, pb, "tangent")
    nb = len(kb)
    if pa + pb > n:
        return ()
    idx = component_index(n, 0, pa + pb, "tangent")
    terms = []
    for ia, (_, S1, i) in enumerate(ka):
        for ib, (_, S2, j) in enumerate(kb):
            m = ext.merge(S1, S2)
            if m is None:
                continue
            terms.append((ia, i * nb + ib, idx[((), m[1], j)], m[0]))
    return tuple(terms)


def _half_bracket(phi: FourierForm, psi: FourierForm) -> FourierForm:
    terms = _bracket_terms(phi.n, phi.q, psi.q)
    dpsi = holomorphic_derivatives(psi)
    flat = dpsi.reshape((-1,) + dpsi.shape[2:])
    return _bilinear(phi, psi, list(terms), 0, phi.q + psi.q, "tangent", b_arrs=flat)


def bracket(phi: FourierForm, psi: FourierForm) -> Tuple[FourierForm, TruncationReceipt]:
    """[phi, psi] = sum (phi^i ^ d_i psi^j - (-1)^{pq} psi^i ^ d_i phi^j) (x) d/dz^j."""
    for x in (phi, psi):
        if x.kind != "tangent" or x.p != 0:
            raise ContractViolation("bracket needs tangent-valued (0,*) forms")
    if phi.q + psi.q > phi.n:
        out = FourierForm.zero(phi.geometry, 0, phi.n, "tangent", phi.receipt.merge(psi.receipt))
        return out, out.receipt
    first = _half_bracket(phi, psi)
    second = _half_bracket(psi, phi)
    sign = -1 if (phi.q * psi.q) % 2 == 0 else 1
    out = first + second.scale(sign)
    return out, out.receipt


LIE_PARTS = ("full", "holo", "antiholo")


def lie_derivative(phi: FourierForm, omega: FourierForm, part: str = "full"):
    """L_phi omega = (-1)^k D(i_phi omega) + i_phi(D omega).

    D is del for ``part="holo"`` and dbar for ``part="antiholo"``.  The two
    pieces have different bidegrees, so ``part="full"`` returns the pair
    (holo, antiholo).
    """
    from .operators import differential

    if part not in LIE_PARTS:
        raise ValueError(f"unknown Lie derivative part {part!r}")
    sign = -1 if phi.q % 2 else 1

    def piece(which):
        inner, _ = contract(phi, omega)
        first = differential(inner, which).scale(sign)
        second, _ = contract(phi, differential(omega, which))
        if first.bidegree == second.bidegree:
            return first + second
        # one side overflowed the degree range and is identically zero
        return second if first.max_abs() == 0 else first

    if part == "holo":
        return piece("del")
    if part == "antiholo":
        return piece("dbar")
    return piece("del"), piece("dbar")


def exp_contract(phi: FourierForm, omega: FourierForm) -> Tuple[Dict[Tuple[int, int], FourierForm], TruncationReceipt]:
    """sum_k (1/k!) i_phi^k omega as a dict bidegree -> piece."""
    if phi.kind != "tangent" or phi.bidegree != (0, 1):
        raise ContractViolation("the exponential is defined for (0,1) Beltrami forms")
    out = {omega.bidegree: omega}
    rec = omega.receipt
    term = omega
    for k in range(1, omega.p + 1):
        if term.q + 1 > omega.n:
            break
        term, r = contract(phi, term)
        rec = rec.merge(r)
        out[term.bidegree] = term.scale(1.0 / factorial(k))
    return out, rec


# -- top-degree duality --------------------------------------------------------


def to_top(phi: FourierForm) -> FourierForm:
    """phi -| (dz^1 ^ ... ^ dz^n) for tangent (0,q) phi; an (n-1, q) form."""
    from .forms import omega_zero

    out, _ = contract(phi, omega_zero(phi.geometry))
    return out


def from_top(psi: FourierForm) -> FourierForm:
    """psi -| (d/dz^1 ^ ... ^ d/dz^n) for a scalar (n-1, q) form psi.

    Signs are those making ``from_top(to_top(phi)) == phi``.
    """
    n = psi.n
    if psi.kind != "scalar" or psi.p != n - 1:
        raise ContractViolation("dual contraction needs a scalar (n-1, q) form")
    q = psi.q
    idx = component_index(n, n - 1, q, "scalar")
    keys = component_keys(n, 0, q, "tangent")
    out = np.zeros((len(keys),) + psi.geometry.mode_shape, complex)
    full = tuple(range(n))
    for c, (_, J, t) in enumerate(keys):
        I = full[:t] + full[t + 1:]
        out[c] = ext.dual_top_sign(n, t, q) * psi.coeffs[idx[(I, J, None)]]
    return FourierForm(psi.geometry, 0, q, "tangent", out, psi.band, psi.receipt)
