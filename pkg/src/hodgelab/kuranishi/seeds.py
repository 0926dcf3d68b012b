"""First-order Beltrami data that seed the power series."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from ..torus.forms import FourierForm, TruncationReceipt, component_index, constant, omega_zero
from ..torus.geometry import TorusGeometry
from ..torus.operators import c1_norm, differential, l2_norm
from ..torus.products import contract

SEED_KINDS = ("harmonic-constant", "divergence-free-synthetic", "explicit", "separable")
CY_KINDS = ("harmonic-constant", "divergence-free-synthetic", "explicit")


class SeedRejected(ValueError):
    """An explicit seed violates a closedness condition."""


class DegenerateDraw(RuntimeError):
    """A random draw projected to the zero field; retry with another seed."""


@dataclass(frozen=True)
class SeedResiduals:
    dbar: Tuple[float, ...]
    divergence: Tuple[float, ...]

    def to_dict(self) -> dict:
        return {"dbar": list(self.dbar), "divergence": list(self.divergence)}


@dataclass(frozen=True)
class DeformationSeed:
    """Fields phi_1..phi_m, each a tangent-valued (0,1) form.

    ``scale`` is the common C1 norm the fields were rescaled to (``None``
    when left as given).
    """

    kind: str
    geometry: TorusGeometry
    fields: Tuple[FourierForm, ...]
    scale: Optional[float] = None
    residuals: SeedResiduals = field(default_factory=lambda: SeedResiduals((), ()))

    @property
    def m(self) -> int:
        return len(self.fields)

    @property
    def harmonic(self) -> bool:
        return self.kind == "harmonic-constant"

    @property
    def calabi_yau(self) -> bool:
        """Whether the fields keep the top form closed, del(phi -| Omega0) = 0."""
        return self.kind in CY_KINDS


def closedness_residuals(fields: Sequence[FourierForm]) -> SeedResiduals:
    """||dbar phi|| and ||del(phi -| Omega0)|| relative to ||phi||."""
    if not fields:
        return SeedResiduals((), ())
    om = omega_zero(fields[0].geometry)
    dbar_r, div_r = [], []
    for phi in fields:
        ref = max(l2_norm(phi), 1e-300)
        dbar_r.append(l2_norm(differential(phi, "dbar")) / ref)
        top, _ = contract(phi, om)
        div_r.append(l2_norm(differential(top, "del")) / ref)
    return SeedResiduals(tuple(dbar_r), tuple(div_r))


def _rescale(fields, target):
    out = []
    for phi in fields:
        norm = c1_norm(phi)
        if norm == 0:
            raise DegenerateDraw("zero field cannot be rescaled")
        out.append(phi.scale(target / norm))
    return tuple(out)


def _harmonic_fields(geometry, m, rng):
    n = geometry.n
    fields = []
    for i in range(m):
        if i < n:
            values = {((), (i,), i): 1.0}
        else:
            vals = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            values = {((), (a,), b): vals[a, b] for a in range(n) for b in range(n)}
        fields.append(constant(geometry, 0, 1, "tangent", values))
    return fields


def divergence_free_potential(geometry: TorusGeometry, rng: np.random.Generator, band: int) -> FourierForm:
    """Random tangent-valued function f with sum_j d_j f^j = 0 and no zero mode.

    The constraint is imposed by orthogonal projection mode by mode:
    f <- f - conj(s) (s . f) / |s|^2 with s_j the symbol of d/dz^j.
    """
    from ..torus.forms import random_form

    f = random_form(geometry, 0, 0, "tangent", rng, band=band, harmonic=False)
    bv = np.array(f.band_view())
    sym = np.stack([np.broadcast_to(geometry.symbol_del(j, band), bv.shape[1:]) for j in range(geometry.n)])
    norm2 = np.sum(np.abs(sym) ** 2, axis=0)
    dot = np.sum(sym * bv, axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        coef = np.where(norm2 > 0, dot / np.where(norm2 > 0, norm2, 1.0), 0.0)
    bv = bv - np.conj(sym) * coef
    arr = np.zeros_like(f.coeffs)
    K = geometry.K
    arr[(slice(None),) + (slice(K - band, K + band + 1),) * geometry.axes] = bv
    return f.like(arr)


def _synthetic_fields(geometry, m, rng, band):
    fields = []
    for _ in range(m):
        f = divergence_free_potential(geometry, rng, band)
        if f.max_abs() < 1e-12:
            raise DegenerateDraw("divergence-free projection removed the whole draw")
        vals = rng.standard_normal((geometry.n, geometry.n)) + 1j * rng.standard_normal((geometry.n, geometry.n))
        harm = constant(geometry, 0, 1, "tangent",
                        {((), (a,), b): vals[a, b] for a in range(geometry.n) for b in range(geometry.n)})
        fields.append(harm + differential(f, "dbar"))
    return fields


def separable_fields(geometry: TorusGeometry, m: int, rng: np.random.Generator, band: int):
    """phi_i = dbar_d(g_i) dzbar^d (x) d/dz^d with g_i depending on z^d alone, d = i mod n.

    All brackets of these fields vanish and dbar phi_i = 0, so t -> sum t_i phi_i
    is an integrable linear family; del(phi_i -| Omega0) does not vanish.
    """
    n, K = geometry.n, geometry.K
    fields = []
    for i in range(m):
        d = i % n
        vals = rng.standard_normal((2 * band + 1, 2 * band + 1)) + 1j * rng.standard_normal((2 * band + 1,) * 2)
        vals[band, band] = 0
        comp = component_index(n, 0, 1, "tangent")[((), (d,), d)]
        arr = np.zeros((n * n,) + geometry.mode_shape, complex)
        index = [K] * geometry.axes
        for ia in range(2 * band + 1):
            for ib in range(2 * band + 1):
                index[d] = K - band + ia
                index[n + d] = K - band + ib
                a, b = ia - band, ib - band
                arr[(comp,) + tuple(index)] = np.pi * 1j * (a + 1j * b) * vals[ia, ib]
        fields.append(FourierForm.from_array(geometry, 0, 1, "tangent", arr, band=band))
    return fields


def make_seed(kind: str, geometry: TorusGeometry, rng_seed: int = 0, target_c1_norm: Optional[float] = None,
              m: int = 1, band: int = 1, fields: Optional[Sequence[FourierForm]] = None,
              tol: float = 1e-10) -> DeformationSeed:
    """Build and validate a seed.

    Parameters
    ----------
    kind : str
        One of ``SEED_KINDS``.  ``explicit`` takes ``fields`` as given.
    target_c1_norm : float, optional
        Every field is rescaled to this C1 norm.
    band : int
        Band of the random potentials (synthetic and separable kinds).

    Raises
    ------
    SeedRejected
        if explicit fields are not dbar-closed or do not keep the top form closed.
    DegenerateDraw
        if a random draw is annihilated by the divergence projection.
    """
    if kind not in SEED_KINDS:
        raise ValueError(f"seed kind must be one of {SEED_KINDS}")
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    if kind == "harmonic-constant":
        out = _harmonic_fields(geometry, m, rng)
    elif kind == "divergence-free-synthetic":
        out = _synthetic_fields(geometry, m, rng, band)
    elif kind == "separable":
        out = separable_fields(geometry, m, rng, band)
    else:
        if not fields:
            raise SeedRejected("explicit seed needs at least one field")
        out = list(fields)
        for phi in out:
            if phi.kind != "tangent" or phi.bidegree != (0, 1):
                raise SeedRejected("seed fields must be tangent-valued (0,1) forms")
    if target_c1_norm is not None:
        out = _rescale(out, float(target_c1_norm))
    res = closedness_residuals(out)
    if kind == "explicit":
        bad = [i for i, r in enumerate(res.dbar) if r > 1e-12]
        if bad:
            raise SeedRejected(f"fields {bad} are not dbar-closed (relative residuals {res.dbar})")
        bad = [i for i, r in enumerate(res.divergence) if r > tol]
        if bad:
            raise SeedRejected(
                f"fields {bad} violate del(phi -| Omega0) = 0 (relative residuals {res.divergence})"
            )
    return DeformationSeed(kind, geometry, tuple(f.like(f.coeffs, receipt=TruncationReceipt()) for f in out),
                           None if target_c1_norm is None else float(target_c1_norm), res)
