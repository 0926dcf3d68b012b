"""Empirical constants for the bracket-inverse and double-contraction estimates.

``C1hat`` is the largest observed value of
||1/2 dbar* G [e1, e2]||_C1 / (||e1||_C1 ||e2||_C1) and ``C2hat`` the largest
observed ||e1 -| e2 -| s|| / (||e1||_C1 ||e2||_C1 ||s||) over sampled
tangent (0,1) forms e1, e2 and (n,0) forms s.  Half of the budget draws
independent samples; the rest hill-climbs from the best pair found so far.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..torus.forms import FourierForm, random_form
from ..torus.geometry import TorusGeometry
from ..torus.operators import adjoint_differential, c1_norms, green, l2_norm
from ..torus.products import bracket, contract


def sample_tangent(geometry: TorusGeometry, rng: np.random.Generator, max_band: int) -> FourierForm:
    """Random tangent (0,1) form with a random band, decay profile and sparsity."""
    band = int(rng.integers(1, max_band + 1))
    f = random_form(geometry, 0, 1, "tangent", rng, band=band)
    decay = float(rng.uniform(0.0, 1.5))
    keep = float(rng.uniform(0.2, 1.0))
    norm = np.sqrt(np.asarray(geometry.mode_norm2(band), float))
    profile = np.exp(-decay * norm) * (rng.random(f.band_view().shape) < keep)
    profile[(slice(None),) + (band,) * geometry.axes] = 1.0
    arr = np.zeros_like(f.coeffs)
    K = geometry.K
    arr[(slice(None),) + (slice(K - band, K + band + 1),) * geometry.axes] = f.band_view() * profile
    return f.like(arr)


def bracket_inverse(eta1: FourierForm, eta2: FourierForm) -> FourierForm:
    b, _ = bracket(eta1, eta2)
    return adjoint_differential(green(b), "dbar_star").scale(0.5)


def bracket_ratio(eta1: FourierForm, eta2: FourierForm, norms=None) -> Optional[float]:
    """C1 ratio of the bracket inverse; ``None`` for a zero-norm input.

    ``norms`` may pass precomputed C1 norms of the two inputs.
    """
    n1, n2 = c1_norms([eta1, eta2]) if norms is None else norms
    if n1 == 0 or n2 == 0:
        return None
    out = bracket_inverse(eta1, eta2)
    return float(c1_norms([out])[0] / (n1 * n2))


def contraction_ratio(eta1: FourierForm, eta2: FourierForm, s: FourierForm, norms=None) -> Optional[float]:
    """||eta1 -| eta2 -| s|| / (||eta1||_C1 ||eta2||_C1 ||s||)."""
    n1, n2 = c1_norms([eta1, eta2]) if norms is None else norms
    ns = l2_norm(s)
    if n1 == 0 or n2 == 0 or ns == 0:
        return None
    inner, _ = contract(eta2, s)
    out, _ = contract(eta1, inner)
    return float(l2_norm(out) / (n1 * n2 * ns))


@dataclass
class CalibrationRecord:
    """Running maxima of the two ratios; histories are nondecreasing."""

    c1hat: float
    c2hat: float
    sample_count: int
    max_pair: dict
    skipped: int = 0
    history_c1: List[float] = field(default_factory=list)
    history_c2: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "C1hat": self.c1hat,
            "C2hat": self.c2hat,
            "sampleCount": self.sample_count,
            "maxAchievingPair": self.max_pair,
            "skipped": self.skipped,
        }


def _perturb(geometry, rng, eta, max_band, step):
    noise = sample_tangent(geometry, rng, max_band)
    scale = step * l2_norm(eta) / max(l2_norm(noise), 1e-300)
    return eta + noise.scale(scale)


def calibrate_constants(geometry: TorusGeometry, sample_count: int, rng_seed: int = 0,
                        max_band: int = 2, climb_fraction: float = 0.5) -> CalibrationRecord:
    """Estimate C1hat and C2hat from ``sample_count`` evaluated pairs.

    Deterministic for fixed arguments (PCG64 stream seeded by ``rng_seed``).
    """
    if sample_count < 1:
        raise ValueError("sampleCount must be at least 1")
    max_band = min(max_band, geometry.K)
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    explore = max(1, int(round(sample_count * (1 - climb_fraction))))
    best1, best2 = 0.0, 0.0
    best_pair = None
    best_meta: dict = {}
    skipped = 0
    h1, h2 = [], []
    step = 0.5
    for j in range(sample_count):
        if j < explore or best_pair is None:
            e1, e2 = sample_tangent(geometry, rng, max_band), sample_tangent(geometry, rng, max_band)
            origin = "draw"
        else:
            e1 = _perturb(geometry, rng, best_pair[0], max_band, step)
            e2 = _perturb(geometry, rng, best_pair[1], max_band, step)
            origin = "climb"
        s = random_form(geometry, geometry.n, 0, "scalar", rng, band=int(rng.integers(0, max_band + 1)))
        norms = c1_norms([e1, e2])
        r1 = bracket_ratio(e1, e2, norms)
        r2 = contraction_ratio(e1, e2, s, norms)
        if r1 is None or r2 is None:
            skipped += 1
        else:
            if r1 > best1:
                best1, best_pair = r1, (e1, e2)
                best_meta = {"sample": j, "origin": origin, "bands": [e1.band, e2.band], "ratio": r1}
            elif origin == "climb":
                step = max(step * 0.9, 1e-3)
            best2 = max(best2, r2)
        h1.append(best1)
        h2.append(best2)
    return CalibrationRecord(best1, best2, sample_count, best_meta, skipped, h1, h2)


def validate_constants(record: CalibrationRecord, geometry: TorusGeometry, samples: int,
                       rng_seed: int = 1, max_band: int = 2) -> dict:
    """Fresh hold-out draws; reports the largest ratios and any violations."""
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    max_band = min(max_band, geometry.K)
    worst1 = worst2 = 0.0
    v1 = v2 = 0
    for _ in range(samples):
        e1, e2 = sample_tangent(geometry, rng, max_band), sample_tangent(geometry, rng, max_band)
        s = random_form(geometry, geometry.n, 0, "scalar", rng, band=int(rng.integers(0, max_band + 1)))
        norms = c1_norms([e1, e2])
        r1 = bracket_ratio(e1, e2, norms)
        r2 = contraction_ratio(e1, e2, s, norms)
        if r1 is None or r2 is None:
            continue
        worst1, worst2 = max(worst1, r1), max(worst2, r2)
        v1 += r1 > record.c1hat
        v2 += r2 > record.c2hat
    return {"samples": samples, "maxRatioC1": worst1, "maxRatioC2": worst2,
            "violationsC1": int(v1), "violationsC2": int(v2)}
