"""Band-limited (p,q)-forms on the flat torus, stored mode by mode.

A :class:`FourierForm` holds one complex coefficient array per frame
component ``(I, J, v)``: ``I``/``J`` are strictly increasing 0-based index
tuples of the dz and dzbar factors and ``v`` the value index (``None`` for
scalar forms, the d/dz^v direction for tangent-valued forms, the dz^v
direction for dual-tangent forms).  ``band`` bounds the sup-norm of every
occupied frequency and lets products size their grids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np

from .. import _exterior as ext
from .geometry import TorusGeometry

VALUE_KINDS = ("scalar", "tangent", "dual-tangent")
VALUE_WEIGHT = {"scalar": 1.0, "tangent": 0.5, "dual-tangent": 2.0}

Key = Tuple[Tuple[int, ...], Tuple[int, ...], Optional[int]]


class ContractViolation(ValueError):
    """Operands of incompatible bidegree or value kind."""


@lru_cache(maxsize=None)
def component_keys(n: int, p: int, q: int, kind: str) -> Tuple[Key, ...]:
    if kind not in VALUE_KINDS:
        raise ContractViolation(f"unknown value kind {kind!r}")
    values = [None] if kind == "scalar" else list(range(n))
    return tuple((I, J, v) for I, J in ext.bidegree_components(n, p, q) for v in values)


@lru_cache(maxsize=None)
def component_index(n: int, p: int, q: int, kind: str) -> Dict[Key, int]:
    return {k: i for i, k in enumerate(component_keys(n, p, q, kind))}


def frame_weight(p: int, q: int, kind: str) -> float:
    """Pointwise squared norm of one frame element dz^I ^ dzbar^J (x) value."""
    return 2.0 ** (p + q) * VALUE_WEIGHT[kind]


@dataclass(frozen=True)
class TruncationReceipt:
    """L2 mass of the modes a product dropped beyond the band limit.

    ``cap_used`` is the band limit applied and ``warnings`` collects
    non-fatal conditions such as degree overflow.
    """

    discarded_mass: float = 0.0
    cap_used: int = 0
    warnings: Tuple[str, ...] = ()

    def merge(self, other: "TruncationReceipt") -> "TruncationReceipt":
        mass = float(np.hypot(self.discarded_mass, other.discarded_mass))
        return TruncationReceipt(mass, max(self.cap_used, other.cap_used), self.warnings + other.warnings)

    def to_dict(self) -> dict:
        return {"discardedMass": self.discarded_mass, "capUsed": self.cap_used, "warnings": list(self.warnings)}


@dataclass(frozen=True, eq=False)
class FourierForm:
    geometry: TorusGeometry
    p: int
    q: int
    kind: str
    coeffs: np.ndarray
    band: int
    receipt: TruncationReceipt = field(default_factory=TruncationReceipt)

    def __post_init__(self):
        n = self.geometry.n
        keys = component_keys(n, self.p, self.q, self.kind) if 0 <= self.p <= n and 0 <= self.q <= n else ()
        shape = (len(keys),) + self.geometry.mode_shape
        if self.coeffs.shape != shape:
            raise ContractViolation(f"coefficient array has shape {self.coeffs.shape}, expected {shape}")
        if not 0 <= self.band <= self.geometry.K:
            raise ContractViolation("band outside [0, K]")
        self.coeffs.flags.writeable = False

    # -- construction -------------------------------------------------------
    @classmethod
    def zero(cls, geometry: TorusGeometry, p: int, q: int, kind: str = "scalar",
             receipt: Optional[TruncationReceipt] = None) -> "FourierForm":
        n = geometry.n
        ncomp = len(component_keys(n, p, q, kind)) if 0 <= p <= n and 0 <= q <= n else 0
        return cls(geometry, p, q, kind, np.zeros((ncomp,) + geometry.mode_shape, complex), 0,
                   receipt or TruncationReceipt())

    @classmethod
    def from_array(cls, geometry: TorusGeometry, p: int, q: int, kind: str, coeffs: np.ndarray,
                   band: Optional[int] = None, receipt: Optional[TruncationReceipt] = None) -> "FourierForm":
        coeffs = np.array(coeffs, dtype=complex)
        if band is None:
            band = detect_band(geometry, coeffs)
        return cls(geometry, p, q, kind, coeffs, band, receipt or TruncationReceipt())

    @classmethod
    def from_entries(cls, geometry: TorusGeometry, p: int, q: int, kind: str, entries) -> "FourierForm":
        """Build from ``{(I, J, v, a, b): amplitude}`` with 0-based index tuples."""
        out = cls.zero(geometry, p, q, kind)
        arr = np.array(out.coeffs)
        index = component_index(geometry.n, p, q, kind)
        K = geometry.K
        for (I, J, v, a, b), amp in entries.items():
            key = (tuple(I), tuple(J), v)
            if key not in index:
                raise ContractViolation(f"component {key} not in bidegree ({p},{q}) {kind}")
            mode = tuple(int(x) + K for x in tuple(a) + tuple(b))
            if any(not 0 <= m < geometry.width for m in mode):
                raise ContractViolation(f"mode {(a, b)} outside the band")
            arr[(index[key],) + mode] += amp
        return cls.from_array(geometry, p, q, kind, arr)

    def like(self, coeffs: np.ndarray, band: Optional[int] = None, p: Optional[int] = None,
             q: Optional[int] = None, kind: Optional[str] = None,
             receipt: Optional[TruncationReceipt] = None) -> "FourierForm":
        return FourierForm(
            self.geometry,
            self.p if p is None else p,
            self.q if q is None else q,
            self.kind if kind is None else kind,
            coeffs,
            self.band if band is None else band,
            self.receipt if receipt is None else receipt,
        )

    # -- inspection ---------------------------------------------------------
    @property
    def n(self) -> int:
        return self.geometry.n

    @property
    def bidegree(self) -> Tuple[int, int]:
        return self.p, self.q

    @property
    def keys(self) -> Tuple[Key, ...]:
        if self.coeffs.shape[0] == 0:
            return ()
        return component_keys(self.n, self.p, self.q, self.kind)

    @property
    def weight(self) -> float:
        return frame_weight(self.p, self.q, self.kind)

    def component(self, key: Key) -> np.ndarray:
        return self.coeffs[component_index(self.n, self.p, self.q, self.kind)[key]]

    def band_view(self, band: Optional[int] = None) -> np.ndarray:
        """Coefficients restricted to frequencies |k| <= band on every axis."""
        b = self.band if band is None else band
        K = self.geometry.K
        sl = (slice(None),) + (slice(K - b, K + b + 1),) * self.geometry.axes
        return self.coeffs[sl]

    def harmonic_part(self) -> np.ndarray:
        return self.coeffs[(slice(None),) + self.geometry.zero_index]

    # -- linear algebra -----------------------------------------------------
    def _check(self, other: "FourierForm") -> None:
        if other.geometry != self.geometry:
            raise ContractViolation("forms on different geometries")
        if (self.p, self.q, self.kind) != (other.p, other.q, other.kind):
            raise ContractViolation(
                f"cannot combine {self.kind} ({self.p},{self.q}) with {other.kind} ({other.p},{other.q})"
            )

    def __add__(self, other: "FourierForm") -> "FourierForm":
        self._check(other)
        return self.like(self.coeffs + other.coeffs, max(self.band, other.band),
                         receipt=self.receipt.merge(other.receipt))

    def __sub__(self, other: "FourierForm") -> "FourierForm":
        self._check(other)
        return self.like(self.coeffs - other.coeffs, max(self.band, other.band),
                         receipt=self.receipt.merge(other.receipt))

    def __neg__(self) -> "FourierForm":
        return self.like(-self.coeffs)

    def scale(self, value: complex) -> "FourierForm":
        return self.like(self.coeffs * value)

    def __mul__(self, value) -> "FourierForm":
        return self.scale(value)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return float(np.abs(self.coeffs).max()) if self.coeffs.size else 0.0

    # -- serialisation --------------------------------------------------------
    def to_json(self, tol: float = 0.0) -> dict:
        """Documented layout; index sets and tangent indices are 1-based."""
        entries = []
        K = self.geometry.K
        n = self.n
        for c, (I, J, v) in enumerate(self.keys):
            arr = self.coeffs[c]
            for idx in zip(*np.nonzero(np.abs(arr) > tol)):
                amp = arr[idx]
                mode = [int(i) - K for i in idx]
                entry = {"I": [i + 1 for i in I], "J": [j + 1 for j in J]}
                if v is not None:
                    entry["tangent"] = v + 1
                entry.update({"mode": [mode[:n], mode[n:]], "re": float(amp.real), "im": float(amp.imag)})
                entries.append(entry)
        return {
            "bidegree": [self.p, self.q],
            "valueKind": self.kind,
            "geometry": self.geometry.to_dict(),
            "band": self.band,
            "entries": entries,
        }

    @classmethod
    def from_json(cls, data: dict, geometry: Optional[TorusGeometry] = None) -> "FourierForm":
        geometry = geometry or TorusGeometry(**data["geometry"])
        p, q = data["bidegree"]
        kind = data["valueKind"]
        entries = {}
        for e in data["entries"]:
            v = e.get("tangent")
            key = (tuple(i - 1 for i in e["I"]), tuple(j - 1 for j in e["J"]), None if v is None else v - 1,
                   tuple(e["mode"][0]), tuple(e["mode"][1]))
            entries[key] = entries.get(key, 0) + complex(e["re"], e["im"])
        return cls.from_entries(geometry, p, q, kind, entries)

    def __repr__(self) -> str:
        return (f"FourierForm({self.kind} ({self.p},{self.q}), n={self.n}, K={self.geometry.K}, "
                f"band={self.band}, max|c|={self.max_abs():.3g})")


def detect_band(geometry: TorusGeometry, coeffs: np.ndarray) -> int:
    """Smallest band containing every exactly nonzero coefficient."""
    if coeffs.size == 0:
        return 0
    nz = np.nonzero(np.any(coeffs != 0, axis=0))
    if len(nz[0]) == 0:
        return 0
    return int(max(np.abs(ax - geometry.K).max() for ax in nz))


def random_form(geometry: TorusGeometry, p: int, q: int, kind: str, rng: np.random.Generator,
                band: Optional[int] = None, harmonic: bool = True) -> FourierForm:
    """Gaussian random coefficients on the modes of ``band`` (default K)."""
    b = geometry.K if band is None else band
    ncomp = len(component_keys(geometry.n, p, q, kind))
    small = (ncomp,) + (2 * b + 1,) * geometry.axes
    vals = rng.standard_normal(small) + 1j * rng.standard_normal(small)
    if not harmonic:
        vals[(slice(None),) + (b,) * geometry.axes] = 0
    arr = np.zeros((ncomp,) + geometry.mode_shape, complex)
    K = geometry.K
    arr[(slice(None),) + (slice(K - b, K + b + 1),) * geometry.axes] = vals
    return FourierForm.from_array(geometry, p, q, kind, arr, band=b)


def character(geometry: TorusGeometry, a, b, key: Key = ((), (), None), p: int = 0, q: int = 0,
              kind: str = "scalar", amplitude: complex = 1.0) -> FourierForm:
    """amplitude * e_m times one frame element."""
    return FourierForm.from_entries(geometry, p, q, kind, {key + (tuple(a), tuple(b)): amplitude})


def constant(geometry: TorusGeometry, p: int, q: int, kind: str, values: Dict[Key, complex]) -> FourierForm:
    zero_mode = (0,) * geometry.n
    return FourierForm.from_entries(
        geometry, p, q, kind, {k + (zero_mode, zero_mode): v for k, v in values.items()}
    )


def omega_zero(geometry: TorusGeometry) -> FourierForm:
    """dz^1 ^ ... ^ dz^n."""
    return constant(geometry, geometry.n, 0, "scalar", {(tuple(range(geometry.n)), (), None): 1.0})
