"""The flat torus C^n / (Z^n + i Z^n) and its Fourier symbols.

Real coordinates z^j = x^j + i y^j run over [0,1)^{2n}.  A Fourier mode is a
pair of integer vectors (a, b) with character exp(2 pi i (a.x + b.y)); on
it d/dz^j acts as pi i (a_j - i b_j) and d/dzbar^j as pi i (a_j + i b_j).
Coefficient arrays carry the 2n frequency axes in the order a_1..a_n,
b_1..b_n, each of length 2K+1 with frequency k stored at index k + K.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class TorusGeometry:
    """Complex dimension ``n``, band limit ``K`` and sup-norm grid factor ``oversample``.

    The metric is flat with <dz^j, dz^k> = 2 delta_jk and
    <d/dz^j, d/dz^k> = 1/2 delta_jk; the torus has volume 1.
    """

    n: int
    K: int
    oversample: int = 2

    def __post_init__(self):
        for name, lo in (("n", 1), ("K", 1), ("oversample", 2)):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < lo:
                raise ValueError(f"{name} must be an integer >= {lo}, got {v!r}")

    @property
    def width(self) -> int:
        """Modes per axis, 2K + 1."""
        return 2 * self.K + 1

    @property
    def axes(self) -> int:
        return 2 * self.n

    @property
    def mode_shape(self) -> tuple:
        return (self.width,) * self.axes

    @property
    def grid_points(self) -> int:
        """Sup-norm grid points per real axis."""
        return self.oversample * self.width

    def frequencies(self, band: int | None = None) -> np.ndarray:
        b = self.K if band is None else band
        return np.arange(-b, b + 1)

    def axis_frequency(self, axis: int, band: int | None = None) -> np.ndarray:
        """Frequencies along one axis, shaped to broadcast against a band array."""
        b = self.K if band is None else band
        shape = [1] * self.axes
        shape[axis] = 2 * b + 1
        return self.frequencies(b).reshape(shape)

    def symbol_del(self, j: int, band: int | None = None) -> np.ndarray:
        a = self.axis_frequency(j, band)
        b = self.axis_frequency(self.n + j, band)
        return np.pi * 1j * (a - 1j * b)

    def symbol_dbar(self, j: int, band: int | None = None) -> np.ndarray:
        a = self.axis_frequency(j, band)
        b = self.axis_frequency(self.n + j, band)
        return np.pi * 1j * (a + 1j * b)

    def symbol_real(self, d: int, band: int | None = None) -> np.ndarray:
        """Symbol of the real partial derivative along axis d (x^1..x^n, y^1..y^n)."""
        return 2j * np.pi * self.axis_frequency(d, band)

    def mode_norm2(self, band: int | None = None) -> np.ndarray:
        """|m|^2 = |a|^2 + |b|^2 on the band array."""
        out = 0
        for d in range(self.axes):
            out = out + self.axis_frequency(d, band) ** 2
        return np.broadcast_to(out, ((2 * (self.K if band is None else band) + 1),) * self.axes)

    def laplacian_eigenvalue(self, band: int | None = None) -> np.ndarray:
        """The dbar-Laplacian acts as 2 pi^2 |m|^2 on every frame component."""
        return 2.0 * np.pi**2 * self.mode_norm2(band)

    @cached_property
    def zero_index(self) -> tuple:
        return (self.K,) * self.axes

    def to_dict(self) -> dict:
        return {"n": self.n, "K": self.K, "oversample": self.oversample}
