"""Grid-sup kernel selection.

The compiled extension is used when it was built; otherwise the NumPy
version is used.  Set ``HODGELAB_KERNEL=python`` to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _gridsup_py

try:  # pragma: no cover - depends on the build
    from . import _gridsup as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

if _compiled is not None and os.environ.get("HODGELAB_KERNEL", "").lower() != "python":
    BACKEND = "cython"
    _impl = _compiled.grid_sup
else:
    BACKEND = "python"
    _impl = _gridsup_py.grid_sup


def available_backends() -> dict:
    out = {"python": _gridsup_py.grid_sup}
    if _compiled is not None:
        out["cython"] = _compiled.grid_sup
    return out


def grid_sup(A, E, w, group, ngroups: int, backend: str | None = None) -> np.ndarray:
    """Per-group sup over a tensor grid of the weighted pointwise norm.

    Parameters
    ----------
    A : complex array (F, P, B)
        Fields already evaluated on the first P grid points of all axes but
        the last, with B Fourier coefficients left on the last axis.
    E : complex array (L, B)
        Last-axis evaluation matrix.
    w : float array (F,)
        Frame weight of each field.
    group : int array (F,)
        Group of each field; the norm is summed within a group.
    """
    fn = _impl if backend is None else available_backends()[backend]
    A = np.ascontiguousarray(A, dtype=np.complex128)
    E = np.ascontiguousarray(E, dtype=np.complex128)
    w = np.ascontiguousarray(w, dtype=np.float64)
    group = np.ascontiguousarray(group, dtype=np.int64)
    return np.asarray(fn(A, E, w, group, int(ngroups)))
