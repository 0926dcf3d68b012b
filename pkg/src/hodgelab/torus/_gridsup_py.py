"""NumPy fallback for the grid-sup kernel (same contract as the compiled one)."""

from __future__ import annotations

import numpy as np

CHUNK = 4096


def grid_sup(A: np.ndarray, E: np.ndarray, w: np.ndarray, group: np.ndarray, ngroups: int) -> np.ndarray:
    """max over (p, l) of sqrt(sum_{f in g} w_f |sum_b A[f,p,b] E[l,b]|^2), per group g."""
    F, P, _ = A.shape
    indicator = np.zeros((ngroups, F))
    indicator[group, np.arange(F)] = w
    best = np.zeros(ngroups)
    for start in range(0, P, CHUNK):
        V = np.einsum("fpb,lb->fpl", A[:, start:start + CHUNK], E, optimize=True)
        mag = (V.real**2 + V.imag**2).reshape(F, -1)
        best = np.maximum(best, (indicator @ mag).max(axis=1))
    return np.sqrt(best)
