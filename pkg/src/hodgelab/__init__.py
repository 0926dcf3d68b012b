"""Spectral and exact tools for deformations of complex structures.

Subpackages
-----------
torus
    Band-limited forms on the flat complex torus with mode-diagonal Hodge
    operators, products and the dbar inverse.
calculus
    Exact Gaussian-rational polynomial forms, operator words, identity
    verification and Chern curvature.
kuranishi
    Beltrami power series, holomorphic top-form families and the
    calibrated norm estimates.
majorant
    The exact quadratic majorant recursion.
"""

__version__ = "0.1.0"
