"""Hodge theory on the flat torus C^n / (Z^n + i Z^n) in the Fourier basis."""

from .forms import (
    ContractViolation,
    FourierForm,
    TruncationReceipt,
    character,
    constant,
    omega_zero,
    random_form,
)
from .geometry import TorusGeometry
from .operators import (
    Norms,
    adjoint_differential,
    c0_norm,
    c1_norm,
    dbar,
    dbar_star,
    del_,
    del_star,
    differential,
    green,
    green_harmonic,
    harmonic_projection,
    inner,
    l2_norm,
    laplacian,
    norms,
)
from .products import bracket, contract, exp_contract, from_top, lie_derivative, to_top, wedge
from .solve import dbar_inverse, isometric_input, project_kernel, quasi_isometry_report

__all__ = [
    "ContractViolation", "FourierForm", "Norms", "TorusGeometry", "TruncationReceipt",
    "adjoint_differential", "bracket", "c0_norm", "c1_norm", "character", "constant", "contract",
    "dbar", "dbar_inverse", "dbar_star", "del_", "del_star", "differential", "exp_contract",
    "from_top", "green", "green_harmonic", "harmonic_projection", "inner", "isometric_input",
    "l2_norm", "laplacian", "lie_derivative", "norms", "omega_zero", "project_kernel",
    "quasi_isometry_report", "random_form", "to_top", "wedge",
]
