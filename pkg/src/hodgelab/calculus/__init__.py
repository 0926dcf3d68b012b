"""Exact calculus of polynomial-coefficient forms over Gaussian rationals."""

from .curvature import CurvatureResult, DomainError, curvature_nakano, curvature_tensor
from .forms import Connection, ContractViolation, GradedForm, PolyForm
from .identities import TAGS, IdentityVerdict, verify_all, verify_identity
from .operators import apply_operator
from .poly import Poly

__all__ = [
    "Connection", "ContractViolation", "CurvatureResult", "DomainError", "GradedForm",
    "IdentityVerdict", "Poly", "PolyForm", "TAGS", "apply_operator", "curvature_nakano",
    "curvature_tensor", "verify_all", "verify_identity",
]
