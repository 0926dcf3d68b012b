"""Beltrami power series on the flat torus and the families they induce."""

from .calibration import CalibrationRecord, calibrate_constants, validate_constants
from .domination import domination_report, radius_scan
from .families import CanonicalFamily, canonical_family, cohomology_expansion, growth_estimate, kahler_family
from .seeds import DeformationSeed, DegenerateDraw, SeedRejected, make_seed
from .series import (
    BeltramiSeries,
    bracket_sum_closedness,
    integrability_residual,
    iterate_beltrami,
    side_conditions_check,
    two_path_check,
)

__all__ = [
    "BeltramiSeries", "CalibrationRecord", "CanonicalFamily", "DeformationSeed", "DegenerateDraw",
    "SeedRejected", "bracket_sum_closedness", "calibrate_constants", "canonical_family",
    "cohomology_expansion", "domination_report", "growth_estimate", "integrability_residual",
    "iterate_beltrami", "kahler_family", "make_seed", "radius_scan", "side_conditions_check",
    "two_path_check", "validate_constants",
]
