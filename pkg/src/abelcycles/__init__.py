"""Limit cycles of a perturbed quartic Hamiltonian system via detection functions."""
from __future__ import annotations

from .cycles import Band, CycleFinding, DistributionReport, distribution, find_roots, lambda_bands, stability
from .detection import (
    DetectionCurve,
    DetectionSample,
    abelian_integral,
    boundary_value,
    default_grid,
    detection_curve,
    divergence,
    divergence_direct,
    lambda_j,
)
from .estimator import LimitCycleDetector
from .exceptions import DegenerateError, DomainError, IntegrationError, QuadratureError
from .hamiltonian import (
    OrbitFamily,
    SystemParams,
    classify_level,
    hamiltonian,
    r_squared_branches,
    singular_points,
    theta_bounds,
)
from .oracle import integrate_orbit, poincare_return, vector_field, verify_prediction

__all__ = [
    "Band",
    "CycleFinding",
    "DegenerateError",
    "DetectionCurve",
    "DetectionSample",
    "DistributionReport",
    "DomainError",
    "IntegrationError",
    "LimitCycleDetector",
    "OrbitFamily",
    "QuadratureError",
    "SystemParams",
    "abelian_integral",
    "boundary_value",
    "classify_level",
    "default_grid",
    "detection_curve",
    "distribution",
    "divergence",
    "divergence_direct",
    "find_roots",
    "hamiltonian",
    "integrate_orbit",
    "lambda_bands",
    "lambda_j",
    "poincare_return",
    "r_squared_branches",
    "singular_points",
    "stability",
    "theta_bounds",
    "vector_field",
    "verify_prediction",
]
