"""Curvature, geodesic-ball volumes and entropy of mechanical systems.

The kinetic-energy metric of a system with potential V and total energy E is
2*(E - V(x)) times the identity. This package evaluates its curvature, the
volume and entropy of small geodesic balls, and the perturbations that leave
the entropy unchanged to first order. Potentials are expression strings in
the variables x1..xn.
"""

from ._core import (
    ConfigError,
    Grid,
    MathDomainError,
    NonConvergenceError,
    System,
    ball_volume,
    critical_points,
    curvature_readings,
    effective_mass,
    entropy_report,
    perturbation_report,
    ricci,
    scalar_curvature,
    solve_invariance,
    special_energy,
    verify_invariance,
)

__all__ = [
    "ConfigError",
    "Grid",
    "MathDomainError",
    "NonConvergenceError",
    "System",
    "ball_volume",
    "critical_points",
    "curvature_readings",
    "effective_mass",
    "entropy_report",
    "perturbation_report",
    "ricci",
    "scalar_curvature",
    "solve_invariance",
    "special_energy",
    "verify_invariance",
]
