"""Discrete fractional-order predator-prey-parasite map.

A three-species map (susceptible prey X, infected prey Y, predator Z) whose
step size enters through a fractional-order factor rho = s^alpha /
(alpha * Gamma(alpha)). The package computes fixed points, eigenvalue and
Jury-condition stability, step-size stability thresholds, trajectories,
bifurcation sweeps, and largest Lyapunov exponents, plus a JSON-configured
command line around all of it.
"""

from .analysis import (
    BifurcationResult,
    DivergedOrbitError,
    LyapunovResult,
    bifurcation_sweep,
    bifurcation_sweep_alpha,
    largest_lyapunov,
    lyapunov_sweep,
)
from .model import (
    Discretization,
    FixedPoint,
    FixedPointKind,
    ModelParams,
    State,
    basic_reproduction_number,
    fixed_point,
    fixed_points,
    gamma_fn,
    step,
    theta_threshold,
)
from .simulate import Outcome, OutcomeKind, SimConfig, Trajectory, simulate, terminal_attractor_samples
from .stability import (
    Classification,
    JuryCondition,
    NonExistentFixedPointError,
    StabilityReport,
    ThresholdSet,
    classify,
    cubic_roots,
    eigenvalues_3x3,
    find_s9,
    interior_char_coeffs,
    jacobian,
    planar_quadratic_coeffs,
    thresholds,
)

__version__ = "0.1.0"

__all__ = [
    "BifurcationResult",
    "Classification",
    "Discretization",
    "DivergedOrbitError",
    "FixedPoint",
    "FixedPointKind",
    "JuryCondition",
    "LyapunovResult",
    "ModelParams",
    "NonExistentFixedPointError",
    "Outcome",
    "OutcomeKind",
    "SimConfig",
    "StabilityReport",
    "State",
    "ThresholdSet",
    "Trajectory",
    "basic_reproduction_number",
    "bifurcation_sweep",
    "bifurcation_sweep_alpha",
    "classify",
    "cubic_roots",
    "eigenvalues_3x3",
    "find_s9",
    "fixed_point",
    "fixed_points",
    "gamma_fn",
    "interior_char_coeffs",
    "jacobian",
    "largest_lyapunov",
    "lyapunov_sweep",
    "planar_quadratic_coeffs",
    "simulate",
    "step",
    "terminal_attractor_samples",
    "theta_threshold",
    "thresholds",
]
