"""Discrete predator-prey-parasite map with a fractional-order step coefficient.

One iteration advances susceptible prey X, infected prey Y, and predators Z:

    X' = X + rho*X*(r*(1 - (X+Y)/K) - lambda*Y)
    Y' = Y + rho*Y*(lambda*X - m*Z/(a+Y) - mu)
    Z' = Z + rho*Z*(theta*Y/(a+Y) - d)

where rho = s**alpha / (alpha*Gamma(alpha)) couples the step size s to the
fractional order alpha. At alpha = 1 the coefficient reduces to rho = s and
the map is the explicit Euler scheme for the underlying vector field.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

__all__ = [
    "gamma_fn",
    "State",
    "ModelParams",
    "Discretization",
    "FixedPointKind",
    "FixedPoint",
    "step",
    "basic_reproduction_number",
    "theta_threshold",
    "fixed_points",
    "fixed_point",
]


def gamma_fn(x: float) -> float:
    """Gamma function on (0, 2], the domain needed by the step coefficient."""
    if not 0.0 < x <= 2.0:
        raise ValueError(f"gamma_fn requires 0 < x <= 2, got {x}")
    return math.gamma(x)


class State(NamedTuple):
    """Population triple: susceptible prey, infected prey, predator."""

    x: float
    y: float
    z: float


@dataclass(frozen=True)
class ModelParams:
    """The eight ecological rate constants. All must be strictly positive.

    theta values above 1 are accepted: the interesting parameter regimes
    include predator gains well beyond unity.
    """

    r: float      # intrinsic prey growth rate
    K: float      # prey carrying capacity
    lam: float    # force of infection
    m: float      # maximum predator attack rate
    mu: float     # infected-prey death rate
    a: float      # half-saturation constant of the predator response
    theta: float  # predator reproductive gain
    d: float      # predator death rate

    def __post_init__(self) -> None:
        for name in ("r", "K", "lam", "m", "mu", "a", "theta", "d"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0.0 and math.isfinite(value)):
                raise ValueError(f"ModelParams.{name} must be a strictly positive finite number, got {value!r}")


@dataclass(frozen=True)
class Discretization:
    """Fractional order alpha in (0, 1] and step size s > 0.

    The derived coefficient rho = s**alpha / (alpha*Gamma(alpha)) is computed
    once on construction. For alpha = 1 it equals s exactly.
    """

    alpha: float
    s: float
    rho: float = field(init=False)

    def __post_init__(self) -> None:
        if not (isinstance(self.alpha, (int, float)) and 0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if not (isinstance(self.s, (int, float)) and self.s > 0.0 and math.isfinite(self.s)):
            raise ValueError(f"s must be strictly positive and finite, got {self.s!r}")
        object.__setattr__(self, "rho", self.s ** self.alpha / (self.alpha * gamma_fn(self.alpha)))


def step(p: ModelParams, dsc: Discretization, st: State) -> State:
    """Advance the map by one iteration.

    The output is the raw arithmetic result; non-finite or runaway values are
    the simulation layer's concern (divergence detection lives there).
    """
    x, y, z = st
    rho = dsc.rho
    fx = p.r * (1.0 - (x + y) / p.K) - p.lam * y
    fy = p.lam * x - p.m * z / (p.a + y) - p.mu
    fz = p.theta * y / (p.a + y) - p.d
    return State(x + rho * x * fx, y + rho * y * fy, z + rho * z * fz)


def basic_reproduction_number(p: ModelParams) -> float:
    """Infection invasion number lambda*K/mu.

    The predator-free and coexistence fixed points require it to exceed 1.
    """
    return p.lam * p.K / p.mu


def theta_threshold(p: ModelParams) -> float | None:
    """Minimum predator gain theta1 for the coexistence point to exist.

    theta1 = d + lambda*a*d*(r + lambda*K) / (r*(lambda*K - mu)). Defined only
    when lambda*K > mu (equivalently, the reproduction number exceeds 1);
    returns None otherwise.
    """
    excess = p.lam * p.K - p.mu
    if excess <= 0.0:
        return None
    return p.d + p.lam * p.a * p.d * (p.r + p.lam * p.K) / (p.r * excess)


class FixedPointKind(enum.Enum):
    """The four equilibrium candidates of the map."""

    EXTINCTION = "E0"      # (0, 0, 0)
    PREY_ONLY = "E1"       # (K, 0, 0), no infection, no predator
    PREDATOR_FREE = "E2"   # susceptible and infected prey coexist, no predator
    COEXISTENCE = "E*"     # all three populations positive


@dataclass(frozen=True)
class FixedPoint:
    """One equilibrium candidate with its existence verdict.

    coords is None only when the defining formulas cannot be evaluated
    (coexistence point with theta <= d).
    """

    kind: FixedPointKind
    coords: State | None
    exists: bool
    existence_note: str = ""


def fixed_points(p: ModelParams) -> list[FixedPoint]:
    """All four equilibrium candidates, in the order E0, E1, E2, E*.

    The predator-free point requires the reproduction number lambda*K/mu to
    exceed 1. The coexistence point additionally requires theta above both the
    predator death rate d and the gain threshold theta1; together these make
    every coordinate strictly positive.
    """
    r0 = basic_reproduction_number(p)
    theta1 = theta_threshold(p)
    pts = [
        FixedPoint(FixedPointKind.EXTINCTION, State(0.0, 0.0, 0.0), True),
        FixedPoint(FixedPointKind.PREY_ONLY, State(p.K, 0.0, 0.0), True),
    ]

    y2 = p.r * (p.lam * p.K - p.mu) / (p.lam * (p.r + p.lam * p.K))
    e2 = State(p.mu / p.lam, y2, 0.0)
    if r0 > 1.0:
        pts.append(FixedPoint(FixedPointKind.PREDATOR_FREE, e2, True))
    else:
        pts.append(FixedPoint(FixedPointKind.PREDATOR_FREE, e2, False,
                              "requires reproduction number lambda*K/mu > 1"))

    if p.theta <= p.d:
        pts.append(FixedPoint(FixedPointKind.COEXISTENCE, None, False,
                              "requires predator gain theta > death rate d"))
    else:
        ys = p.a * p.d / (p.theta - p.d)
        xs = p.K - (1.0 + p.lam * p.K / p.r) * ys
        zs = (p.a + ys) * (p.lam * xs - p.mu) / p.m
        estar = State(xs, ys, zs)
        if r0 <= 1.0:
            pts.append(FixedPoint(FixedPointKind.COEXISTENCE, estar, False,
                                  "requires reproduction number lambda*K/mu > 1"))
        elif theta1 is not None and p.theta <= theta1:
            pts.append(FixedPoint(FixedPointKind.COEXISTENCE, estar, False,
                                  f"requires theta > theta1 = {theta1:.6g}"))
        else:
            pts.append(FixedPoint(FixedPointKind.COEXISTENCE, estar, True))
    return pts


def fixed_point(p: ModelParams, kind: FixedPointKind) -> FixedPoint:
    """The single fixed-point candidate of the given kind."""
    for fp in fixed_points(p):
        if fp.kind is kind:
            return fp
    raise KeyError(kind)  # unreachable: fixed_points always returns all four
