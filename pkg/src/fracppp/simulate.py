"""Trajectory simulation with convergence, oscillation, and divergence detection.

Settling is judged on a sliding window of recent states: once the per-component
spread over the last 100 steps falls below the convergence tolerance (relative
to the current magnitude), the orbit is compared against the known fixed
points. Orbits that never settle are reported as oscillatory; orbits whose
components exceed the divergence bound or go non-finite are cut off at the
offending step.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .model import Discretization, FixedPoint, ModelParams, State, fixed_points

__all__ = [
    "SimConfig",
    "OutcomeKind",
    "Outcome",
    "Trajectory",
    "simulate",
    "terminal_attractor_samples",
]

# sliding-window length, in steps, for the settling test
_WINDOW = 100
# relative tolerance for matching a settled orbit to a fixed point
_FIXED_POINT_MATCH_TOL = 1e-6


@dataclass(frozen=True)
class SimConfig:
    """Knobs shared by every trajectory run.

    record_every thins the stored trajectory; the dynamics always advance one
    step at a time. transient only affects terminal_attractor_samples, not the
    stored states.
    """

    n_steps: int = 20000
    transient: int = 10000
    record_every: int = 1
    convergence_tol: float = 2e-6
    divergence_bound: float = 1e12

    def __post_init__(self) -> None:
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if not 0 <= self.transient < self.n_steps:
            raise ValueError(
                f"transient must lie in [0, n_steps), got {self.transient}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")
        if not self.convergence_tol > 0.0:
            raise ValueError(
                f"convergence_tol must be positive, got {self.convergence_tol}")
        if not self.divergence_bound > 0.0:
            raise ValueError(
                f"divergence_bound must be positive, got {self.divergence_bound}")


class OutcomeKind(enum.Enum):
    CONVERGED = "converged"
    OSCILLATORY = "oscillatory"
    DIVERGED = "diverged"
    MAX_STEPS = "max-steps-reached"


@dataclass(frozen=True)
class Outcome:
    """What the orbit did. fixed_point is set only for CONVERGED; diverged_at
    is the step index at which the divergence test first fired."""

    kind: OutcomeKind
    fixed_point: FixedPoint | None = None
    diverged_at: int | None = None

    def describe(self) -> str:
        if self.kind is OutcomeKind.CONVERGED:
            return f"converged to {self.fixed_point.kind.value}"
        if self.kind is OutcomeKind.DIVERGED:
            return f"diverged at step {self.diverged_at}"
        return self.kind.value


@dataclass(frozen=True)
class Trajectory:
    """Recorded orbit: ordered (step index, state) pairs starting at (0, init),
    thinned by record_every and truncated early on convergence or divergence."""

    states: tuple[tuple[int, State], ...]
    outcome: Outcome

    def write_csv(self, path) -> None:
        """Columns step, X, Y, Z with a header row, then one metadata line
        naming the outcome."""
        with open(path, "w", newline="") as fh:
            fh.write("step,X,Y,Z\n")
            for k, st in self.states:
                fh.write(f"{k},{st.x!r},{st.y!r},{st.z!r}\n")
            fh.write(f"# outcome: {self.outcome.describe()}\n")


def _check_init(init: State) -> None:
    for name, v in zip("XYZ", init):
        if not math.isfinite(v) or v < 0.0:
            raise ValueError(f"initial {name} must be finite and >= 0, got {v}")


def _match_fixed_point(p: ModelParams, st: State) -> FixedPoint | None:
    best = None
    best_dist = _FIXED_POINT_MATCH_TOL
    for fp in fixed_points(p):
        if not fp.exists:
            continue
        scale = 1.0 + max(abs(c) for c in fp.coords)
        dist = max(abs(u - v) for u, v in zip(st, fp.coords)) / scale
        if dist < best_dist:
            best, best_dist = fp, dist
    return best


def simulate(p: ModelParams, dsc: Discretization, init: State,
             cfg: SimConfig = SimConfig()) -> Trajectory:
    """Iterate the map from init for up to cfg.n_steps steps."""
    _check_init(init)
    init = State(*(float(c) for c in init))
    rho, bound = dsc.rho, cfg.divergence_bound
    r, K, lam, m, mu, a, theta, d = (p.r, p.K, p.lam, p.m, p.mu, p.a, p.theta, p.d)

    states = [(0, init)]
    x, y, z = init
    lo = [x, y, z]
    hi = [x, y, z]
    settled_at = -1

    for k in range(1, cfg.n_steps + 1):
        ay = a + y
        nx = x + rho * x * (r * (1.0 - (x + y) / K) - lam * y)
        ny = y + rho * y * (lam * x - m * z / ay - mu)
        nz = z + rho * z * (theta * y / ay - d)
        if (not (math.isfinite(nx) and math.isfinite(ny) and math.isfinite(nz))
                or abs(nx) > bound or abs(ny) > bound or abs(nz) > bound):
            return Trajectory(tuple(states), Outcome(OutcomeKind.DIVERGED, diverged_at=k))
        x, y, z = nx, ny, nz
        if k % cfg.record_every == 0:
            states.append((k, State(x, y, z)))
        for i, c in enumerate((x, y, z)):
            if c < lo[i]:
                lo[i] = c
            if c > hi[i]:
                hi[i] = c
        if k % _WINDOW == 0:
            settled = all(hi[i] - lo[i] < cfg.convergence_tol * (1.0 + abs(c))
                          for i, c in enumerate((x, y, z)))
            lo = [x, y, z]
            hi = [x, y, z]
            if settled:
                settled_at = k
                break

    if settled_at < 0:
        return Trajectory(tuple(states), Outcome(OutcomeKind.OSCILLATORY))
    fp = _match_fixed_point(p, State(x, y, z))
    if fp is None:
        return Trajectory(tuple(states), Outcome(OutcomeKind.MAX_STEPS))
    return Trajectory(tuple(states), Outcome(OutcomeKind.CONVERGED, fixed_point=fp))


def terminal_attractor_samples(p: ModelParams, dsc: Discretization, init: State,
                               cfg: SimConfig = SimConfig()) -> list[State]:
    """States visited after the transient, thinned by record_every; the list
    is empty when the orbit diverges before the sampling phase completes.

    Runs the full cfg.n_steps without early convergence exit, so the samples
    always cover the same step range for fixed cfg.
    """
    _check_init(init)
    rho, bound = dsc.rho, cfg.divergence_bound
    r, K, lam, m, mu, a, theta, d = (p.r, p.K, p.lam, p.m, p.mu, p.a, p.theta, p.d)

    samples: list[State] = []
    x, y, z = (float(c) for c in init)
    for k in range(1, cfg.n_steps + 1):
        ay = a + y
        nx = x + rho * x * (r * (1.0 - (x + y) / K) - lam * y)
        ny = y + rho * y * (lam * x - m * z / ay - mu)
        nz = z + rho * z * (theta * y / ay - d)
        if (not (math.isfinite(nx) and math.isfinite(ny) and math.isfinite(nz))
                or abs(nx) > bound or abs(ny) > bound or abs(nz) > bound):
            return []
        x, y, z = nx, ny, nz
        if k > cfg.transient and (k - cfg.transient) % cfg.record_every == 0:
            samples.append(State(x, y, z))
    return samples
