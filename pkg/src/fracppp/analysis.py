"""Bifurcation sweeps and largest-Lyapunov-exponent estimation.

A bifurcation sweep collects post-transient prey samples in each parameter
cell; the first cell whose samples spread wider than a small relative
tolerance marks the loss of stability. The Lyapunov estimator advances one
tangent vector with the analytic Jacobian (Benettin's method) and averages
the per-iteration log stretch.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .model import Discretization, ModelParams, State
from .simulate import SimConfig, terminal_attractor_samples

__all__ = [
    "DivergedOrbitError",
    "BifurcationResult",
    "bifurcation_sweep",
    "bifurcation_sweep_alpha",
    "largest_lyapunov",
    "LyapunovResult",
    "lyapunov_sweep",
]

# relative prey-sample spread above which a cell counts as non-steady
_SPREAD_TOL = 1e-3


class DivergedOrbitError(RuntimeError):
    """Raised when an orbit leaves the divergence bound mid-computation."""

    def __init__(self, message: str, step_index: int):
        super().__init__(message)
        self.step_index = step_index


def _grid(lo: float, hi: float, n: int) -> list[float]:
    if n < 2:
        raise ValueError(f"a sweep needs at least 2 points, got {n}")
    if not lo < hi:
        raise ValueError(f"sweep range must satisfy lo < hi, got [{lo}, {hi}]")
    step = (hi - lo) / (n - 1)
    vals = [lo + i * step for i in range(n)]
    vals[-1] = hi
    return vals


def _map_cells(worker, argses: list, jobs: int) -> list:
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, argses))
    return [worker(a) for a in argses]


@dataclass(frozen=True)
class BifurcationResult:
    """Per-cell prey samples of one sweep. points[k] = (parameter value,
    X samples); the sample tuple is empty for cells whose orbit diverged."""

    parameter_name: str
    points: tuple[tuple[float, tuple[float, ...]], ...]

    def detect_first_instability(self, spread_tol: float = _SPREAD_TOL) -> float | None:
        """Smallest swept value whose samples spread beyond spread_tol,
        relative to the cell mean; None when every cell stays tight."""
        for val, xs in self.points:
            if len(xs) < 2:
                continue
            mean = sum(xs) / len(xs)
            if max(xs) - min(xs) > spread_tol * (1.0 + abs(mean)):
                return val
        return None

    def write_csv(self, path) -> None:
        """Long format: one (parameter, sample) row per recorded sample."""
        with open(path, "w", newline="") as fh:
            fh.write(f"{self.parameter_name},sample\n")
            for val, xs in self.points:
                for v in xs:
                    fh.write(f"{val!r},{v!r}\n")

    def write_plot_data(self, path) -> None:
        """Two whitespace-separated columns with '#' comment headers, ready
        for gnuplot-style scatter tools."""
        with open(path, "w") as fh:
            fh.write("# bifurcation scatter, prey component\n")
            fh.write(f"# columns: {self.parameter_name} X\n")
            for val, xs in self.points:
                for v in xs:
                    fh.write(f"{val!r} {v!r}\n")


def _bif_worker(args) -> tuple[float, ...]:
    p, alpha, s, init, cfg = args
    samples = terminal_attractor_samples(p, Discretization(alpha, s), init, cfg)
    return tuple(st.x for st in samples)


def _run_sweep(p: ModelParams, cells: list[tuple[float, float]], axis: str,
               init: State, cfg: SimConfig, jobs: int, continuation: bool,
               values: list[float]) -> BifurcationResult:
    if continuation:
        # each cell restarts from the previous cell's final state, so the
        # sweep must run sequentially; a diverged or negative carry-over
        # resets to the caller's init
        pts = []
        cur = init
        for (alpha, s), val in zip(cells, values):
            samples = terminal_attractor_samples(p, Discretization(alpha, s), cur, cfg)
            pts.append((val, tuple(st.x for st in samples)))
            cur = samples[-1] if samples and min(samples[-1]) >= 0.0 else init
        return BifurcationResult(axis, tuple(pts))
    argses = [(p, alpha, s, init, cfg) for alpha, s in cells]
    xs_lists = _map_cells(_bif_worker, argses, jobs)
    return BifurcationResult(axis, tuple(zip(values, xs_lists)))


def bifurcation_sweep(p: ModelParams, alpha: float, s_range: tuple[float, float],
                      n_points: int, init: State, cfg: SimConfig = SimConfig(),
                      *, jobs: int = 1, continuation: bool = False) -> BifurcationResult:
    """Sweep the step size at fixed alpha over n_points evenly spaced cells."""
    svals = _grid(s_range[0], s_range[1], n_points)
    return _run_sweep(p, [(alpha, s) for s in svals], "s", init, cfg, jobs,
                      continuation, svals)


def bifurcation_sweep_alpha(p: ModelParams, s: float, alpha_range: tuple[float, float],
                            n_points: int, init: State, cfg: SimConfig = SimConfig(),
                            *, jobs: int = 1, continuation: bool = False) -> BifurcationResult:
    """Sweep the fractional order at fixed step size."""
    avals = _grid(alpha_range[0], alpha_range[1], n_points)
    return _run_sweep(p, [(alpha, s) for alpha in avals], "alpha", init, cfg,
                      jobs, continuation, avals)


def largest_lyapunov(p: ModelParams, dsc: Discretization, init: State, n_steps: int,
                     renorm_interval: int = 1, *, transient: int = 0,
                     divergence_bound: float = 1e12) -> float:
    """Largest Lyapunov exponent per map iteration, measured over n_steps
    iterations after discarding transient iterations.

    The tangent vector starts at (1, 0, 0) once the transient ends; keep
    renorm_interval small enough that the tangent cannot overflow between
    renormalizations. Raises DivergedOrbitError when the orbit leaves the
    divergence bound (step_index counts from the start of the run).
    """
    for name, c in zip("XYZ", init):
        if not math.isfinite(c) or c < 0.0:
            raise ValueError(f"initial {name} must be finite and >= 0, got {c}")
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if renorm_interval < 1:
        raise ValueError(f"renorm_interval must be >= 1, got {renorm_interval}")
    if transient < 0:
        raise ValueError(f"transient must be >= 0, got {transient}")

    rho, bound = dsc.rho, divergence_bound
    r, K, lam, m, mu, a, theta, d = (p.r, p.K, p.lam, p.m, p.mu, p.a, p.theta, p.d)
    x, y, z = (float(c) for c in init)

    for k in range(1, transient + 1):
        ay = a + y
        nx = x + rho * x * (r * (1.0 - (x + y) / K) - lam * y)
        ny = y + rho * y * (lam * x - m * z / ay - mu)
        nz = z + rho * z * (theta * y / ay - d)
        if (not (math.isfinite(nx) and math.isfinite(ny) and math.isfinite(nz))
                or abs(nx) > bound or abs(ny) > bound or abs(nz) > bound):
            raise DivergedOrbitError(f"orbit diverged at step {k}", k)
        x, y, z = nx, ny, nz

    vx, vy, vz = 1.0, 0.0, 0.0
    acc = 0.0
    since = 0
    for k in range(1, n_steps + 1):
        ay = a + y
        ay2 = ay * ay
        # tangent advances with the Jacobian at the current state, before the
        # state itself moves on
        j11 = 1.0 + rho * (r * (1.0 - (2.0 * x + y) / K) - lam * y)
        j12 = -rho * x * (r / K + lam)
        j21 = rho * lam * y
        j22 = 1.0 + rho * (lam * x - m * z / ay - mu) + rho * m * y * z / ay2
        j23 = -rho * m * y / ay
        j32 = rho * a * theta * z / ay2
        j33 = 1.0 + rho * (theta * y / ay - d)
        vx, vy, vz = (j11 * vx + j12 * vy,
                      j21 * vx + j22 * vy + j23 * vz,
                      j32 * vy + j33 * vz)
        nx = x + rho * x * (r * (1.0 - (x + y) / K) - lam * y)
        ny = y + rho * y * (lam * x - m * z / ay - mu)
        nz = z + rho * z * (theta * y / ay - d)
        if (not (math.isfinite(nx) and math.isfinite(ny) and math.isfinite(nz))
                or abs(nx) > bound or abs(ny) > bound or abs(nz) > bound):
            raise DivergedOrbitError(f"orbit diverged at step {transient + k}",
                                     transient + k)
        x, y, z = nx, ny, nz
        since += 1
        if since == renorm_interval:
            nrm = math.sqrt(vx * vx + vy * vy + vz * vz)
            if nrm == 0.0:
                raise RuntimeError("tangent vector collapsed to zero")
            acc += math.log(nrm)
            vx, vy, vz = vx / nrm, vy / nrm, vz / nrm
            since = 0
    if since:
        nrm = math.sqrt(vx * vx + vy * vy + vz * vz)
        if nrm == 0.0:
            raise RuntimeError("tangent vector collapsed to zero")
        acc += math.log(nrm)
    return acc / n_steps


@dataclass(frozen=True)
class LyapunovResult:
    """Largest-Lyapunov estimates along a sweep. points[k] = (parameter value,
    estimate); the estimate is None for cells whose orbit diverged."""

    parameter_name: str
    points: tuple[tuple[float, float | None], ...]
    n_steps: int
    renorm_interval: int

    def sign_change_brackets(self) -> tuple[tuple[float, float], ...]:
        """Consecutive parameter pairs whose estimates straddle zero."""
        out = []
        for (v0, l0), (v1, l1) in zip(self.points, self.points[1:]):
            if l0 is None or l1 is None:
                continue
            if (l0 < 0.0) != (l1 < 0.0):
                out.append((v0, v1))
        return tuple(out)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(f"{self.parameter_name},lle\n")
            for val, lle in self.points:
                fh.write(f"{val!r},{'diverged' if lle is None else repr(lle)}\n")

    def write_plot_data(self, path) -> None:
        """Two whitespace-separated columns with '#' comment headers; diverged
        cells are omitted."""
        with open(path, "w") as fh:
            fh.write("# largest Lyapunov exponent per iteration\n")
            fh.write(f"# columns: {self.parameter_name} lle\n")
            for val, lle in self.points:
                if lle is not None:
                    fh.write(f"{val!r} {lle!r}\n")


def _lle_worker(args) -> float | None:
    p, alpha, s, init, n_steps, renorm, transient, bound = args
    try:
        return largest_lyapunov(p, Discretization(alpha, s), init, n_steps, renorm,
                                transient=transient, divergence_bound=bound)
    except DivergedOrbitError:
        return None


def lyapunov_sweep(p: ModelParams, alpha: float, s_range: tuple[float, float],
                   n_points: int, init: State, cfg: SimConfig = SimConfig(),
                   *, renorm_interval: int = 1, jobs: int = 1) -> LyapunovResult:
    """Largest-Lyapunov sweep over the step size at fixed alpha.

    cfg.n_steps counts total iterations per cell, of which the first
    cfg.transient are discarded; cfg.record_every and cfg.convergence_tol are
    not used here.
    """
    svals = _grid(s_range[0], s_range[1], n_points)
    measured = cfg.n_steps - cfg.transient
    argses = [(p, alpha, s, init, measured, renorm_interval, cfg.transient,
               cfg.divergence_bound) for s in svals]
    lles = _map_cells(_lle_worker, argses, jobs)
    return LyapunovResult("s", tuple(zip(svals, lles)), measured, renorm_interval)
