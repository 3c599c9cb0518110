"""Jacobian, eigenvalue, Jury-condition, and step-size-threshold analysis.

The map's Jacobian has structural zeros at (1,3) and (3,1): prey growth does
not depend on predators directly, nor predator growth on susceptible prey.
Its characteristic polynomial is therefore a general cubic, solved here in
closed form so the eigenvalue route stays independent of iterative
linear-algebra routines (which the tests use as a cross-check oracle).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    Discretization,
    FixedPoint,
    FixedPointKind,
    ModelParams,
    State,
    basic_reproduction_number,
    fixed_point,
    gamma_fn,
    theta_threshold,
)

__all__ = [
    "NonExistentFixedPointError",
    "jacobian",
    "cubic_roots",
    "eigenvalues_3x3",
    "Classification",
    "JuryCondition",
    "StabilityReport",
    "planar_quadratic_coeffs",
    "classify",
    "interior_char_coeffs",
    "ThresholdSet",
    "thresholds",
    "find_s9",
]

# moduli this close to 1 are treated as sitting on the unit circle
_UNIT_CIRCLE_TOL = 1e-10


class NonExistentFixedPointError(ValueError):
    """Raised when an operation needs a fixed point that does not exist."""


def jacobian(p: ModelParams, dsc: Discretization, st: State) -> np.ndarray:
    """3x3 Jacobian of one map iteration at an arbitrary state."""
    x, y, z = st
    ay = p.a + y
    if ay == 0.0:
        raise ValueError("Jacobian is singular at y = -a")
    rho = dsc.rho
    return np.array([
        [1.0 + rho * (p.r * (1.0 - (2.0 * x + y) / p.K) - p.lam * y),
         -rho * x * (p.r / p.K + p.lam),
         0.0],
        [rho * p.lam * y,
         1.0 + rho * (p.lam * x - p.m * z / ay - p.mu) + rho * p.m * y * z / ay ** 2,
         -rho * p.m * y / ay],
        [0.0,
         rho * p.a * p.theta * z / ay ** 2,
         1.0 + rho * (p.theta * y / ay - p.d)],
    ])


def _cbrt(v: float) -> float:
    return math.copysign(abs(v) ** (1.0 / 3.0), v)


def _polish(x: float, a: float, b: float, c: float) -> float:
    # two Newton steps tighten the closed-form root to full precision
    for _ in range(2):
        f = ((x + a) * x + b) * x + c
        df = (3.0 * x + 2.0 * a) * x + b
        if df == 0.0:
            break
        x -= f / df
    return x


def _quadratic_roots(b: float, c: float) -> list[complex]:
    # roots of x^2 + b*x + c, cancellation-safe
    disc = b * b - 4.0 * c
    if disc >= 0.0:
        sq = math.sqrt(disc)
        r1 = (-b - sq) / 2.0 if b >= 0.0 else (-b + sq) / 2.0
        r2 = c / r1 if r1 != 0.0 else -b - r1
        return [complex(r1, 0.0), complex(r2, 0.0)]
    sq = math.sqrt(-disc)
    return [complex(-b / 2.0, -sq / 2.0), complex(-b / 2.0, sq / 2.0)]


def cubic_roots(a: float, b: float, c: float) -> tuple[complex, complex, complex]:
    """Roots of x^3 + a*x^2 + b*x + c in closed form, Newton-polished.

    Returned sorted by descending modulus; ties broken by ascending real part,
    then ascending imaginary part.
    """
    shift = a / 3.0
    dp = b - a * a / 3.0
    dq = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c

    roots: list[complex]
    if dp == 0.0 and dq == 0.0:
        roots = [complex(-shift)] * 3
    else:
        disc = (dq / 2.0) ** 2 + (dp / 3.0) ** 3
        if disc > 0.0:
            # one real root plus a complex-conjugate pair
            sq = math.sqrt(disc)
            real_root = _polish(_cbrt(-dq / 2.0 + sq) + _cbrt(-dq / 2.0 - sq) - shift, a, b, c)
            b2 = a + real_root
            roots = [complex(real_root), *_quadratic_roots(b2, b + b2 * real_root)]
        else:
            # three real roots via the trigonometric form
            mfac = 2.0 * math.sqrt(-dp / 3.0)
            arg = max(-1.0, min(1.0, 3.0 * dq / (dp * mfac)))
            phi = math.acos(arg) / 3.0
            roots = [complex(_polish(mfac * math.cos(phi - 2.0 * math.pi * k / 3.0) - shift, a, b, c))
                     for k in range(3)]
    roots.sort(key=lambda w: (-abs(w), w.real, w.imag))
    return roots[0], roots[1], roots[2]


def eigenvalues_3x3(J: np.ndarray) -> tuple[complex, complex, complex]:
    """Eigenvalues of a 3x3 matrix via its characteristic cubic.

    Sorted by descending modulus (ties: ascending real, then imaginary part).
    """
    J = np.asarray(J, dtype=float)
    tr = J[0, 0] + J[1, 1] + J[2, 2]
    minors = (J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
              + J[0, 0] * J[2, 2] - J[0, 2] * J[2, 0]
              + J[1, 1] * J[2, 2] - J[1, 2] * J[2, 1])
    det = (J[0, 0] * (J[1, 1] * J[2, 2] - J[1, 2] * J[2, 1])
           - J[0, 1] * (J[1, 0] * J[2, 2] - J[1, 2] * J[2, 0])
           + J[0, 2] * (J[1, 0] * J[2, 1] - J[1, 1] * J[2, 0]))
    return cubic_roots(-float(tr), float(minors), -float(det))


class Classification(enum.Enum):
    SINK = "sink"
    SOURCE = "source"
    SADDLE = "saddle"
    NON_HYPERBOLIC = "non-hyperbolic"


@dataclass(frozen=True)
class JuryCondition:
    """One named stability inequality; it holds iff margin > 0."""

    name: str
    margin: float

    @property
    def satisfied(self) -> bool:
        return self.margin > 0.0


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: tuple[complex, complex, complex]
    moduli: tuple[float, float, float]
    classification: Classification
    jury_conditions: tuple[JuryCondition, ...]


def _classify_moduli(moduli: tuple[float, float, float]) -> Classification:
    if any(abs(m - 1.0) < _UNIT_CIRCLE_TOL for m in moduli):
        return Classification.NON_HYPERBOLIC
    if all(m < 1.0 for m in moduli):
        return Classification.SINK
    if all(m > 1.0 for m in moduli):
        return Classification.SOURCE
    return Classification.SADDLE


def planar_quadratic_coeffs(p: ModelParams, dsc: Discretization) -> tuple[float, float]:
    """(A, B) of the quadratic factor xi^2 + A*xi + B carrying the in-plane
    eigenvalues at the predator-free point."""
    rho = dsc.rho
    lk = p.lam * p.K
    return rho * p.r * p.mu / lk - 1.0, rho * rho * p.r * p.mu * (lk - p.mu) / lk


def interior_fixed_point(p: ModelParams) -> FixedPoint:
    """The coexistence fixed point; raises if it does not exist."""
    fp = fixed_point(p, FixedPointKind.COEXISTENCE)
    if not fp.exists:
        raise NonExistentFixedPointError(
            f"coexistence fixed point does not exist: {fp.existence_note}")
    return fp


def interior_char_coeffs(p: ModelParams, dsc: Discretization) -> tuple[float, float, float]:
    """Coefficients (A1, A2, A3) of the characteristic cubic
    p(xi) = xi^3 + A1*xi^2 + A2*xi + A3 at the coexistence point."""
    fp = interior_fixed_point(p)
    xs, ys, zs = fp.coords
    rho = dsc.rho
    ay = p.a + ys
    u = rho * p.r * xs / p.K
    v = rho * p.m * ys * zs / ay ** 2
    w = rho ** 2 * p.a * p.m * p.d * zs / ay ** 2
    g = rho ** 2 * xs * ys * (p.r * p.lam / p.K + p.lam ** 2)
    a1 = u - v - 3.0
    a2 = 3.0 + 2.0 * (v - u) + (w - u * v) + g
    a3 = -((1.0 - u) * (1.0 + v + w) + g)
    # consistency: p(1) must reduce to rho^3 * a*d*r*m*X*Z / (K*(a+Y)^2) > 0
    p1 = 1.0 + a1 + a2 + a3
    p1_closed = rho ** 3 * p.a * p.d * p.r * p.m * xs * zs / (p.K * ay ** 2)
    assert abs(p1 - p1_closed) <= 1e-9 * (1.0 + abs(p1_closed)), \
        "characteristic-cubic coefficients inconsistent at xi = 1"
    return a1, a2, a3


def classify(p: ModelParams, dsc: Discretization, fp: FixedPoint) -> StabilityReport:
    """Eigenvalue classification of an existing fixed point, with the Jury
    inequalities attached for the predator-free and coexistence points."""
    if not fp.exists:
        raise NonExistentFixedPointError(
            f"cannot classify {fp.kind.value}: {fp.existence_note}")
    eig = eigenvalues_3x3(jacobian(p, dsc, fp.coords))
    moduli = (abs(eig[0]), abs(eig[1]), abs(eig[2]))
    jury: tuple[JuryCondition, ...] = ()
    if fp.kind is FixedPointKind.PREDATOR_FREE:
        qa, qb = planar_quadratic_coeffs(p, dsc)
        jury = (JuryCondition("B < 1", 1.0 - qb),
                JuryCondition("1 + B > |A|", 1.0 + qb - abs(qa)))
    elif fp.kind is FixedPointKind.COEXISTENCE:
        a1, a2, a3 = interior_char_coeffs(p, dsc)
        jury = (JuryCondition("p(1) > 0", 1.0 + a1 + a2 + a3),
                JuryCondition("-p(-1) > 0", 1.0 - a1 + a2 - a3),
                JuryCondition("1 - A3^2 > |A2 - A3*A1|",
                              (1.0 - a3 * a3) - abs(a2 - a3 * a1)))
    return StabilityReport(eig, moduli, _classify_moduli(moduli), jury)


def find_s9(p: ModelParams, alpha: float, s_max: float) -> float | None:
    """Smallest step size in (0, s_max] where the third Jury inequality of the
    coexistence point fails, located by a 1000-point grid scan plus bisection
    to 1e-6 absolute tolerance.

    Returns None when the inequality holds over the whole scanned range.
    """
    if not s_max > 0.0:
        raise ValueError(f"s_max must be positive, got {s_max}")
    interior_fixed_point(p)

    def margin(s: float) -> float:
        a1, a2, a3 = interior_char_coeffs(p, Discretization(alpha, s))
        return (1.0 - a3 * a3) - abs(a2 - a3 * a1)

    lo, hi, prev = 0.0, None, 0.0
    for i in range(1, 1001):
        s = s_max * i / 1000.0
        if margin(s) <= 0.0:
            lo, hi = prev, s
            break
        prev = s
    if hi is None:
        return None
    if lo == 0.0:
        # the margin tends to 0 from above as s -> 0+; keep the bracket open
        lo = hi * 1e-12
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if margin(mid) <= 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ThresholdSet:
    """Step-size stability bounds for one fractional order.

    A bound is None when its applicability condition fails. s9 = None with a
    non-None s9_search_max means the third Jury inequality held everywhere
    below that bound; s9_search_max is None when the coexistence point is
    absent and the search was not performed.
    """

    alpha: float
    r0: float
    theta1: float | None
    d1: float | None
    s2: float | None
    s3: float | None
    s4: float | None
    s5: float | None
    s6: float | None
    s7: float | None
    s8: float | None
    s9: float | None
    s9_search_max: float | None
    verdicts: tuple[str, ...]


def _fmt(v: float | None) -> str:
    return "undefined" if v is None else f"{v:.6g}"


def _verdicts(p: ModelParams, alpha: float, ts: dict) -> tuple[str, ...]:
    lines = ["E0: always unstable (one eigenvalue is 1 + rho*r > 1)"]

    if ts["s4"] is not None:
        bound = min(ts["s2"], ts["s3"], ts["s4"])
        lines.append(f"E1: stable iff s < min(s2, s3, s4) = {bound:.6g}")
    else:
        lines.append("E1: unstable for every s (infection can invade: lambda*K >= mu)")

    if ts["r0"] <= 1.0:
        lines.append("E2: does not exist (reproduction number <= 1)")
    else:
        uppers = [v for v in (ts["s6"], ts["s7"]) if v is not None]
        upper = min(uppers) if uppers else None
        if upper is None:
            lines.append("E2: no finite upper step-size bound applies (s6 and s7 undefined)")
        else:
            line = f"E2: stable iff s5 < s < min(s6, s7), i.e. {ts['s5']:.6g} < s < {upper:.6g}"
            # the stated lower bound can be conservative: probe the eigenvalues
            # below s5 and flag a disagreement rather than silently adopt either
            probe = 0.5 * ts["s5"]
            e2 = fixed_point(p, FixedPointKind.PREDATOR_FREE)
            report = classify(p, Discretization(alpha, probe), e2)
            if report.classification is Classification.SINK:
                line += (f" [note: the eigenvalue test already indicates a sink at"
                         f" s = {probe:.6g} < s5; the lower bound appears conservative]")
            lines.append(line)

    if ts["s8"] is None:
        lines.append("E*: does not exist (no step-size window)")
    elif ts["s9"] is None:
        lines.append(f"E*: stable iff 0 < s < s8 = {ts['s8']:.6g}"
                     f" (third Jury inequality holds up to {ts['s9_search_max']:.6g})")
    else:
        bound = min(ts["s8"], ts["s9"])
        lines.append(f"E*: stable iff 0 < s < min(s8, s9) = {bound:.6g}")
    return tuple(lines)


def thresholds(p: ModelParams, alpha: float, *, s9_max: float | None = None) -> ThresholdSet:
    """All step-size stability bounds of the four fixed points at one alpha.

    s9 is searched over (0, s9_max]; the default search ceiling is
    2*min(s8, 1), which comfortably contains the loss-of-stability point in
    every regime where the coexistence point exists.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    ag = alpha * gamma_fn(alpha)
    inv = 1.0 / alpha
    r0 = basic_reproduction_number(p)
    theta1 = theta_threshold(p)
    lk = p.lam * p.K

    s2 = (2.0 * ag / p.d) ** inv
    s3 = (2.0 * ag / p.r) ** inv
    s4 = (2.0 * ag / (p.mu - lk)) ** inv if p.mu > lk else None
    s5 = (ag / (lk - p.mu)) ** inv if lk > p.mu else None
    s7 = (lk * ag * ag / (p.mu * p.r * (lk - p.mu))) ** (0.5 * inv) if lk > p.mu else None

    d1 = None
    if lk > p.mu:
        d1 = p.theta * p.r * (lk - p.mu) / (p.a * p.lam * (lk + p.r) + p.r * (lk - p.mu))
    s6 = (2.0 * ag / (p.d - d1)) ** inv if d1 is not None and p.d > d1 else None

    interior = fixed_point(p, FixedPointKind.COEXISTENCE)
    s8 = None
    s9 = None
    search_max = None
    if interior.exists:
        s8 = (2.0 * p.K * ag / (p.r * interior.coords.x)) ** inv
        search_max = s9_max if s9_max is not None else 2.0 * min(s8, 1.0)
        s9 = find_s9(p, alpha, search_max)

    ts = dict(r0=r0, s2=s2, s3=s3, s4=s4, s5=s5, s6=s6, s7=s7, s8=s8, s9=s9,
              s9_search_max=search_max)
    return ThresholdSet(alpha, r0, theta1, d1, s2, s3, s4, s5, s6, s7, s8, s9,
                        search_max, _verdicts(p, alpha, ts))
