"""Command-line front end: JSON-configured runs of the library routines.

Subcommands: fixed-points, thresholds, simulate, bifurcate, lyapunov. Every
run is driven by a single JSON config file; unknown keys are rejected so a
typo cannot silently fall back to a default. Exit codes: 0 success, 2 bad
config or parameter validation, 3 orbit divergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, replace

from .analysis import (
    DivergedOrbitError,
    bifurcation_sweep,
    bifurcation_sweep_alpha,
    lyapunov_sweep,
)
from .model import Discretization, ModelParams, State, fixed_points, theta_threshold
from .model import basic_reproduction_number
from .simulate import OutcomeKind, SimConfig, simulate
from .stability import classify, thresholds

__all__ = ["ConfigError", "RunConfig", "load_config", "dump_config", "main"]

_MODEL_KEYS = ("r", "K", "lambda", "m", "mu", "a", "theta", "d")
_SIM_KEYS = ("n_steps", "transient", "record_every", "convergence_tol",
             "divergence_bound")
_TOP_KEYS = ("model", "alpha", "s", "init", "sim", "n_points",
             "renorm_interval", "continuation", "axis", "output_dir")


class ConfigError(ValueError):
    """Raised for malformed or incomplete run configs."""


@dataclass(frozen=True)
class RunConfig:
    """One fully parsed run description.

    alpha and s each hold either a scalar or a list from the config; which
    shape a subcommand needs is checked when it runs. init is optional in the
    config because the fixed-point and threshold reports do not use it.
    """

    model: ModelParams
    alpha: float | tuple[float, ...]
    s: float | tuple[float, ...] | None = None
    init: State | None = None
    sim: SimConfig = SimConfig()
    n_points: int = 200
    renorm_interval: int = 1
    continuation: bool = False
    axis: str = "s"
    output_dir: str = "out"


def _num(block: str, key: str, v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"'{block}.{key}' must be a number, got {v!r}")
    return float(v)


def _check_keys(block: dict, allowed: tuple[str, ...], where: str) -> None:
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {', '.join(unknown)}")


def _scalar_or_list(raw, key: str) -> float | tuple[float, ...]:
    if isinstance(raw, list):
        if not raw:
            raise ConfigError(f"'{key}' list must not be empty")
        return tuple(_num("top-level", key, v) for v in raw)
    return _num("top-level", key, raw)


def load_config(path) -> RunConfig:
    """Parse and validate a JSON run config; rejects unknown keys at every
    nesting level."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys(raw, _TOP_KEYS, "config")

    if "model" not in raw or not isinstance(raw["model"], dict):
        raise ConfigError("config needs a 'model' object")
    mblock = raw["model"]
    _check_keys(mblock, _MODEL_KEYS, "'model'")
    missing = sorted(set(_MODEL_KEYS) - set(mblock))
    if missing:
        raise ConfigError(f"'model' is missing keys: {', '.join(missing)}")
    mvals = {("lam" if k == "lambda" else k): _num("model", k, mblock[k])
             for k in _MODEL_KEYS}
    model = ModelParams(**mvals)

    if "alpha" not in raw:
        raise ConfigError("config needs 'alpha'")
    alpha = _scalar_or_list(raw["alpha"], "alpha")

    s = _scalar_or_list(raw["s"], "s") if "s" in raw else None

    init = None
    if "init" in raw:
        iv = raw["init"]
        if not isinstance(iv, list) or len(iv) != 3:
            raise ConfigError("'init' must be a list of 3 numbers")
        init = State(*(_num("top-level", "init", v) for v in iv))

    sblock = raw.get("sim", {})
    if not isinstance(sblock, dict):
        raise ConfigError("'sim' must be an object")
    _check_keys(sblock, _SIM_KEYS, "'sim'")
    skw = {}
    for k in _SIM_KEYS:
        if k in sblock:
            v = sblock[k]
            if k in ("convergence_tol", "divergence_bound"):
                skw[k] = _num("sim", k, v)
            else:
                if isinstance(v, bool) or not isinstance(v, int):
                    raise ConfigError(f"'sim.{k}' must be an integer, got {v!r}")
                skw[k] = v
    sim = SimConfig(**skw)

    kw = {}
    for k in ("n_points", "renorm_interval"):
        if k in raw:
            v = raw[k]
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(f"'{k}' must be an integer, got {v!r}")
            kw[k] = v
    if "continuation" in raw:
        if not isinstance(raw["continuation"], bool):
            raise ConfigError("'continuation' must be true or false")
        kw["continuation"] = raw["continuation"]
    if "axis" in raw:
        if raw["axis"] not in ("s", "alpha"):
            raise ConfigError(f"'axis' must be 's' or 'alpha', got {raw['axis']!r}")
        kw["axis"] = raw["axis"]
    if "output_dir" in raw:
        if not isinstance(raw["output_dir"], str):
            raise ConfigError("'output_dir' must be a string")
        kw["output_dir"] = raw["output_dir"]

    return RunConfig(model=model, alpha=alpha, s=s, init=init, sim=sim, **kw)


def dump_config(cfg: RunConfig) -> dict:
    """JSON-ready dict that load_config parses back to an equal RunConfig."""
    m = cfg.model
    out = {
        "model": {"r": m.r, "K": m.K, "lambda": m.lam, "m": m.m, "mu": m.mu,
                  "a": m.a, "theta": m.theta, "d": m.d},
        "alpha": list(cfg.alpha) if isinstance(cfg.alpha, tuple) else cfg.alpha,
    }
    if cfg.s is not None:
        out["s"] = list(cfg.s) if isinstance(cfg.s, tuple) else cfg.s
    if cfg.init is not None:
        out["init"] = [cfg.init.x, cfg.init.y, cfg.init.z]
    out["sim"] = {k: getattr(cfg.sim, k) for k in _SIM_KEYS}
    out["n_points"] = cfg.n_points
    out["renorm_interval"] = cfg.renorm_interval
    out["continuation"] = cfg.continuation
    out["axis"] = cfg.axis
    out["output_dir"] = cfg.output_dir
    return out


def _scalar(cfg_value, name: str) -> float:
    if cfg_value is None or isinstance(cfg_value, tuple):
        raise ConfigError(f"this command needs a single number for '{name}'")
    return cfg_value


def _pair(cfg_value, name: str) -> tuple[float, float]:
    if not isinstance(cfg_value, tuple) or len(cfg_value) != 2:
        raise ConfigError(f"this command needs '{name}' as a [lo, hi] pair")
    return cfg_value


def _need_init(cfg: RunConfig) -> State:
    if cfg.init is None:
        raise ConfigError("this command needs 'init' in the config")
    return cfg.init


def _model_line(p: ModelParams) -> str:
    return (f"r={p.r:g} K={p.K:g} lambda={p.lam:g} m={p.m:g} mu={p.mu:g} "
            f"a={p.a:g} theta={p.theta:g} d={p.d:g}")


def _outdir(cfg: RunConfig) -> str:
    os.makedirs(cfg.output_dir, exist_ok=True)
    return cfg.output_dir


def _cmd_fixed_points(cfg: RunConfig, args) -> int:
    p = cfg.model
    scalar_run = not isinstance(cfg.alpha, tuple) and isinstance(cfg.s, float)
    lines = [f"model: {_model_line(p)}",
             f"basic reproduction number R0 = {basic_reproduction_number(p):.10g}"]
    th1 = theta_threshold(p)
    lines.append("predator invasion threshold theta1 = "
                 + (f"{th1:.10g}" if th1 is not None else "undefined (lambda*K <= mu)"))
    dsc = None
    if scalar_run:
        dsc = Discretization(cfg.alpha, cfg.s)
        lines.append(f"alpha = {dsc.alpha:g}, s = {dsc.s:g}, rho = {dsc.rho:.10g}")
    lines.append("")
    for fp in fixed_points(p):
        if not fp.exists:
            note = f" ({fp.existence_note})" if fp.existence_note else ""
            lines.append(f"{fp.kind.value}: does not exist{note}")
            continue
        c = fp.coords
        lines.append(f"{fp.kind.value}: ({c.x:.10g}, {c.y:.10g}, {c.z:.10g})")
        if dsc is not None:
            rep = classify(p, dsc, fp)
            mods = ", ".join(f"{m:.10g}" for m in rep.moduli)
            lines.append(f"  classification: {rep.classification.value}")
            lines.append(f"  eigenvalue moduli: {mods}")
            for jc in rep.jury_conditions:
                state = "holds" if jc.satisfied else "fails"
                lines.append(f"  jury [{jc.name}]: {state} (margin {jc.margin:.6g})")
    path = os.path.join(_outdir(cfg), "fixed_points.txt")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {path}")
    return 0


def _fmt4(v: float | None) -> str:
    return "-" if v is None else f"{v:.4f}"


def _cmd_thresholds(cfg: RunConfig, args) -> int:
    p = cfg.model
    alphas = cfg.alpha if isinstance(cfg.alpha, tuple) else (cfg.alpha,)
    lines = [f"model: {_model_line(p)}", ""]
    for alpha in alphas:
        ts = thresholds(p, alpha)
        lines.append(f"alpha = {alpha:g}")
        lines.append(f"  R0 = {ts.r0:.4f}  theta1 = {_fmt4(ts.theta1)}"
                     f"  d1 = {_fmt4(ts.d1)}")
        for name in ("s2", "s3", "s4", "s5", "s6", "s7", "s8", "s9"):
            lines.append(f"  {name} = {_fmt4(getattr(ts, name))}")
        if ts.s9 is None and ts.s9_search_max is not None:
            lines.append(f"  (s9: margin stayed positive up to {ts.s9_search_max:.4f})")
        for verdict in ts.verdicts:
            lines.append(f"  {verdict}")
        lines.append("")
    path = os.path.join(_outdir(cfg), "thresholds.txt")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {path}")
    return 0


def _cmd_simulate(cfg: RunConfig, args) -> int:
    alpha = _scalar(cfg.alpha, "alpha")
    s = _scalar(cfg.s, "s")
    traj = simulate(cfg.model, Discretization(alpha, s), _need_init(cfg), cfg.sim)
    path = os.path.join(_outdir(cfg), "trajectory.csv")
    traj.write_csv(path)
    print(f"wrote {path}")
    print(f"outcome: {traj.outcome.describe()}")
    return 3 if traj.outcome.kind is OutcomeKind.DIVERGED else 0


def _cmd_bifurcate(cfg: RunConfig, args) -> int:
    init = _need_init(cfg)
    if cfg.axis == "alpha":
        lo, hi = _pair(cfg.alpha, "alpha")
        s = _scalar(cfg.s, "s")
        res = bifurcation_sweep_alpha(cfg.model, s, (lo, hi), cfg.n_points, init,
                                      cfg.sim, jobs=args.jobs,
                                      continuation=cfg.continuation)
    else:
        alpha = _scalar(cfg.alpha, "alpha")
        lo, hi = _pair(cfg.s, "s")
        res = bifurcation_sweep(cfg.model, alpha, (lo, hi), cfg.n_points, init,
                                cfg.sim, jobs=args.jobs,
                                continuation=cfg.continuation)
    out = _outdir(cfg)
    csv_path = os.path.join(out, "bifurcation.csv")
    dat_path = os.path.join(out, "bifurcation.dat")
    res.write_csv(csv_path)
    res.write_plot_data(dat_path)
    print(f"wrote {csv_path}")
    print(f"wrote {dat_path}")
    star = res.detect_first_instability()
    if star is None:
        print("no instability detected in the swept range")
    else:
        print(f"first instability at {res.parameter_name} = {star:.10g}")
    return 0


def _cmd_lyapunov(cfg: RunConfig, args) -> int:
    alpha = _scalar(cfg.alpha, "alpha")
    lo, hi = _pair(cfg.s, "s")
    res = lyapunov_sweep(cfg.model, alpha, (lo, hi), cfg.n_points, _need_init(cfg),
                         cfg.sim, renorm_interval=cfg.renorm_interval,
                         jobs=args.jobs)
    out = _outdir(cfg)
    csv_path = os.path.join(out, "lyapunov.csv")
    dat_path = os.path.join(out, "lyapunov.dat")
    res.write_csv(csv_path)
    res.write_plot_data(dat_path)
    print(f"wrote {csv_path}")
    print(f"wrote {dat_path}")
    brackets = res.sign_change_brackets()
    if brackets:
        spans = ", ".join(f"({a:.10g}, {b:.10g})" for a, b in brackets)
        print(f"sign changes bracketed by: {spans}")
    else:
        print("no sign change in the swept range")
    return 0


_COMMANDS = {
    "fixed-points": (_cmd_fixed_points, "report fixed points and their stability"),
    "thresholds": (_cmd_thresholds, "report step-size stability bounds"),
    "simulate": (_cmd_simulate, "run one trajectory and write it as CSV"),
    "bifurcate": (_cmd_bifurcate, "sweep a parameter and write attractor samples"),
    "lyapunov": (_cmd_lyapunov, "sweep the step size and estimate the largest "
                                "Lyapunov exponent"),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fracppp",
        description="Discrete fractional-order predator-prey-parasite map tools")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in _COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="path to a JSON run config")
        sp.add_argument("--out", default=None,
                        help="output directory (overrides the config)")
        sp.add_argument("--jobs", type=int, default=1,
                        help="worker processes for sweeps")
        sp.add_argument("--dump-config", action="store_true",
                        help="print the parsed config as JSON and exit")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if args.out is not None:
            cfg = replace(cfg, output_dir=args.out)
        if args.dump_config:
            print(json.dumps(dump_config(cfg), indent=2))
            return 0
        if args.jobs < 1:
            raise ConfigError(f"--jobs must be >= 1, got {args.jobs}")
        return _COMMANDS[args.command][0](cfg, args)
    except DivergedOrbitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        # ConfigError subclasses ValueError; deeper parameter validation also
        # lands here and is a config problem from the user's point of view
        print(f"error: {exc}", file=sys.stderr)
        return 2
