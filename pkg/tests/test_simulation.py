"""Trajectory runs: outcomes, recording, thinning, CSV output."""

import math

import pytest

from fracppp import (
    Discretization,
    FixedPointKind,
    ModelParams,
    OutcomeKind,
    SimConfig,
    State,
    fixed_point,
    simulate,
    step,
    terminal_attractor_samples,
)

PREY_ONLY_SET = ModelParams(r=2.0, K=40.0, lam=0.005, m=0.52, mu=0.28,
                            a=15.0, theta=0.189, d=0.09)
DIVERGING_SET = ModelParams(r=2.0, K=200.0, lam=0.015, m=0.52, mu=0.28,
                            a=15.0, theta=0.08, d=0.09)
INTERIOR_SET = ModelParams(r=15.0, K=40.0, lam=0.006, m=14.5, mu=0.0019,
                           a=16.0, theta=11.1, d=6.0)
CHAOTIC_SET = ModelParams(r=22.0, K=300.0, lam=0.06, m=15.5, mu=2.3,
                          a=15.0, theta=10.0, d=8.3)
INIT = State(30.0, 5.0, 10.0)


def test_runs_are_deterministic():
    a = simulate(INTERIOR_SET, Discretization(0.8, 0.05), INIT)
    b = simulate(INTERIOR_SET, Discretization(0.8, 0.05), INIT)
    assert a.states == b.states and a.outcome == b.outcome


def test_convergence_soundness():
    traj = simulate(INTERIOR_SET, Discretization(0.8, 0.05), INIT)
    assert traj.outcome.kind is OutcomeKind.CONVERGED
    fp = traj.outcome.fixed_point
    assert fp.kind is FixedPointKind.COEXISTENCE
    k, terminal = traj.states[-1]
    scale = 1.0 + max(abs(c) for c in fp.coords)
    assert max(abs(u - v) for u, v in zip(terminal, fp.coords)) / scale < 1e-5
    nxt = step(INTERIOR_SET, Discretization(0.8, 0.05), terminal)
    assert max(abs(u - v) for u, v in zip(nxt, terminal)) / scale < 1e-6


def test_transient_does_not_change_outcome():
    base = SimConfig(n_steps=20000, transient=5000)
    doubled = SimConfig(n_steps=20000, transient=10000)
    for p, alpha, s in ((INTERIOR_SET, 0.8, 0.05), (PREY_ONLY_SET, 0.8, 0.65)):
        a = simulate(p, Discretization(alpha, s), INIT, base)
        b = simulate(p, Discretization(alpha, s), INIT, doubled)
        assert a.outcome.kind is b.outcome.kind is OutcomeKind.CONVERGED
        assert a.outcome.fixed_point.kind is b.outcome.fixed_point.kind


def test_init_at_fixed_point_stays_there():
    fp = fixed_point(PREY_ONLY_SET, FixedPointKind.PREY_ONLY)
    traj = simulate(PREY_ONLY_SET, Discretization(0.8, 0.65), fp.coords)
    assert traj.outcome.kind is OutcomeKind.CONVERGED
    assert traj.outcome.fixed_point.kind is FixedPointKind.PREY_ONLY
    for _, st in traj.states:
        assert st == fp.coords


@pytest.mark.parametrize("bad", [State(-1.0, 5.0, 10.0),
                                 State(30.0, math.nan, 10.0),
                                 State(30.0, 5.0, -math.inf)])
def test_bad_init_rejected(bad):
    with pytest.raises(ValueError):
        simulate(PREY_ONLY_SET, Discretization(0.8, 0.5), bad)
    with pytest.raises(ValueError):
        terminal_attractor_samples(PREY_ONLY_SET, Discretization(0.8, 0.5), bad)


def test_divergence_detection():
    dsc = Discretization(0.8, 0.85)
    traj = simulate(DIVERGING_SET, dsc, INIT)
    assert traj.outcome.kind is OutcomeKind.DIVERGED
    assert traj.outcome.diverged_at == 58
    # recorded states stop before the divergence step and stay finite
    assert traj.states[-1][0] < 58
    assert all(math.isfinite(c) for _, st in traj.states for c in st)
    assert terminal_attractor_samples(DIVERGING_SET, dsc, INIT) == []


def test_oscillatory_runs_keep_full_recording():
    cfg = SimConfig(n_steps=3000, transient=1000)
    traj = simulate(INTERIOR_SET, Discretization(0.8, 0.08), INIT, cfg)
    assert traj.outcome.kind is OutcomeKind.OSCILLATORY
    assert len(traj.states) == 3001
    assert traj.states[0] == (0, INIT)
    assert traj.states[-1][0] == 3000


def test_period_two_orbit_clusters():
    # beyond the prey-only flip boundary the attractor is a 2-cycle
    samples = terminal_attractor_samples(PREY_ONLY_SET, Discretization(0.8, 0.95), INIT)
    assert len(samples) == 10000
    clusters = {round(st.x, 6) for st in samples}
    assert len(clusters) == 2


def test_samples_settle_near_interior_point():
    fp = fixed_point(INTERIOR_SET, FixedPointKind.COEXISTENCE).coords
    cfg = SimConfig(n_steps=30000, transient=20000)
    samples = terminal_attractor_samples(INTERIOR_SET, Discretization(0.8, 0.05), INIT, cfg)
    scale = 1.0 + max(abs(c) for c in fp)
    for st in samples:
        assert max(abs(u - v) for u, v in zip(st, fp)) / scale < 1e-4

    fp = fixed_point(CHAOTIC_SET, FixedPointKind.COEXISTENCE).coords
    samples = terminal_attractor_samples(CHAOTIC_SET, Discretization(0.85, 0.01), INIT)
    scale = 1.0 + max(abs(c) for c in fp)
    for st in samples:
        assert max(abs(u - v) for u, v in zip(st, fp)) / scale < 1e-4


def test_thinning_counts_and_indices():
    cfg = SimConfig(n_steps=1000, transient=400, record_every=7)
    samples = terminal_attractor_samples(INTERIOR_SET, Discretization(0.8, 0.08), INIT, cfg)
    assert len(samples) == (1000 - 400) // 7

    traj = simulate(INTERIOR_SET, Discretization(0.8, 0.08), INIT, cfg)
    ks = [k for k, _ in traj.states]
    assert ks[0] == 0 and ks[1] == 7 and ks[-1] == 994
    assert len(ks) == 1000 // 7 + 1


def test_csv_output_format_and_determinism(tmp_path):
    cfg = SimConfig(n_steps=500, transient=100)
    traj = simulate(PREY_ONLY_SET, Discretization(0.8, 0.65), INIT, cfg)
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    traj.write_csv(p1)
    traj.write_csv(p2)
    data = p1.read_bytes()
    assert data == p2.read_bytes()
    lines = data.decode().splitlines()
    assert lines[0] == "step,X,Y,Z"
    assert lines[1] == "0,30.0,5.0,10.0"
    assert lines[-1].startswith("# outcome: converged to E1")
    row = lines[2].split(",")
    assert int(row[0]) == 1 and len(row) == 4


@pytest.mark.parametrize("kwargs", [
    dict(n_steps=0),
    dict(n_steps=100, transient=100),
    dict(transient=-1),
    dict(record_every=0),
    dict(convergence_tol=0.0),
    dict(divergence_bound=-5.0),
])
def test_sim_config_validation(kwargs):
    with pytest.raises(ValueError):
        SimConfig(**kwargs)
