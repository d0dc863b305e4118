"""Acceptance suite: one pass/fail line per criterion, tolerances pinned below."""
import math
import time

import numpy as np
import pytest

from stochhr import io
from stochhr.cli import main
from stochhr.grid import SpatialGrid, StateField, h1_seminorm, inner, l2_norm, l4_norm, neumann_laplacian
from stochhr.model import derived_constants, preset
from stochhr.pullback import (DEFAULT_LADDER, absorbing_bounds, attractor_approximation,
                              cocycle_phi, energy_audit, energy_tolerance, verify_absorbing)
from stochhr.solver import CHAOTIC_CV_MIN, classify_regime, ode_trajectory, solve_direct_spde, solve_transformed
from stochhr.stochastic import integrate_exact_sde, sample_path, shift

from conftest import cosine_state

# criterion 1
SDE_SEEDS = 100
SDE_REL_TOL = 1e-2
SDE_MIN_PASSING = 95
SDE_DTS = (1e-4, 5e-5, 2.5e-5, 1.25e-5)
SDE_RUNTIME = 10.0
# criterion 2
TRANSFORM_DTS = (1e-3, 5e-4, 2.5e-4)
TRANSFORM_LEVEL = 0.5          # discrepancy level L(dt) = TRANSFORM_LEVEL * dt
TRANSFORM_RUNTIME = 60.0
# criterion 3
COCYCLE_PAIRS = ((0.5, 0.5), (1.0, 2.0), (2.0, 1.0))
COCYCLE_TOL = 1e-10
# criterion 4
ENERGY_DT = 1e-3
ENERGY_FRACTION = 0.99
# criterion 5
CLOSED_FORM_RTOL = 1e-8
# criterion 6
ABSORB_RHO = 10.0
ABSORB_SAMPLES = 64
ABSORB_VARIATION = 0.10
# criterion 7
ATTRACTOR_LIMIT = 1e-6
ATTRACTOR_RTOL = 0.05
# criterion 8
ODE_RUNTIME = 10.0
TONIC_CV = 0.05
# criterion 9
OPERATOR_TOL = 1e-10
NORM_TOL = 1e-4

GRID32 = "1:32:1.0"


def test_criterion_01_exact_sde(verdict):
    t0 = time.perf_counter()
    errs = np.empty((SDE_SEEDS, len(SDE_DTS)))
    rel = np.empty(SDE_SEEDS)
    for seed in range(SDE_SEEDS):
        path = sample_path(seed, 0.0, 1.0, SDE_DTS[-1])
        for j, dt in enumerate(SDE_DTS):
            r = integrate_exact_sde(path, 1.0, 1.0, dt)
            errs[seed, j] = r.max_abs_error
            if j == 0:
                rel[seed] = r.max_rel_error
    elapsed = time.perf_counter() - t0
    passing = int(np.sum(rel < SDE_REL_TOL))
    mean = errs.mean(axis=0)
    monotone = bool(np.all(np.diff(mean) < 0))
    ok = passing >= SDE_MIN_PASSING and monotone and elapsed < SDE_RUNTIME
    verdict(1, ok, f"{passing}/{SDE_SEEDS} seeds below {SDE_REL_TOL:g}; mean errors "
                   f"{np.array2string(mean, precision=3)}; {elapsed:.1f} s")
    assert ok


def test_criterion_02_transform_equivalence(verdict):
    t0 = time.perf_counter()
    grid = SpatialGrid.from_spec(GRID32)
    p = preset("paper-typical").with_(eps=0.5)
    path = sample_path(7, 0.0, 1.0, 1.25e-4)
    g0 = cosine_state(grid)
    disc = []
    for dt in TRANSFORM_DTS:
        d = solve_direct_spde(g0, 0.0, 1.0, dt, path, p, grid)
        t = solve_transformed(g0, 0.0, 1.0, dt, path, p, grid)
        q = np.array([r.q_t for r in t.energy_rows])
        diffs = [StateField.from_array(grid, a.as_array() - b.as_array() / qk).norm()
                 for a, b, qk in zip(d.states, t.states, q)]
        disc.append(max(diffs))
    elapsed = time.perf_counter() - t0
    below = all(e < TRANSFORM_LEVEL * dt for e, dt in zip(disc, TRANSFORM_DTS))
    ratios = [a / b for a, b in zip(disc, disc[1:])]
    ok = below and all(r > 1 for r in ratios) and elapsed < TRANSFORM_RUNTIME
    verdict(2, ok, f"discrepancies {np.array2string(np.array(disc), precision=3)} vs level "
                   f"{TRANSFORM_LEVEL:g}*dt; halving ratios {np.round(ratios, 2)}; {elapsed:.1f} s")
    assert ok


def test_criterion_03_cocycle(verdict):
    grid = SpatialGrid.from_spec(GRID32)
    p = preset("paper-typical").with_(eps=0.5)
    path = sample_path(3, 0.0, 3.5, 1e-3)
    g0 = cosine_state(grid)
    dt = 1e-3
    worst = 0.0
    for t, s in COCYCLE_PAIRS:
        whole = cocycle_phi(t + s, path, g0, dt, p, grid, form="forward")
        first = cocycle_phi(s, path, g0, dt, p, grid, form="forward")
        split = cocycle_phi(t, shift(path, s), first, dt, p, grid, form="forward")
        err = StateField.from_array(grid, whole.as_array() - split.as_array()).norm()
        worst = max(worst, err / (1 + g0.norm()))
    ok = worst <= COCYCLE_TOL
    verdict(3, ok, f"max defect / (1 + |g0|) = {worst:.3g} (tolerance {COCYCLE_TOL:g})")
    assert ok


def test_criterion_04_energy_audit(verdict):
    grid = SpatialGrid.from_spec(GRID32)
    p = preset("paper-typical")
    path = sample_path(4, 0.0, 1.0, 5e-4)
    tr = solve_transformed(cosine_state(grid), 0.0, 1.0, ENERGY_DT, path, p, grid)
    res = np.array([r.ineq_residual for r in energy_audit(tr, p, grid)[1:]])
    tol = energy_tolerance(ENERGY_DT, p, grid)
    frac = float(np.mean(res <= tol))
    halves = energy_tolerance(ENERGY_DT / 2, p, grid) == tol / 2
    ok = frac >= ENERGY_FRACTION and halves
    verdict(4, ok, f"{frac:.2%} of {res.size} steps within tol(dt)={tol:.3g}; max residual "
                   f"{res.max():.3g}; tol halves with dt: {halves}")
    assert ok


def test_criterion_05_bounds(verdict):
    grid = SpatialGrid.from_spec(GRID32)
    p0 = preset("paper-typical").with_(eps=0.0)
    T = 2000.0
    path = sample_path(5, -2 * 20000.0, 0.0, 0.01)
    b0 = absorbing_bounds(path, p0, grid, T, 0.1)
    k = derived_constants(p0)
    brk = k.forcing2 + 2 * (k.c1 * p0.a) ** 4
    exact = math.sqrt(1 + grid.measure / min(k.c1, 1) * brk * -math.expm1(-k.sigma * (T - 1))
                      / k.sigma)
    rel = abs(b0.r0 / exact - 1)
    p = preset("paper-typical")
    b1 = absorbing_bounds(path, p, grid, 20000.0, 0.1)
    b2 = absorbing_bounds(path, p, grid, 40000.0, 0.1)
    moved = abs(b2.r0 - b1.r0)
    ok = rel < CLOSED_FORM_RTOL and moved < b1.tail_bound
    verdict(5, ok, f"eps=0 relative deviation {rel:.2e}; doubling T moves r0 by {moved:.3g} "
                   f"< tail_bound {b1.tail_bound:.3g}")
    assert ok


def test_criterion_06_absorbing(verdict):
    grid = SpatialGrid.from_spec(GRID32)
    p = preset("paper-typical")
    path = sample_path(0, -40000.0, 0.0, 0.01)
    b = absorbing_bounds(path, p, grid, 40000.0, 0.1)
    rep = verify_absorbing(ABSORB_RHO, ABSORB_SAMPLES, DEFAULT_LADDER, path, 0.01, p, grid,
                           bounds=b)
    ok = bool(rep.within_bound.all()) and rep.tail_variation <= ABSORB_VARIATION
    verdict(6, ok, f"sup norms {np.array2string(rep.sup_norms, precision=3)} <= R0 "
                   f"{b.R0:.3g}; tail variation {rep.tail_variation:.1%} "
                   f"(limit {ABSORB_VARIATION:.0%})")
    assert ok


def test_criterion_07a_attractor_dissipative(verdict):
    grid = SpatialGrid.from_spec(GRID32)
    p = preset("dissipative")
    ladder = [16, 32, 64, 128, 256, 512, 1024]
    path = sample_path(0, -1100.0, 0.0, 0.01)
    rep = attractor_approximation(4, ladder, path, 0.05, p, grid, R0=math.inf,
                                  rtol=ATTRACTOR_RTOL)
    tail = rep.tail_distances
    ok = rep.monotone and tail[-1] < ATTRACTOR_LIMIT
    verdict("7a", ok, f"dissipative reduction: distances "
                      f"{np.array2string(rep.consecutive_distances, precision=3)}; "
                      f"need tail < {ATTRACTOR_LIMIT:g} (slowest rate r = {p.r})")
    assert ok


def test_criterion_07b_attractor_typical(verdict):
    grid = SpatialGrid.from_spec(GRID32)
    p = preset("paper-typical")
    ladder = [1, 2, 4, 8, 16, 32, 64]
    path = sample_path(0, -70.0, 0.0, 0.01)
    rep = attractor_approximation(ABSORB_SAMPLES, ladder, path, 0.01, p, grid, R0=math.inf,
                                  rtol=ATTRACTOR_RTOL)
    verdict("7b", rep.monotone, f"paper-typical: distances "
                                f"{np.array2string(rep.consecutive_distances, precision=3)}; "
                                f"tail non-increasing within {ATTRACTOR_RTOL:.0%}: {rep.monotone}")
    assert rep.monotone


@pytest.mark.parametrize("J", [0.0, 1.2, 3.1])
def test_criterion_08_ode_regimes(verdict, J):
    p = preset("figure-1")
    t0 = time.perf_counter()
    times, x = ode_trajectory((-1.6, -11.8, 2.0), p, J, 3000.0, 0.01)
    rep = classify_regime(times, x[:, 0], transient_cut=1000.0)
    elapsed = time.perf_counter() - t0
    if J == 0.0:
        ok = rep.spike_count == 0
    elif J == 1.2:
        ok = rep.spike_count > 2 and rep.isi_cv < TONIC_CV
    else:
        ok = rep.spike_count > 0 and rep.isi_cv > CHAOTIC_CV_MIN
    ok = ok and elapsed < ODE_RUNTIME
    verdict(8, ok, f"J={J}: {rep.label}, {rep.spike_count} spikes, ISI CV {rep.isi_cv:.3g}; "
                   f"{elapsed:.1f} s")
    assert ok


def test_criterion_09_operators(verdict):
    checks = {}
    rng = np.random.default_rng(9)
    for spec in ("1:33:1.0", "2:12:1.5", "3:6:1.0"):
        g = SpatialGrid.from_spec(spec)
        f, h = rng.standard_normal((2,) + g.shape)
        checks[f"kernel {spec}"] = float(np.max(np.abs(neumann_laplacian(np.full(g.shape, 2.0), g)))) == 0.0
        asym = abs(float(inner(neumann_laplacian(f, g), h, g) - inner(f, neumann_laplacian(h, g), g)))
        checks[f"self-adjoint {spec}"] = asym <= OPERATOR_TOL
        checks[f"nonpositive {spec}"] = float(inner(neumann_laplacian(f, g), f, g)) <= OPERATOR_TOL
    errs = []
    for n in (32, 64, 128):
        g = SpatialGrid.from_spec(f"1:{n}:1.0")
        x = g.centers()[0]
        errs.append(float(np.max(np.abs(neumann_laplacian(np.cos(np.pi * x), g)
                                        + np.pi ** 2 * np.cos(np.pi * x)))))
    rates = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    checks["order 2"] = all(abs(r - 2) < 0.1 for r in rates)
    g = SpatialGrid.from_spec("1:10000:1.0")
    f = np.cos(np.pi * g.centers()[0])
    checks["L2 norm"] = abs(float(l2_norm(f, g)) - math.sqrt(0.5)) < NORM_TOL
    checks["H1 seminorm"] = abs(float(h1_seminorm(f, g)) - math.pi / math.sqrt(2)) < NORM_TOL
    checks["L4 norm"] = abs(float(l4_norm(f, g)) - 0.375 ** 0.25) < NORM_TOL
    failed = [k for k, v in checks.items() if not v]
    ok = not failed
    verdict(9, ok, f"{len(checks) - len(failed)}/{len(checks)} operator checks; convergence "
                   f"rates {np.round(rates, 3)}" + (f"; failed {failed}" if failed else ""))
    assert ok


def test_criterion_10_determinism(verdict, tmp_path):
    runs = {
        "pullback": ["pullback", "--set", "ladder=1,2,4", "--set", "n_samples=6",
                     "--truncation", "40000"],
        "attractor": ["attractor", "--set", "ladder=1,2,4", "--set", "n_samples=6"],
        "simulate": ["simulate", "--dt", "0.002", "--set", "t_end=0.2", "--eps", "0.2"],
    }
    outputs = {"pullback": "pullback.csv", "attractor": "attractor.csv",
               "simulate": "trajectory.csv"}
    same = {}
    for name, args in runs.items():
        payload = []
        for k, threads in enumerate((1, 4, 1)):
            out = tmp_path / f"{name}{k}"
            assert main(args + ["--seed", "3", "--threads", str(threads), "--out", str(out)]) == 0
            payload.append("\n".join(io.numeric_lines(out / outputs[name])).encode())
        same[name] = payload[0] == payload[1] == payload[2]
    ok = all(same.values())
    verdict(10, ok, "byte-identical numeric CSV content for threads 1/4/1: " +
            ", ".join(f"{k} {v}" for k, v in same.items()))
    assert ok
