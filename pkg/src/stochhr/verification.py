"""Fast property checks behind the ``verify`` command.

Each check returns ``(name, passed, detail)``; the whole suite runs in a
few seconds on one core.
"""
from __future__ import annotations

import math

import numpy as np

from .grid import SpatialGrid, StateField, h1_seminorm, inner, neumann_laplacian
from .model import HRParameters, derived_constants, random_reaction, reaction
from .pullback import (absorbing_bounds, cocycle_phi, energy_audit, hausdorff_semidistance)
from .solver import solve_transformed
from .stochastic import evaluate, integrate_exact_sde, q_weight, sample_path, shift


def _check(name, ok, detail):
    return name, bool(ok), detail


def check_shift(seed):
    path = sample_path(seed, -4.0, 4.0, 1e-3)
    t = np.linspace(-1.5, 1.5, 301)
    worst = 0.0
    for s in (-2.0, -0.7301, 0.5, 1.999):
        a = evaluate(shift(path, s), t)
        b = evaluate(path, t + s) - evaluate(path, s)
        worst = max(worst, float(np.max(np.abs(a - b))))
    return _check("path shift consistency", worst < 1e-12, f"max deviation {worst:.3g}")


def check_q_shift(seed):
    path = sample_path(seed, -4.0, 4.0, 1e-3)
    t = np.linspace(-1.0, 1.0, 101)
    s, eps = 0.8, 0.7
    lhs = q_weight(shift(path, s), eps, t)
    rhs = q_weight(path, eps, t + s) / q_weight(path, eps, s)
    rel = float(np.max(np.abs(lhs / rhs - 1.0)))
    return _check("Q shift identity", rel < 1e-12, f"max relative deviation {rel:.3g}")


def check_gaussian(seed):
    dt = 1e-3
    path = sample_path(seed, -10.0, 10.0, dt)
    inc = np.diff(path.values)
    se = math.sqrt(dt / inc.size)
    ok = abs(inc.mean()) < 4 * se and abs(inc.var() / dt - 1) < 0.05
    return _check("increment statistics", ok,
                  f"mean {inc.mean():.3g} (4se {4 * se:.3g}), var/dt {inc.var() / dt:.4f}")


def check_exact_sde(seed):
    path = sample_path(seed, 0.0, 1.0, 1e-4)
    zero = integrate_exact_sde(path, 0.0, 1.0, 1e-4)
    one = integrate_exact_sde(path, 1.0, 1.0, 1e-4)
    ok = zero.max_abs_error == 0.0 and one.max_rel_error < 1e-2
    return _check("exact SDE oracle", ok, f"lambda=1 relative error {one.max_rel_error:.3g}")


def check_laplacian(seed):
    rng = np.random.default_rng(seed)
    grid = SpatialGrid.from_spec("2:12:1.0")
    f, g = rng.standard_normal((2,) + grid.shape)
    const = float(np.max(np.abs(neumann_laplacian(np.full(grid.shape, 3.7), grid))))
    sym = abs(float(inner(neumann_laplacian(f, grid), g, grid) - inner(f, neumann_laplacian(g, grid), grid)))
    neg = float(inner(neumann_laplacian(f, grid), f, grid))
    ibp = abs(neg + float(h1_seminorm(f, grid)) ** 2)
    ok = const == 0.0 and sym < 1e-10 and neg <= 0 and ibp < 1e-10
    return _check("Neumann Laplacian", ok,
                  f"kernel {const:.3g}, asymmetry {sym:.3g}, <Lf,f> {neg:.3g}")


def check_transform(seed):
    rng = np.random.default_rng(seed)
    p = HRParameters()
    g = rng.standard_normal((3, 16))
    Q = 1.37
    lhs = np.stack(random_reaction(tuple(Q * g), Q, p))
    rhs = Q * np.stack(reaction(tuple(g), p))
    rel = float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)))
    return _check("transformed reaction", rel < 1e-13, f"relative deviation {rel:.3g}")


def check_cocycle(seed):
    p = HRParameters(eps=0.3)
    grid = SpatialGrid.from_spec("1:16:1.0")
    x = grid.centers()[0]
    g0 = StateField(grid, -1 + 0.4 * np.cos(np.pi * x), -5 + np.cos(2 * np.pi * x),
                    2 + 0 * x)
    path = sample_path(seed, -2.0, 2.0, 1e-3)
    dt = 2e-3
    ident = cocycle_phi(0.0, path, g0, dt, p, grid, form="forward")
    same = np.array_equal(ident.as_array(), g0.as_array())
    t, s = 0.2, 0.3
    whole = cocycle_phi(t + s, path, g0, dt, p, grid, form="forward")
    half = cocycle_phi(s, path, g0, dt, p, grid, form="forward")
    split = cocycle_phi(t, shift(path, s), half, dt, p, grid, form="forward")
    err = StateField.from_array(grid, whole.as_array() - split.as_array()).norm()
    ok = same and err <= 1e-10 * (1 + g0.norm())
    return _check("cocycle identity", ok, f"identity exact {same}, defect {err:.3g}")


def check_energy(seed):
    p = HRParameters()
    grid = SpatialGrid.from_spec("1:16:1.0")
    path = sample_path(seed, -1.0, 1.0, 1e-3)
    traj = solve_transformed(StateField.zeros(grid), 0.0, 0.01, 1e-3, path, p, grid)
    res = energy_audit(traj, p, grid)[1]
    k = derived_constants(p)
    zero_res = -(k.forcing2 * res.q_t ** 2 + 2 * (k.c1 * p.a) ** 4 * res.q_t ** 4) * grid.measure
    ok = res.ineq_residual < 0
    return _check("energy audit sign", ok,
                  f"first residual {res.ineq_residual:.6g} (zero-state value {zero_res:.6g})")


def check_bounds(seed):
    p = HRParameters(eps=0.0)
    grid = SpatialGrid.from_spec("1:8:1.0")
    T = 500.0
    path = sample_path(seed, -T, 0.5, 0.05)
    b = absorbing_bounds(path, p, grid, T, 0.05, tail_rtol=math.inf)
    k = derived_constants(p)
    brk = k.forcing2 + 2 * (k.c1 * p.a) ** 4
    exact = math.sqrt(1 + grid.measure / min(k.c1, 1) * brk * -math.expm1(-k.sigma * (T - 1)) / k.sigma)
    rel = abs(b.r0 / exact - 1)
    return _check("closed-form r0", rel < 1e-8 and b.C_omega == 1.0, f"relative deviation {rel:.3g}")


def check_hausdorff(seed):
    rng = np.random.default_rng(seed)
    grid = SpatialGrid.from_spec("1:8:1.0")
    A = rng.standard_normal((4, 3, 8))
    B = np.concatenate([A, rng.standard_normal((3, 3, 8))])
    ones = StateField.constant(grid, 1.0, 1.0, 1.0)
    zero = StateField.zeros(grid)
    ok = (hausdorff_semidistance(A, A, grid) == 0.0
          and hausdorff_semidistance(A, B, grid) == 0.0
          and abs(hausdorff_semidistance([zero], [ones], grid) - math.sqrt(3)) < 1e-14)
    return _check("Hausdorff semi-distance", ok, "self, subset and constant-field cases")


CHECKS = (check_shift, check_q_shift, check_gaussian, check_exact_sde, check_laplacian,
          check_transform, check_cocycle, check_energy, check_bounds, check_hausdorff)


def run_all(seed: int = 0):
    return [chk(seed) for chk in CHECKS]
