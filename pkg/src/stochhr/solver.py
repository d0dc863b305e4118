"""Time stepping for the stochastic Hindmarsh-Rose system.

Two independent routes to the same pathwise solution:

* ``transformed-imex`` integrates the random PDE for ``G = Q g`` with
  ``Q(t) = exp(-eps W(t))``: backward-Euler diffusion solved by conjugate
  gradients, explicit reaction with Q frozen at the left end of the step.
* ``direct-stratonovich`` integrates the original equation with the
  multiplicative noise ``eps g o dW`` handled by a Heun predictor-corrector
  and the same implicit diffusion / explicit reaction split.

Arrays inside this module are stacked as ``(3, *batch, *cells)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BlowUpError, DomainError
from .grid import SpatialGrid, StateField, h1_seminorm, inner, l4_norm, solve_helmholtz
from .model import HRParameters, derived_constants, random_reaction, reaction
from .records import EnergyRecord, TrajectoryRecord
from .stochastic import WienerPath, evaluate, q_weight

__all__ = [
    "CG_TOL",
    "step_transformed",
    "solve_transformed",
    "solve_direct_spde",
    "integrate_batch",
    "time_partition",
    "ode_trajectory",
    "RegimeReport",
    "classify_regime",
]

CG_TOL = 1e-10
TRANSFORMED = "transformed-imex"
DIRECT = "direct-stratonovich"
ODE_RK4 = "ode-rk4"

# regime thresholds: calibration constants, see README
TONIC_CV_MAX = 0.05
CHAOTIC_CV_MIN = 0.3
BURST_GAP_RATIO = 3.0

# explicit reaction: split a step when dt * |reaction Jacobian| exceeds this
STIFF_LIMIT = 1.0
MAX_SUBSTEPS = 100_000


def time_partition(tau: float, t_end: float, dt: float) -> np.ndarray:
    """Step times ``tau + k dt``, the last step shortened to land on ``t_end``."""
    if not dt > 0:
        raise DomainError("dt must be positive")
    if t_end < tau:
        raise DomainError(f"t_end {t_end} precedes tau {tau}")
    n = int(math.floor((t_end - tau) / dt + 1e-9))
    times = tau + np.arange(n + 1) * dt
    if t_end - times[-1] > 1e-9 * dt:
        times = np.append(times, t_end)
    else:
        times[-1] = t_end
    return times


def _diffusion(p: HRParameters, batch_ndim: int) -> np.ndarray:
    return np.array([p.d1, p.d2, p.d3]).reshape((3,) + (1,) * batch_ndim)


def _implicit(rhs, dt, p, grid):
    coef = dt * _diffusion(p, rhs.ndim - 1 - grid.dim)
    x, _ = solve_helmholtz(rhs, coef, grid, tol=CG_TOL)
    return x


def _transformed_step(arr, Q, dt, p, grid):
    react = np.stack(random_reaction(tuple(arr), Q, p))
    return _implicit(arr + dt * react, dt, p, grid)


def _direct_step(arr, dW, dt, p, grid):
    react = np.stack(reaction(tuple(arr), p))
    drift = arr + dt * react
    pred = drift + p.eps * arr * dW
    return _implicit(drift + 0.5 * p.eps * (arr + pred) * dW, dt, p, grid)


def step_transformed(G: StateField, t: float, dt: float, path: WienerPath,
                     p: HRParameters, grid: SpatialGrid) -> StateField:
    """One IMEX step of the transformed system from ``t`` to ``t + dt``."""
    if not dt > 0:
        raise DomainError("dt must be positive")
    Q = q_weight(path, p.eps, t)
    with np.errstate(over="ignore", invalid="ignore"):
        out = _transformed_step(G.as_array(), Q, dt, p, grid)
    if not np.isfinite(out).all():
        raise BlowUpError(f"non-finite state at t={t + dt}", t=t + dt)
    return StateField.from_array(grid, out)


def _energy_row(t, G, Q, grid, c1) -> EnergyRecord:
    U, V, Z = G
    u2, v2, z2 = (float(inner(f, f, grid)) for f in (U, V, Z))
    gu, gv, gz = (float(h1_seminorm(f, grid)) ** 2 for f in (U, V, Z))
    return EnergyRecord(t=float(t), l2_U2=u2, l2_V2=v2, l2_Z2=z2,
                        weighted_energy=c1 * u2 + v2 + z2,
                        grad_U2=gu, grad_V2=gv, grad_Z2=gz,
                        l4_U4=float(l4_norm(U, grid)) ** 4, q_t=float(Q))


def _stiffness(arr, Q, p, grid):
    """Per-system bound on the reaction Jacobian, shape ``batch``."""
    U = np.abs(arr[0]) / Q
    lam = 3.0 * p.b * U * U + 2.0 * (p.a + p.beta) * U + 1.0 + p.q + p.r
    return lam.reshape(lam.shape[:lam.ndim - grid.dim] + (-1,)).max(axis=-1)


def _substeps(arr, Q, dt, p, grid):
    m = np.ceil(dt * _stiffness(arr, Q, p, grid) / STIFF_LIMIT)
    m = np.maximum(m, 1.0)
    if np.any(m > MAX_SUBSTEPS) or not np.isfinite(m).all():
        return None
    return m.astype(np.int64)


def _advance(arr, t0, t1, path, p, grid, scheme):
    """One user step ``t0 -> t1``; stiff systems are split into equal substeps."""
    dt = t1 - t0
    Q0 = q_weight(path, p.eps, t0) if scheme == TRANSFORMED else 1.0
    m = _substeps(arr, Q0, dt, p, grid)
    if m is None:
        raise BlowUpError(f"reaction too stiff to resolve at t={t0} ({scheme}); reduce dt",
                          t=float(t0))
    if np.all(m == 1):
        return _one(arr, t0, t1, path, p, grid, scheme)
    batch = m.shape
    flat = arr.reshape((3, -1) + grid.shape)
    out = np.empty_like(flat)
    mf = m.reshape(-1)
    for k in np.unique(mf):
        idx = np.flatnonzero(mf == k)
        sub = flat[:, idx]
        ts = t0 + np.arange(k + 1) * (dt / k)
        ts[-1] = t1
        for j in range(k):
            sub = _one(sub, ts[j], ts[j + 1], path, p, grid, scheme)
        out[:, idx] = sub
    return out.reshape((3,) + batch + grid.shape)


def _one(arr, t0, t1, path, p, grid, scheme):
    dt = t1 - t0
    if scheme == TRANSFORMED:
        return _transformed_step(arr, q_weight(path, p.eps, t0), dt, p, grid)
    W = evaluate(path, np.array([t0, t1]))
    return _direct_step(arr, W[1] - W[0], dt, p, grid)


def integrate_batch(arr, times, path, p, grid, scheme=TRANSFORMED, on_step=None):
    """Advance a stacked state through ``times``; returns the final array.

    ``on_step(k, arr)`` is called after each completed step ``k``.
    """
    arr = np.asarray(arr, dtype=float)
    if scheme not in (TRANSFORMED, DIRECT):
        raise DomainError(f"unknown scheme {scheme!r}")
    for k in range(times.size - 1):
        # non-finite values are caught just below
        with np.errstate(over="ignore", invalid="ignore"):
            arr = _advance(arr, times[k], times[k + 1], path, p, grid, scheme)
        if not np.isfinite(arr).all():
            raise BlowUpError(f"non-finite state at t={times[k + 1]} ({scheme}); "
                              "reduce dt", t=float(times[k + 1]))
        if on_step is not None:
            on_step(k, arr)
    return arr


def _solve(state0, tau, t_end, dt, path, p, grid, stride, scheme):
    if stride < 1:
        raise DomainError("stride must be >= 1")
    times = time_partition(tau, t_end, dt)
    c1 = derived_constants(p).c1
    Qs = np.broadcast_to(q_weight(path, p.eps, times), times.shape)
    # energy rows always describe G = Q g
    to_G = (lambda k, a: a) if scheme == TRANSFORMED else (lambda k, a: Qs[k] * a)
    arr0 = state0.as_array()
    rows = [_energy_row(times[0], to_G(0, arr0), Qs[0], grid, c1)]
    snaps_t, snaps = [times[0]], [state0]

    def record(k, a):
        rows.append(_energy_row(times[k + 1], to_G(k + 1, a), Qs[k + 1], grid, c1))
        if (k + 1) % stride == 0 or k + 2 == times.size:
            snaps_t.append(times[k + 1])
            snaps.append(StateField.from_array(grid, a))

    integrate_batch(arr0, times, path, p, grid, scheme, on_step=record)
    return TrajectoryRecord(times=times, snapshot_times=np.array(snaps_t), states=snaps,
                            energy_rows=rows, scheme=scheme, dt=float(dt),
                            path_seed=path.seed, stride=stride,
                            meta={"tau": float(tau), "t_end": float(t_end)})


def solve_transformed(G_tau: StateField, tau: float, t_end: float, dt: float,
                      path: WienerPath, p: HRParameters, grid: SpatialGrid,
                      stride: int = 1) -> TrajectoryRecord:
    """Integrate the random PDE for ``G`` from ``G(tau) = G_tau`` to ``t_end``."""
    return _solve(G_tau, tau, t_end, dt, path, p, grid, stride, TRANSFORMED)


def solve_direct_spde(g0: StateField, t0: float, t_end: float, dt: float,
                      path: WienerPath, p: HRParameters, grid: SpatialGrid,
                      stride: int = 1) -> TrajectoryRecord:
    """Integrate the Stratonovich SPDE for ``g`` directly."""
    return _solve(g0, t0, t_end, dt, path, p, grid, stride, DIRECT)


def ode_trajectory(x0, p: HRParameters, J_override: float | None, T: float, dt: float,
                   blowup: float = 1e6):
    """Classical RK4 for the kinetic Hindmarsh-Rose system.

    Returns ``(times, states)`` with ``states`` of shape ``(n + 1, 3)``.
    """
    if not dt > 0:
        raise DomainError("dt must be positive")
    J = p.J if J_override is None else float(J_override)
    a, b, al, be, q, r, c = p.a, p.b, p.alpha, p.beta, p.q, p.r, p.c

    def f(u, v, z):
        return a * u * u - b * u * u * u + v - z + J, al - be * u * u - v, q * (u - c) - r * z

    n = int(round(T / dt))
    out = np.empty((n + 1, 3))
    u, v, z = (float(x) for x in x0)
    out[0] = u, v, z
    h2, h6 = 0.5 * dt, dt / 6.0
    for k in range(1, n + 1):
        k1 = f(u, v, z)
        k2 = f(u + h2 * k1[0], v + h2 * k1[1], z + h2 * k1[2])
        k3 = f(u + h2 * k2[0], v + h2 * k2[1], z + h2 * k2[2])
        k4 = f(u + dt * k3[0], v + dt * k3[1], z + dt * k3[2])
        u += h6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        v += h6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        z += h6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        if not (abs(u) < blowup and abs(v) < blowup and abs(z) < blowup):
            raise BlowUpError(f"ODE trajectory left |x| < {blowup} at t={k * dt}", t=k * dt)
        out[k] = u, v, z
    return np.arange(n + 1) * dt, out


@dataclass(frozen=True)
class RegimeReport:
    spike_count: int
    isi_mean: float
    isi_cv: float
    label: str
    spike_times: np.ndarray
    burst_sizes: tuple = ()


def classify_regime(times, u, u_threshold: float = 0.0, transient_cut: float = 0.0,
                    tonic_cv_max: float = TONIC_CV_MAX,
                    chaotic_cv_min: float = CHAOTIC_CV_MIN) -> RegimeReport:
    """Spike statistics of the membrane potential after a transient.

    Spikes are upward crossings of ``u_threshold`` (crossing time by linear
    interpolation). Labels: ``resting`` (no spikes), ``tonic`` (ISI CV below
    ``tonic_cv_max``), ``regular-bursting`` (bimodal ISIs with identical
    burst sizes), ``chaotic-bursting`` (bimodal ISIs otherwise, or CV at
    least ``chaotic_cv_min``), ``irregular`` for anything else.
    """
    times = np.asarray(times, dtype=float)
    u = np.asarray(u, dtype=float)
    keep = times >= transient_cut
    if keep.sum() < 2:
        raise DomainError("no samples after the transient cut")
    t, x = times[keep], u[keep] - u_threshold
    up = np.flatnonzero((x[:-1] < 0) & (x[1:] >= 0))
    spikes = t[up] + (t[up + 1] - t[up]) * (-x[up] / (x[up + 1] - x[up]))
    n = spikes.size
    if n == 0:
        return RegimeReport(0, float("nan"), float("nan"), "resting", spikes)
    if n < 3:
        return RegimeReport(n, float("nan"), float("nan"), "irregular", spikes)
    isi = np.diff(spikes)
    mean = float(isi.mean())
    cv = float(isi.std() / mean)
    if cv < tonic_cv_max:
        return RegimeReport(n, mean, cv, "tonic", spikes)
    bursts = ()
    lo, hi = isi.min(), isi.max()
    label = "chaotic-bursting" if cv >= chaotic_cv_min else "irregular"
    if hi / lo >= BURST_GAP_RATIO:
        gap = math.sqrt(lo * hi)
        breaks = np.flatnonzero(isi > gap)
        # interior bursts only: the first and last are cut by the window
        bursts = tuple(int(s) for s in np.diff(breaks))
        inter = isi[breaks]
        inter_cv = float(inter.std() / inter.mean()) if inter.size > 1 else 0.0
        if len(bursts) >= 2 and len(set(bursts)) == 1 and inter_cv < tonic_cv_max:
            label = "regular-bursting"
        else:
            label = "chaotic-bursting"
    return RegimeReport(n, mean, cv, label, spikes, bursts)
