"""Hindmarsh-Rose cocycle, pullback experiments and the estimate chain.

The cocycle is realised through the transformed system: the pullback value
``Phi(t, theta_{-t} w, g0)`` is the state at time 0 of the solution started
at ``-t`` from ``Q(-t) g0``, divided by ``Q(0) = 1``.

The bound evaluators turn the explicit constants of the L2 and H1 energy
estimates into numbers for one sampled path. Improper integrals over
``(-inf, -1]`` are truncated at ``-truncation_T``; the neglected part is
bounded by assuming the path keeps the growth rate ``|W(s)| <= kappa |s|``
observed on ``[t_min, -truncation_T / 2]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalError
from .grid import SpatialGrid, StateField
from .model import HRParameters, derived_constants
from .parallel import ordered_map
from .records import EnergyRecord, TrajectoryRecord
from .solver import TRANSFORMED, integrate_batch, solve_transformed, time_partition
from .stochastic import (SAMPLING_STREAM, WienerPath, evaluate, q_weight, shift, stream,
                         sublinear_growth_stat)

__all__ = [
    "EnergyRecord",
    "TheoreticalBounds",
    "PullbackReport",
    "AttractorReport",
    "H1Report",
    "cocycle_phi",
    "pullback_endpoints",
    "pullback_quasi_trajectory",
    "energy_audit",
    "energy_tolerance",
    "absorbing_bounds",
    "sample_ball",
    "verify_absorbing",
    "hausdorff_semidistance",
    "attractor_approximation",
    "h1_monitor",
]

DEFAULT_LADDER = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0)
DEFAULT_RADIUS_CAP = 100.0
TAIL_RTOL = 0.1


# ---------------------------------------------------------------- cocycle

def _as_batch(states, grid):
    if isinstance(states, StateField):
        states = [states]
    if isinstance(states, np.ndarray):
        arr = np.asarray(states, dtype=float)
        if arr.ndim == 1 + grid.dim:
            arr = arr[None]
        return np.moveaxis(arr, 1, 0)
    return np.stack([s.as_array() for s in states], axis=1)


def pullback_endpoints(states, t: float, path: WienerPath, dt: float,
                       p: HRParameters, grid: SpatialGrid) -> np.ndarray:
    """Pullback images of a batch of initial states.

    ``states`` is a StateField, a list of them, or an array ``(n, 3, *cells)``;
    returns an array ``(n, 3, *cells)``.
    """
    if t < 0:
        raise DomainError("pullback time must be non-negative")
    g0 = _as_batch(states, grid)
    times = time_partition(-t, 0.0, dt)
    Q_start = q_weight(path, p.eps, -t)
    G = integrate_batch(Q_start * g0, times, path, p, grid, TRANSFORMED)
    return np.moveaxis(G / q_weight(path, p.eps, 0.0), 0, 1)


def cocycle_phi(t: float, path: WienerPath, g0: StateField, dt: float,
                p: HRParameters, grid: SpatialGrid, form: str = "pullback") -> StateField:
    """The Hindmarsh-Rose cocycle.

    ``form="pullback"`` returns ``Phi(t, theta_{-t} w, g0)``;
    ``form="forward"`` returns ``Phi(t, w, g0) = G(t; 0, g0) / Q(t)``.
    """
    if t < 0:
        raise DomainError("cocycle time must be non-negative")
    if form == "pullback":
        return StateField.from_array(grid, pullback_endpoints(g0, t, path, dt, p, grid)[0])
    if form == "forward":
        times = time_partition(0.0, t, dt)
        G0 = q_weight(path, p.eps, 0.0) * g0.as_array()
        G = integrate_batch(G0, times, path, p, grid, TRANSFORMED)
        return StateField.from_array(grid, G / q_weight(path, p.eps, t))
    raise DomainError(f"unknown cocycle form {form!r}")


# ------------------------------------------------------------ reports

@dataclass
class PullbackReport:
    pullback_times: np.ndarray
    endpoint_norms: np.ndarray          # (n_ladder, n_samples)
    R0_used: float = float("nan")
    entry_time: float = float("nan")
    converged: bool = False
    successive_distances: np.ndarray = field(default_factory=lambda: np.zeros(0))
    endpoint_states: list | None = None
    meta: dict = field(default_factory=dict)

    @property
    def sup_norms(self) -> np.ndarray:
        return self.endpoint_norms.max(axis=1)

    @property
    def within_bound(self) -> np.ndarray:
        return self.sup_norms <= self.R0_used

    @property
    def tail_variation(self) -> float:
        """``(max - min) / max`` of the sup norms over the ladder tail."""
        tail = self.sup_norms[tail_start(self.sup_norms.size):]
        return float((tail.max() - tail.min()) / tail.max())


def _norms(batch, grid):
    flat = batch.reshape(batch.shape[0], -1)
    return np.sqrt((flat * flat).sum(axis=1) * grid.cell_volume)


def _entry_time(times, sups, R):
    ok = sups <= R
    for k in range(len(times)):
        if ok[k:].all():
            return float(times[k])
    return float("nan")


def pullback_quasi_trajectory(g0: StateField, t_ladder, path: WienerPath, dt: float,
                              p: HRParameters, grid: SpatialGrid, tol: float = 1e-6,
                              threads: int = 1, keep_states: bool = True) -> PullbackReport:
    """Pullback images of one initial state for every ladder time."""
    ladder = np.asarray(t_ladder, dtype=float)
    if ladder.size == 0 or np.any(np.diff(ladder) < 0):
        raise DomainError("ladder must be a non-empty non-decreasing sequence")
    if not path.covers(-ladder.max(), 0.0):
        raise DomainError(f"path horizon does not cover [-{ladder.max()}, 0]")

    def task(t):
        try:
            return pullback_endpoints(g0, t, path, dt, p, grid)[0]
        except NumericalError as exc:
            raise NumericalError(f"ladder entry t={t}: {exc}", t=exc.t, **exc.diagnostics) from exc

    ends = np.stack(ordered_map(task, ladder, threads))
    norms = _norms(ends, grid)
    dists = _norms(np.diff(ends, axis=0), grid) if len(ends) > 1 else np.zeros(0)
    converged = bool(dists.size and dists[-1] < tol)
    states = [StateField.from_array(grid, e) for e in ends] if keep_states else None
    return PullbackReport(pullback_times=ladder, endpoint_norms=norms[:, None],
                          converged=converged, successive_distances=dists,
                          endpoint_states=states)


# -------------------------------------------------------------- energy

def energy_tolerance(dt: float, p: HRParameters, grid: SpatialGrid, eta: float = 1.0) -> float:
    """Admissible positive residual of the discrete energy inequality.

    First order in ``dt``, scaled by the forcing budget of the inequality at
    ``Q = 1``.
    """
    k = derived_constants(p, eta)
    budget = (k.forcing2 + 2.0 * (k.c1 * p.a) ** 4) * grid.measure
    return dt * budget


def energy_audit(traj: TrajectoryRecord, p: HRParameters, grid: SpatialGrid,
                 eta: float = 1.0) -> list[EnergyRecord]:
    """Residual of the L2 energy inequality along a trajectory.

    ``residual = dE/dt + 2 d (c1 |grad U|^2 + |grad V|^2 + |grad Z|^2)
    + (c1 |U|^2 + |V|^2 + r |Z|^2) / 2 - (2 c2 + c1^2/32) Q^2 |Omega|
    - 2 (c1 a)^4 Q^4 |Omega|`` with ``dE/dt`` the backward difference of the
    weighted energy; every other term is taken at the new time level. The
    exact flow has residual <= 0.
    """
    rows = traj.energy_rows
    if len(rows) < 2:
        raise DomainError("energy audit needs at least two recorded steps")
    k = derived_constants(p, eta)
    om = grid.measure
    out = [EnergyRecord(**{**rows[0].__dict__, "ineq_residual": float("nan")})]
    for prev, cur in zip(rows[:-1], rows[1:]):
        h = cur.t - prev.t
        if not h > 0:
            raise DomainError("energy rows must be strictly increasing in time")
        dE = (cur.weighted_energy - prev.weighted_energy) / h
        grad = k.c1 * cur.grad_U2 + cur.grad_V2 + cur.grad_Z2
        damp = 0.5 * (k.c1 * cur.l2_U2 + cur.l2_V2 + p.r * cur.l2_Z2)
        Q = cur.q_t
        force = k.forcing2 * Q ** 2 * om + 2.0 * (k.c1 * p.a) ** 4 * Q ** 4 * om
        res = dE + 2.0 * k.d * grad + damp - force
        out.append(EnergyRecord(**{**cur.__dict__, "ineq_residual": float(res)}))
    return out


# -------------------------------------------------------------- bounds

@dataclass(frozen=True)
class TheoreticalBounds:
    """Evaluated constants of the absorbing and H1 estimates for one path.

    ``r0, R0, C_omega`` are radii/factors; ``R1`` bounds ``||G||^2`` on
    ``[-2, 0]``, ``K`` bounds ``int ||grad G||^2`` over unit windows,
    ``M`` bounds ``||G(0)||_E^2``. ``M`` is typically far beyond double
    range, hence ``log_M``. ``tail_bound`` bounds the truncation error of
    ``r0``.
    """

    r0: float
    R0: float
    R1: float
    K: float
    C_omega: float
    P0: float
    N1: float
    N2: float
    N3: float
    M: float
    log_M: float
    log_H1: float
    truncation_T: float
    tail_bound: float
    kappa_tail: float
    eta: float

    @property
    def H1_bound(self) -> float:
        """``(N1 + N3) exp(N2)``, the bound on ``||grad G||^2``."""
        return _safe_exp(self.log_H1)

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _safe_exp(x):
    return math.exp(x) if x < 709.0 else float("inf")


def _g1_weight(lam, h):
    """``(1/h) int_0^h x e^{lam x} dx``, stable for small ``lam h``."""
    z = lam * h
    if abs(z) < 1e-2:
        term, total = 0.5, 0.5
        for n in range(1, 8):
            term *= z / n
            total += term * 2.0 / (n + 2)
        return h * total
    return math.exp(z) / lam - math.expm1(z) / (lam * z)


def _exp_weighted_integral(path, eps, coefs, lam, a, b, h, chunk=1_000_000):
    """``int_a^b e^{lam (s - b)} (A Q^2 + B Q^4) ds`` with piecewise-linear integrand.

    Nodes run backwards from ``b`` with spacing ``h``; the exponential weight
    is integrated exactly on each panel (exact when ``eps = 0``).
    """
    A, B = coefs
    length = b - a
    n = int(math.floor(length / h + 1e-9))
    nodes = b - np.arange(n + 1) * h
    if length - n * h > 1e-9 * h:
        nodes = np.append(nodes, a)
    else:
        nodes[-1] = a
    widths = -np.diff(nodes)
    total = 0.0
    for lo in range(0, widths.size, chunk):
        hi = min(lo + chunk, widths.size)
        s = nodes[lo:hi + 1]
        q2 = np.exp(-2.0 * eps * evaluate(path, s)) if eps else np.ones_like(s)
        f = A * q2 + B * q2 * q2
        w = widths[lo:hi]
        if lam == 0:
            g0 = w
            g1 = 0.5 * w
        else:
            g0 = np.expm1(lam * w) / lam
            g1 = np.array([_g1_weight(lam, x) for x in np.unique(w)])
            g1 = g1[np.searchsorted(np.unique(w), w)]
        # panel [s_{k+1}, s_k]: weight of left node g0 - g1, right node g1
        scale = np.exp(lam * (s[1:] - b))
        total += float(np.sum(scale * ((g0 - g1) * f[1:] + g1 * f[:-1])))
    if not math.isfinite(total):
        raise NumericalError("bound integrand overflowed; the noise intensity is too "
                             "large for these constants")
    return total


def _trapezoid(path, eps, fn, a, b, h):
    n = max(1, int(round((b - a) / h)))
    s = np.linspace(a, b, n + 1)
    Q = np.exp(-eps * evaluate(path, s)) if eps else np.ones_like(s)
    y = fn(Q)
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(s)))


def absorbing_bounds(path: WienerPath, p: HRParameters, grid: SpatialGrid,
                     truncation_T: float, quad_dt: float, eta: float = 1.0,
                     tail_rtol: float = TAIL_RTOL) -> TheoreticalBounds:
    """Evaluate ``r0, R0, R1, K, C, P0, N1, N2, N3, M`` on one path."""
    if not quad_dt > 0:
        raise DomainError("quad_dt must be positive")
    if not truncation_T > 2:
        raise DomainError("truncation_T must exceed 2")
    if not path.covers(-truncation_T, 0.0):
        raise DomainError(f"path horizon [{path.t_min}, {path.t_max}] does not cover "
                          f"[-{truncation_T}, 0]")
    k = derived_constants(p, eta)
    c1, sig, d, eps = k.c1, k.sigma, k.d, p.eps
    A = k.forcing2
    B = 2.0 * (c1 * p.a) ** 4
    om = grid.measure
    mn, mx = min(c1, 1.0), max(c1, 1.0)

    # int_{-T}^{-1} e^{sigma (1 + s)} [A Q^2 + B Q^4] ds
    I_far = _exp_weighted_integral(path, eps, (A, B), sig, -truncation_T, -1.0, quad_dt)
    kappa = 0.0
    if eps > 0:
        kappa = sublinear_growth_stat(path, truncation_T / 2.0, side="negative")
    lam2, lam4 = sig - 2 * eps * kappa, sig - 4 * eps * kappa
    if lam4 <= 0:
        raise NumericalError(
            f"tail of the absorbing-radius integral does not converge at the observed "
            f"growth rate kappa={kappa:.3g}; increase truncation_T")
    T = truncation_T
    tail_I = math.exp(sig) * (A * math.exp(-lam2 * T) / lam2 + B * math.exp(-lam4 * T) / lam4)
    r0_sq = 1.0 + om / mn * I_far
    r0 = math.sqrt(r0_sq)
    tail_bound = math.sqrt(r0_sq + om / mn * tail_I) - r0
    if tail_bound > tail_rtol * r0:
        raise NumericalError(
            f"truncation tail {tail_bound:.3g} exceeds {tail_rtol:g} * r0; "
            "increase truncation_T", tail_bound=tail_bound, r0=r0)

    def forcing(Q):
        return A * Q ** 2 + B * Q ** 4

    near1 = _trapezoid(path, eps, forcing, -1.0, 0.0, quad_dt)
    near2 = _trapezoid(path, eps, forcing, -2.0, 0.0, quad_dt)
    R0_sq = (mx * r0_sq + om * near1) / (min(1.0, 2 * d) * mn)

    s = path.node_times()
    s = s[(s >= -2.0 - 1e-12) & (s <= 1e-12)]
    s = np.concatenate([s, [-2.0, 0.0]])
    C = math.exp(eps * float(np.max(np.abs(evaluate(path, s)))))

    R1 = mx / mn * r0_sq + om / mn * near2
    qint = _trapezoid(path, eps, lambda Q: Q ** 2 + 2 * Q ** 4, -2.0, 0.0, quad_dt)
    K = (max(c1, 1.0, (2 * k.c2 + c1 ** 2) * om, 2 * (c1 * p.a) ** 4 * om)
         * (R1 + qint) / (2 * d * mn))

    # int_{-inf}^0 e^{sigma s} [...] ds = e^{-sigma} I_far + int_{-1}^0
    near_exp = _exp_weighted_integral(path, eps, (A, B), sig, -1.0, 0.0, quad_dt)
    R_sq = R1 + K
    P0 = mx / mn * R_sq + om / mn * (math.exp(-sig) * I_far + near_exp)
    N1 = (mx * P0 + A * C ** 2 * om + (c1 * p.a) ** 4 * C ** 4 * om) / (2 * d * mn)
    gamma = 2 * eta * C ** 2 * (4 * p.a ** 2 / p.d1 + 2 * p.beta ** 2 / p.d2)
    N2 = gamma * N1
    N3 = (max(2 * p.q ** 2 / p.d3, 4 / p.d1) * P0 + gamma * P0 ** 2
          + C ** 2 * (4 * p.J ** 2 / p.d1 + 2 * p.alpha ** 2 / p.d2
                      + 2 * p.q ** 2 * p.c ** 2 / p.d3) * om)
    log_H1 = math.log(N1 + N3) + N2
    log_M = float(np.logaddexp(math.log(P0), log_H1))
    return TheoreticalBounds(r0=r0, R0=math.sqrt(R0_sq), R1=R1, K=K, C_omega=C, P0=P0,
                             N1=N1, N2=N2, N3=N3, M=_safe_exp(log_M), log_M=log_M,
                             log_H1=log_H1, truncation_T=float(truncation_T),
                             tail_bound=tail_bound, kappa_tail=kappa, eta=float(eta))


# ------------------------------------------------------ absorbing check

def sample_ball(rho: float, n_samples: int, grid: SpatialGrid, seed: int,
                on_sphere_first: bool = True) -> np.ndarray:
    """Random states with ``||g0|| <= rho``, shape ``(n, 3, *cells)``.

    Directions are uniform random fields; radii are ``rho * u^(1/3)`` except
    the first sample, which sits on the sphere ``||g0|| = rho``.
    """
    if rho < 0:
        raise DomainError("rho must be non-negative")
    if rho == 0:
        return np.zeros((1, 3) + grid.shape)
    rng = stream(seed, SAMPLING_STREAM)
    raw = rng.uniform(-1.0, 1.0, size=(n_samples, 3) + grid.shape)
    radii = rho * rng.uniform(0.0, 1.0, size=n_samples) ** (1.0 / 3.0)
    if on_sphere_first:
        radii[0] = rho
    scale = radii / _norms(raw, grid)
    return raw * scale.reshape((-1,) + (1,) * (1 + grid.dim))


def _ladder_images(samples, ladder, path, dt, p, grid, threads):
    def task(t):
        try:
            return pullback_endpoints(samples, t, path, dt, p, grid)
        except NumericalError as exc:
            raise NumericalError(f"ladder entry t={t}: {exc}", t=exc.t, **exc.diagnostics) from exc
    return ordered_map(task, ladder, threads)


def verify_absorbing(rho: float, n_samples: int, t_ladder, path: WienerPath, dt: float,
                     p: HRParameters, grid: SpatialGrid, bounds: TheoreticalBounds | None = None,
                     truncation_T: float | None = None, quad_dt: float = 0.01,
                     threads: int = 1) -> PullbackReport:
    """Empirical check of the absorbing ball ``||g|| <= R0``.

    Violations are reported (``within_bound``), never raised.
    """
    if rho < 0:
        raise DomainError("rho must be non-negative")
    ladder = np.asarray(t_ladder, dtype=float)
    if bounds is None:
        T = truncation_T if truncation_T is not None else -path.t_min
        bounds = absorbing_bounds(path, p, grid, T, quad_dt)
    samples = sample_ball(rho, n_samples, grid, path.seed or 0)
    images = _ladder_images(samples, ladder, path, dt, p, grid, threads)
    norms = np.stack([_norms(im, grid) for im in images])
    sups = norms.max(axis=1)
    dists = np.array([float(_norms(b - a, grid).max()) for a, b in zip(images[:-1], images[1:])])
    return PullbackReport(pullback_times=ladder, endpoint_norms=norms, R0_used=bounds.R0,
                          entry_time=_entry_time(ladder, sups, bounds.R0),
                          converged=bool(dists.size and dists[-1] < 1e-6),
                          successive_distances=dists,
                          meta={"rho": rho, "n_samples": int(samples.shape[0]),
                                "bounds": bounds})


# ------------------------------------------------------ attractor

def _cloud(A, grid):
    if isinstance(A, StateField):
        A = [A]
    if isinstance(A, np.ndarray):
        arr = np.asarray(A, dtype=float)
        return arr[None] if arr.ndim == 1 + grid.dim else arr
    if len(A) == 0:
        raise DomainError("empty set")
    return np.stack([a.as_array() for a in A])


def hausdorff_semidistance(A, B, grid: SpatialGrid) -> float:
    """``max_{a in A} min_{b in B} ||a - b||`` in the L2 norm of the state."""
    a, b = _cloud(A, grid), _cloud(B, grid)
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise DomainError("empty set")
    worst = 0.0
    for x in a:
        worst = max(worst, float(_norms(b - x[None], grid).min()))
    return worst


def tail_start(n: int) -> int:
    """First index of the ladder tail: the second half of ``n`` entries."""
    return n // 2


@dataclass
class AttractorReport:
    pullback_times: np.ndarray
    consecutive_distances: np.ndarray
    radius: float
    R0: float
    capped: bool
    images: list
    monotone: bool

    @property
    def tail_distances(self) -> np.ndarray:
        return self.consecutive_distances[tail_start(self.consecutive_distances.size):]

    @property
    def attractor(self) -> np.ndarray:
        return self.images[-1]


def attractor_approximation(n_samples: int, t_ladder, path: WienerPath, dt: float,
                            p: HRParameters, grid: SpatialGrid, R0: float | None = None,
                            radius_cap: float = DEFAULT_RADIUS_CAP, rtol: float = 0.05,
                            threads: int = 1) -> AttractorReport:
    """Pullback images of a sampled absorbing ball along the ladder.

    The ball radius is ``min(R0, radius_cap)``; consecutive images are
    compared by the Hausdorff semi-distance and ``monotone`` records whether
    the tail of that sequence (its second half) is non-increasing up to the
    relative slack ``rtol``.
    """
    ladder = np.asarray(t_ladder, dtype=float)
    if ladder.size < 3:
        raise DomainError("ladder needs at least three entries")
    if R0 is None:
        R0 = absorbing_bounds(path, p, grid, -path.t_min, 0.01).R0
    radius = min(R0, radius_cap)
    samples = sample_ball(radius, n_samples, grid, path.seed or 0)
    images = _ladder_images(samples, ladder, path, dt, p, grid, threads)
    dists = np.array([hausdorff_semidistance(a, b, grid)
                      for a, b in zip(images[:-1], images[1:])])
    tail = dists[tail_start(dists.size):]
    mono = bool(np.all(tail[1:] <= tail[:-1] * (1 + rtol)))
    return AttractorReport(pullback_times=ladder, consecutive_distances=dists,
                           radius=radius, R0=R0, capped=radius < R0, images=images,
                           monotone=mono)


# ------------------------------------------------------ H1 monitor

@dataclass
class H1Report:
    t_star: float
    sup_grad2: float
    H1_bound: float
    log_H1_bound: float
    E_norm2_at_0: float
    M: float
    log_M: float
    window_integrals: np.ndarray     # (t, int_t^{t+1} ||grad G||^2)
    N1: float
    K: float

    @property
    def grad_within(self) -> bool:
        return self.sup_grad2 == 0 or math.log(self.sup_grad2) <= self.log_H1_bound

    @property
    def E_within(self) -> bool:
        return self.E_norm2_at_0 == 0 or math.log(self.E_norm2_at_0) <= self.log_M

    @property
    def integrals_within_N1(self) -> bool:
        return bool(np.all(self.window_integrals[:, 1] <= self.N1))

    @property
    def integrals_within_K(self) -> bool:
        return bool(np.all(self.window_integrals[:, 1] <= self.K))


def h1_monitor(traj: TrajectoryRecord, bounds: TheoreticalBounds, grid: SpatialGrid) -> H1Report:
    """Compare H1 data of a trajectory over ``[-2, 0]`` with the H1 bounds."""
    t = np.array([r.t for r in traj.energy_rows])
    g2 = np.array([r.grad_G2 for r in traj.energy_rows])
    tol = 1e-9
    if t.size < 2 or t[0] > -2.0 + tol or abs(t[-1]) > tol:
        raise DomainError("trajectory must cover [-2, 0] and end at t = 0")
    win = (t >= -2.0 - tol) & (t <= -1.0 + tol)
    t_star = float(t[win][np.argmin(g2[win])])
    after = t >= t_star + 1.0 - tol
    sup_grad2 = float(g2[after].max())
    last = traj.energy_rows[-1]
    E2 = last.l2_G2 + last.grad_G2

    def integral(a):
        m = (t >= a - tol) & (t <= a + 1.0 + tol)
        return float(np.sum(0.5 * (g2[m][1:] + g2[m][:-1]) * np.diff(t[m])))

    starts = t[win]
    ints = np.array([[a, integral(a)] for a in starts])
    return H1Report(t_star=t_star, sup_grad2=sup_grad2, H1_bound=bounds.H1_bound,
                    log_H1_bound=bounds.log_H1, E_norm2_at_0=E2, M=bounds.M,
                    log_M=bounds.log_M, window_integrals=ints, N1=bounds.N1, K=bounds.K)


def semigroup_pair(g0: StateField, t: float, s: float, path: WienerPath, dt: float,
                   p: HRParameters, grid: SpatialGrid):
    """Both sides of the semigroup identity for pullback maps.

    Returns ``(Pi_t Pi_s g, Pi_{t+s} g)`` for the constant random set
    ``g(w) = g0``: the first applies the pullback map for ``s`` on the path
    shifted by ``-t`` and then the pullback map for ``t``.
    """
    inner_path = shift(path, -t)
    mid = cocycle_phi(s, inner_path, g0, dt, p, grid)
    lhs = cocycle_phi(t, path, mid, dt, p, grid)
    rhs = cocycle_phi(t + s, path, g0, dt, p, grid)
    return lhs, rhs
