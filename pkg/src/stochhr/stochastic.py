"""Two-sided Wiener paths, the Wiener shift and the exponential weight Q.

A :class:`WienerPath` stores one sampled trajectory ``W(t)`` on the lattice
``t_k = k * dt_grid`` covering ``[t_min, t_max]`` with ``W(0) = 0``. Values
between nodes are obtained by linear interpolation. The forward half
``t > 0`` and the backward half ``t < 0`` are drawn from two independent
counter-based (Philox) streams split from the same integer seed, so a wider
horizon only appends samples and never alters the ones already drawn.

The Wiener shift ``(theta_s W)(t) = W(t + s) - W(s)`` is a view: it records
an offset and re-bases at evaluation time, the stored samples are never
touched.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, HorizonError

__all__ = [
    "WienerPath",
    "ScalarSDEResult",
    "stream",
    "sample_path",
    "evaluate",
    "shift",
    "q_weight",
    "sublinear_growth_stat",
    "holder_quotient",
    "integrate_exact_sde",
]

# spawn keys of the counter splits hanging off one seed
FORWARD_STREAM = 0
BACKWARD_STREAM = 1
SAMPLING_STREAM = 2

_NODE_SNAP = 1e-9


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the sub-stream ``key`` of ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def _lattice_count(t: float, dt: float) -> int:
    return int(math.ceil(abs(t) / dt - _NODE_SNAP))


@dataclass(frozen=True, eq=False)
class WienerPath:
    """Sampled two-sided Brownian trajectory.

    ``values[k]`` holds the base path at time ``(k - n_back) * dt_grid``.
    ``shift_offset`` is the accumulated Wiener shift; every public time
    argument is in shifted coordinates.
    """

    seed: int | None
    dt_grid: float
    values: np.ndarray = field(repr=False)
    n_back: int
    shift_offset: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if vals[self.n_back] != 0.0:
            raise DomainError("base path must vanish at t = 0")

    @classmethod
    def from_values(cls, values, dt_grid: float, n_back: int = 0, seed=None):
        """Wrap explicit lattice values (test doubles, reloaded paths)."""
        return cls(seed=seed, dt_grid=float(dt_grid), values=np.array(values, dtype=float),
                   n_back=int(n_back))

    @property
    def n_nodes(self) -> int:
        return self.values.size

    @property
    def base_times(self) -> np.ndarray:
        return (np.arange(self.n_nodes) - self.n_back) * self.dt_grid

    @property
    def t_min(self) -> float:
        return -self.n_back * self.dt_grid - self.shift_offset

    @property
    def t_max(self) -> float:
        return (self.n_nodes - 1 - self.n_back) * self.dt_grid - self.shift_offset

    def node_times(self) -> np.ndarray:
        """Lattice times in shifted coordinates."""
        return self.base_times - self.shift_offset

    def _base(self, tau):
        """Interpolated base path at base times ``tau`` (no range check)."""
        idx = np.asarray(tau, dtype=float) / self.dt_grid + self.n_back
        near = np.rint(idx)
        idx = np.where(np.abs(idx - near) < _NODE_SNAP, near, idx)
        k = np.clip(np.floor(idx).astype(np.int64), 0, self.n_nodes - 2)
        frac = idx - k
        v = self.values
        return v[k] + frac * (v[k + 1] - v[k])

    def covers(self, a: float, b: float) -> bool:
        tol = _NODE_SNAP * self.dt_grid
        return a >= self.t_min - tol and b <= self.t_max + tol

    def __call__(self, t):
        return evaluate(self, t)


@dataclass(frozen=True)
class ScalarSDEResult:
    times: np.ndarray
    numeric: np.ndarray
    exact: np.ndarray
    max_abs_error: float

    @property
    def max_rel_error(self) -> float:
        return float(np.max(np.abs(self.numeric - self.exact) / np.abs(self.exact)))


def sample_path(seed: int, t_min: float, t_max: float, dt_grid: float) -> WienerPath:
    """Draw a two-sided Wiener path on the lattice covering ``[t_min, t_max]``."""
    if not dt_grid > 0:
        raise DomainError(f"dt_grid must be positive, got {dt_grid}")
    if t_min > 0 or t_max < 0:
        raise DomainError(f"horizon must contain 0, got [{t_min}, {t_max}]")
    n_fwd = _lattice_count(t_max, dt_grid)
    n_back = _lattice_count(t_min, dt_grid)
    sd = math.sqrt(dt_grid)
    fwd = np.cumsum(stream(seed, FORWARD_STREAM).standard_normal(n_fwd) * sd)
    back = np.cumsum(stream(seed, BACKWARD_STREAM).standard_normal(n_back) * sd)
    values = np.concatenate([back[::-1], [0.0], fwd])
    return WienerPath(seed=int(seed), dt_grid=float(dt_grid), values=values, n_back=n_back)


def evaluate(path: WienerPath, t):
    """``W(t)`` by linear interpolation; exact at lattice nodes."""
    t_arr = np.asarray(t, dtype=float)
    if t_arr.size and not path.covers(float(t_arr.min()), float(t_arr.max())):
        raise HorizonError(
            f"t in [{t_arr.min()}, {t_arr.max()}] outside horizon "
            f"[{path.t_min}, {path.t_max}]; resample with a wider horizon")
    off = path.shift_offset
    out = path._base(t_arr + off)
    if off != 0.0:
        out = out - path._base(off)
    return float(out) if out.ndim == 0 else out


def shift(path: WienerPath, s: float) -> WienerPath:
    """The shifted path ``theta_s W``: ``t -> W(t + s) - W(s)``."""
    if not path.covers(s, s):
        raise HorizonError(
            f"shift {s} leaves the stored horizon [{path.t_min}, {path.t_max}]; "
            "resample with a wider horizon")
    return replace(path, shift_offset=path.shift_offset + float(s))


def q_weight(path: WienerPath, eps: float, t):
    """``Q(t) = exp(-eps * W(t))``."""
    if eps < 0:
        raise DomainError("noise intensity must be non-negative")
    w = evaluate(path, t)
    if eps == 0:
        return np.ones_like(w) if isinstance(w, np.ndarray) else 1.0
    return np.exp(-eps * w) if isinstance(w, np.ndarray) else math.exp(-eps * w)


def sublinear_growth_stat(path: WienerPath, t_tail: float, side: str = "both") -> float:
    """``max |W(t)| / |t|`` over lattice nodes with ``|t| >= t_tail``.

    ``side`` restricts to ``"negative"`` or ``"positive"`` times.
    """
    if not t_tail > 0:
        raise DomainError("t_tail must be positive")
    t = path.node_times()
    mask = np.abs(t) >= t_tail * (1 - _NODE_SNAP)
    if side == "negative":
        mask &= t < 0
    elif side == "positive":
        mask &= t > 0
    elif side != "both":
        raise DomainError(f"unknown side {side!r}")
    if not mask.any():
        raise DomainError(f"no lattice node with |t| >= {t_tail} on the {side} side")
    t = t[mask]
    return float(np.max(np.abs(evaluate(path, t)) / np.abs(t)))


def holder_quotient(path: WienerPath, gamma: float, window=(0.0, 1.0),
                    stride: int = 1) -> float:
    """Empirical Hölder quotient ``sup |W(t) - W(s)| / |t - s|^gamma``.

    The supremum runs over lattice pairs ``s < t`` inside ``window`` (every
    ``stride``-th node), so it is a lower estimate of the true supremum.
    """
    if not 0.0 < gamma < 0.5:
        raise DomainError(f"gamma must lie in (0, 1/2), got {gamma}")
    a, b = window
    t = path.node_times()[::stride]
    t = t[(t >= a - _NODE_SNAP) & (t <= b + _NODE_SNAP)]
    if t.size < 2:
        raise DomainError("window holds fewer than two lattice nodes")
    w = evaluate(path, t)
    best = 0.0
    for lag in range(1, t.size):
        inc = np.abs(w[lag:] - w[:-lag])
        span = t[lag:] - t[:-lag]
        best = max(best, float(np.max(inc / span ** gamma)))
    return best


def integrate_exact_sde(path: WienerPath, lam: float, t_end: float, dt: float,
                        x0: float = 1.0) -> ScalarSDEResult:
    """Heun scheme for the Stratonovich SDE ``dX = -lam X o dW`` on ``[0, t_end]``.

    The diffusion coefficient is linear, so each predictor-corrector step
    multiplies X by the same amplification factor obtained by stepping
    ``X = 1``; the product is accumulated without a Python loop.
    """
    if not dt > 0:
        raise DomainError("dt must be positive")
    n = int(round(t_end / dt))
    times = np.arange(n + 1) * dt
    w = evaluate(path, times)
    dw = np.diff(w)
    predictor = 1.0 - lam * dw
    factor = 1.0 + 0.5 * (-lam - lam * predictor) * dw
    numeric = x0 * np.concatenate([[1.0], np.cumprod(factor)])
    exact = x0 * np.exp(-lam * w)
    return ScalarSDEResult(times=times, numeric=numeric, exact=exact,
                           max_abs_error=float(np.max(np.abs(numeric - exact))))
