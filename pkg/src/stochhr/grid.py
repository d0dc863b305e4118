"""Cell-centred finite-volume grids on boxes with zero-flux (Neumann) boundaries.

Fields are numpy arrays whose trailing ``dim`` axes match ``n_cells``; any
leading axes are treated as a batch of independent fields. All reductions
go through a flattened ``(..., n_total)`` view so a field produces the same
floating-point result alone or inside a batch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError

__all__ = [
    "SpatialGrid",
    "StateField",
    "neumann_laplacian",
    "l2_norm",
    "h1_seminorm",
    "l4_norm",
    "inner",
    "solve_helmholtz",
]


@dataclass(frozen=True)
class SpatialGrid:
    dim: int
    extents: tuple
    n_cells: tuple

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise DomainError(f"dim must be 1, 2 or 3, got {self.dim}")
        ext = tuple(float(e) for e in np.broadcast_to(self.extents, (self.dim,)))
        n = tuple(int(k) for k in np.broadcast_to(self.n_cells, (self.dim,)))
        if any(not e > 0 or not math.isfinite(e) for e in ext):
            raise DomainError(f"extents must be positive and finite, got {ext}")
        if any(k < 2 for k in n):
            raise DomainError(f"need at least 2 cells per axis, got {n}")
        object.__setattr__(self, "extents", ext)
        object.__setattr__(self, "n_cells", n)

    @classmethod
    def from_spec(cls, spec: str) -> "SpatialGrid":
        """Parse ``"dim:cells:extent"``, e.g. ``"1:32:1.0"``."""
        try:
            dim, cells, extent = spec.split(":")
            return cls(int(dim), float(extent), int(cells))
        except ValueError as exc:
            raise DomainError(f"bad grid spec {spec!r}, expected dim:cells:extent") from exc

    def spec(self) -> str:
        if len(set(self.n_cells)) == 1 and len(set(self.extents)) == 1:
            return f"{self.dim}:{self.n_cells[0]}:{self.extents[0]!r}"
        return f"{self.dim}:{self.n_cells}:{self.extents}"

    @property
    def shape(self) -> tuple:
        return self.n_cells

    @property
    def size(self) -> int:
        return int(np.prod(self.n_cells))

    @property
    def h(self) -> tuple:
        return tuple(e / n for e, n in zip(self.extents, self.n_cells))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    @property
    def measure(self) -> float:
        return float(np.prod(self.extents))

    def centers(self) -> list[np.ndarray]:
        """Cell-centre coordinates, one broadcastable array per axis."""
        axes = [(np.arange(n) + 0.5) * h for n, h in zip(self.n_cells, self.h)]
        return np.meshgrid(*axes, indexing="ij")

    def check(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.ndim < self.dim or f.shape[f.ndim - self.dim:] != self.n_cells:
            raise DomainError(f"field shape {f.shape} does not conform to grid {self.n_cells}")
        return f

    def flat(self, f) -> np.ndarray:
        return f.reshape(f.shape[:f.ndim - self.dim] + (self.size,))


@dataclass(frozen=True, eq=False)
class StateField:
    """The state triple (U, V, Z) on a grid."""

    grid: SpatialGrid
    U: np.ndarray
    V: np.ndarray
    Z: np.ndarray

    def __post_init__(self):
        for name in "UVZ":
            arr = self.grid.check(getattr(self, name))
            if arr.shape != self.grid.shape:
                raise DomainError(f"{name} has shape {arr.shape}, grid is {self.grid.shape}")
            object.__setattr__(self, name, arr)

    @classmethod
    def from_array(cls, grid: SpatialGrid, arr) -> "StateField":
        arr = np.asarray(arr, dtype=float)
        return cls(grid, arr[0].copy(), arr[1].copy(), arr[2].copy())

    @classmethod
    def constant(cls, grid: SpatialGrid, u: float, v: float, w: float) -> "StateField":
        ones = np.ones(grid.shape)
        return cls(grid, u * ones, v * ones, w * ones)

    @classmethod
    def zeros(cls, grid: SpatialGrid) -> "StateField":
        return cls.constant(grid, 0.0, 0.0, 0.0)

    def as_array(self) -> np.ndarray:
        return np.stack([self.U, self.V, self.Z])

    def scaled(self, k: float) -> "StateField":
        return StateField(self.grid, k * self.U, k * self.V, k * self.Z)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.U).all() and np.isfinite(self.V).all()
                    and np.isfinite(self.Z).all())

    def norm(self) -> float:
        return l2_norm(self, self.grid)


def _components(f, grid):
    if isinstance(f, StateField):
        return [f.U, f.V, f.Z]
    return None


def neumann_laplacian(f, grid: SpatialGrid) -> np.ndarray:
    """Second-order Laplacian with ghost-cell reflection at the walls.

    Written as a divergence of face fluxes with zero flux through boundary
    faces, so the stencil is symmetric and sums to zero over the domain.
    """
    return _laplacian(grid.check(f), grid)


def _laplacian(f, grid):
    out = np.zeros_like(f)
    nd = f.ndim
    for k, h in enumerate(grid.h):
        ax = nd - grid.dim + k
        shape = list(f.shape)
        shape[ax] += 1
        flux = np.zeros(shape)
        hi = [slice(None)] * nd
        lo = [slice(None)] * nd
        hi[ax], lo[ax] = slice(1, None), slice(None, -1)
        inner_faces = [slice(None)] * nd
        inner_faces[ax] = slice(1, -1)
        flux[tuple(inner_faces)] = (f[tuple(hi)] - f[tuple(lo)]) / h
        out += (flux[tuple(hi)] - flux[tuple(lo)]) / h
    return out


def _sum(f, grid):
    return grid.flat(f).sum(axis=-1)


def inner(f, g, grid: SpatialGrid):
    """``sum f g h^dim`` over cells (per batch member)."""
    cf, cg = _components(f, grid), _components(g, grid)
    if cf is not None:
        return sum(inner(a, b, grid) for a, b in zip(cf, cg))
    f, g = grid.check(f), grid.check(g)
    return _sum(f * g, grid) * grid.cell_volume


def l2_norm(f, grid: SpatialGrid):
    cf = _components(f, grid)
    if cf is not None:
        return float(np.sqrt(sum(inner(c, c, grid) for c in cf)))
    return np.sqrt(inner(f, f, grid))


def _grad_sq(f, grid):
    f = grid.check(f)
    total = 0.0
    for k, h in enumerate(grid.h):
        ax = f.ndim - grid.dim + k
        g = np.diff(f, axis=ax) / h
        g = g.reshape(g.shape[:f.ndim - grid.dim] + (-1,))
        total = total + (g * g).sum(axis=-1)
    return total * grid.cell_volume


def h1_seminorm(f, grid: SpatialGrid):
    """``||grad f||`` from face differences; boundary faces carry no flux."""
    cf = _components(f, grid)
    if cf is not None:
        return float(np.sqrt(sum(_grad_sq(c, grid) for c in cf)))
    return np.sqrt(_grad_sq(f, grid))


def l4_norm(f, grid: SpatialGrid):
    f = grid.check(f)
    return (_sum(f ** 4, grid) * grid.cell_volume) ** 0.25


def solve_helmholtz(rhs, coef, grid: SpatialGrid, tol: float = 1e-10,
                    maxiter: int | None = None, x0=None):
    """Solve ``(I - coef * Laplacian) x = rhs`` by conjugate gradients.

    ``rhs`` may carry leading batch axes; ``coef`` broadcasts against them
    (one non-negative coefficient per system). Each system iterates until its
    own residual drops below ``tol * ||rhs||`` and is then frozen, so its
    result does not depend on what else is in the batch.

    Returns ``(x, iterations)``.
    """
    rhs = grid.check(rhs)
    lead = rhs.shape[:rhs.ndim - grid.dim]
    m = int(np.prod(lead)) if lead else 1
    n = grid.size
    b = rhs.reshape((m,) + grid.shape)
    kappa = np.broadcast_to(np.asarray(coef, dtype=float), lead).reshape(m)
    if np.any(kappa < 0):
        raise NumericalError("Helmholtz coefficient must be non-negative")
    kb = kappa.reshape((m,) + (1,) * grid.dim)
    maxiter = 10 * n if maxiter is None else maxiter

    def apply(x, kk):
        return x - kk * _laplacian(x, grid)

    def dot(x, y):
        return (x * y).reshape(x.shape[0], n).sum(axis=-1)

    x = (b if x0 is None else np.asarray(x0, dtype=float).reshape(b.shape)).copy()
    r = b - apply(x, kb)
    target = tol * np.sqrt(dot(b, b))
    rr = dot(r, r)
    p = r.copy()
    active = np.sqrt(rr) > target
    it = 0
    while active.any():
        if it >= maxiter:
            raise NumericalError(
                f"conjugate gradients did not converge in {maxiter} iterations",
                residual=np.sqrt(rr[active]).tolist(), target=target[active].tolist(),
                coef=kappa[active].tolist())
        if active.all():
            Ap = apply(p, kb)
            alpha = (rr / dot(p, Ap)).reshape((-1,) + (1,) * grid.dim)
            x += alpha * p
            r -= alpha * Ap
            rr_new = dot(r, r)
            p *= (rr_new / rr).reshape((-1,) + (1,) * grid.dim)
            p += r
            rr = rr_new
            active = np.sqrt(rr) > target
        else:
            idx = np.flatnonzero(active)
            pa = p[idx]
            Ap = apply(pa, kb[idx])
            alpha = rr[idx] / dot(pa, Ap)
            ab = alpha.reshape((-1,) + (1,) * grid.dim)
            x[idx] = x[idx] + ab * pa
            ri = r[idx] - ab * Ap
            r[idx] = ri
            rr_new = dot(ri, ri)
            beta = (rr_new / rr[idx]).reshape((-1,) + (1,) * grid.dim)
            p[idx] = ri + beta * pa
            rr[idx] = rr_new
            active[idx] = np.sqrt(rr_new) > target[idx]
        it += 1
    return x.reshape(rhs.shape), it
