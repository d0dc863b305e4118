"""Hindmarsh-Rose parameters, nonlinearities and derived estimate constants."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .errors import DomainError

__all__ = [
    "HRParameters",
    "DerivedConstants",
    "PRESETS",
    "preset",
    "phi",
    "psi",
    "reaction",
    "random_reaction",
    "derived_constants",
    "equilibria",
]


@dataclass(frozen=True)
class HRParameters:
    """The eleven model coefficients plus the noise intensity.

    ``c`` is the reference potential and may have any sign. ``J = 0`` is
    accepted so that the resting regime can be simulated.
    """

    d1: float = 1.0
    d2: float = 1.0
    d3: float = 1.0
    a: float = 3.0
    b: float = 1.0
    alpha: float = 1.0
    beta: float = 5.0
    q: float = 0.0084
    r: float = 0.0021
    J: float = 3.281
    c: float = -1.6
    eps: float = 0.01

    def __post_init__(self):
        for name in ("d1", "d2", "d3", "a", "b", "beta", "r"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        # zero allowed here so the dissipative reduction J = alpha = q = 0 is representable
        for name in ("alpha", "q", "J", "eps"):
            if not getattr(self, name) >= 0:
                raise DomainError(f"{name} must be non-negative, got {getattr(self, name)}")
        for f in fields(self):
            if not np.isfinite(getattr(self, f.name)):
                raise DomainError(f"{f.name} must be finite")

    def with_(self, **changes) -> "HRParameters":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "HRParameters":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise DomainError(f"unknown parameter keys: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in d.items()})


# q = r * S with S = 4; diffusion coefficients and eps are artifact defaults.
# "figure-1" is a calibration: with r = 0.006 and c = -1.56 the kinetic system
# rests at J = 0, spikes tonically at J = 1.2, bursts regularly at J = 2.2 and
# chaotically at J = 3.1.
PRESETS = {
    "paper-typical": HRParameters(),
    "figure-1": HRParameters(r=0.006, q=0.024, c=-1.56),
    "dissipative": HRParameters(J=0.0, alpha=0.0, q=0.0, eps=0.0),
}


def preset(name: str) -> HRParameters:
    try:
        return PRESETS[name]
    except KeyError:
        raise DomainError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class DerivedConstants:
    c1: float
    c2: float
    sigma: float
    d: float
    eta: float

    @property
    def forcing2(self) -> float:
        """Coefficient of ``Q^2 |Omega|`` in the energy inequality."""
        return 2.0 * self.c2 + self.c1 ** 2 / 32.0


def phi(u, p: HRParameters):
    return p.a * u ** 2 - p.b * u ** 3


def psi(u, p: HRParameters):
    return p.alpha - p.beta * u ** 2


def reaction(g, p: HRParameters):
    """Reaction field ``f(u, v, z)``, applied pointwise."""
    u, v, z = g
    return (phi(u, p) + v - z + p.J,
            psi(u, p) - v,
            p.q * (u - p.c) - p.r * z)


def random_reaction(G, Q, p: HRParameters):
    """Reaction of the transformed system for ``G = Q g``.

    Satisfies ``random_reaction(Q g, Q) = Q reaction(g)``.
    """
    if np.any(np.asarray(Q) <= 0):
        raise DomainError("Q must be strictly positive")
    U, V, Z = G
    U2 = U * U
    return ((p.a / Q) * U2 - (p.b / Q ** 2) * U2 * U + V - Z + p.J * Q,
            p.alpha * Q - (p.beta / Q) * U2 - V,
            p.q * (U - p.c * Q) - p.r * Z)


def derived_constants(p: HRParameters, eta: float = 1.0) -> DerivedConstants:
    """Constants of the L2 energy estimate.

    ``c1 = (beta^2 + 3) / b`` balances the quartic terms;
    ``c2 = J^2/2 + [c1^2 (5/2 + 1/r) + q^2/r]^2 + 2 alpha^2 + q^2 c^2 / r``;
    ``sigma = min(1, r) / 2``; ``d = min(d1, d2, d3)``. ``eta`` is the
    L4-H1 embedding constant, a configuration value.
    """
    if not eta > 0:
        raise DomainError("eta must be positive")
    c1 = (p.beta ** 2 + 3.0) / p.b
    bracket = c1 ** 2 * (2.5 + 1.0 / p.r) + p.q ** 2 / p.r
    c2 = 0.5 * p.J ** 2 + bracket ** 2 + 2.0 * p.alpha ** 2 + p.q ** 2 * p.c ** 2 / p.r
    return DerivedConstants(c1=c1, c2=c2, sigma=0.5 * min(1.0, p.r),
                            d=min(p.d1, p.d2, p.d3), eta=float(eta))


def equilibria(p: HRParameters, J: float | None = None) -> list[tuple[float, float, float]]:
    """Real equilibria of the kinetic (space-independent) system.

    Eliminating ``v = psi(u)`` and ``z = q (u - c) / r`` leaves the cubic
    ``-b u^3 + (a - beta) u^2 - (q/r) u + alpha + (q/r) c + J = 0``.
    """
    J = p.J if J is None else J
    s = p.q / p.r
    roots = np.roots([-p.b, p.a - p.beta, -s, p.alpha + s * p.c + J])
    out = []
    for u in sorted(roots[np.abs(roots.imag) < 1e-9].real):
        out.append((float(u), float(psi(u, p)), float(s * (u - p.c))))
    return out
