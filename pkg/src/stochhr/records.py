"""Plain record types passed between the solver and the pullback tools."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import StateField


@dataclass
class EnergyRecord:
    t: float
    l2_U2: float
    l2_V2: float
    l2_Z2: float
    weighted_energy: float
    grad_U2: float
    grad_V2: float
    grad_Z2: float
    l4_U4: float
    q_t: float
    ineq_residual: float = float("nan")

    @property
    def grad_G2(self) -> float:
        return self.grad_U2 + self.grad_V2 + self.grad_Z2

    @property
    def l2_G2(self) -> float:
        return self.l2_U2 + self.l2_V2 + self.l2_Z2


@dataclass
class TrajectoryRecord:
    """Output of one time integration.

    ``times`` lists every step time; ``states`` holds snapshots taken every
    ``stride`` steps (plus the final state) at ``snapshot_times``.
    ``energy_rows`` has one row per step, computed on the transformed
    variable ``G`` whatever the scheme.
    """

    times: np.ndarray
    snapshot_times: np.ndarray
    states: list
    energy_rows: list
    scheme: str
    dt: float
    path_seed: int | None
    stride: int = 1
    meta: dict = field(default_factory=dict)

    @property
    def final(self) -> StateField:
        return self.states[-1]

    def norms(self) -> np.ndarray:
        """Columns t, ||U||, ||V||, ||Z||, ||grad G||, Q."""
        rows = self.energy_rows
        return np.array([[r.t, np.sqrt(r.l2_U2), np.sqrt(r.l2_V2), np.sqrt(r.l2_Z2),
                          np.sqrt(r.grad_G2), r.q_t] for r in rows])
