"""Why pullback images of the reduction J = alpha = q = 0 converge slowly.

With q = 0 the z equation decouples to z' = -r z, so every trajectory
approaches its limit no faster than exp(-r t). The script integrates the
kinetic system from random starts, fits the late decay rate of |z|, and
estimates the ladder length at which consecutive pullback images would
differ by less than a target distance.
"""
import argparse
import math

import numpy as np

from stochhr.model import equilibria, preset
from stochhr.solver import ode_trajectory

ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
ap.add_argument("--T", type=float, default=4000.0)
ap.add_argument("--target", type=float, default=1e-6)
ap.add_argument("--starts", type=int, default=8)
args = ap.parse_args()

p = preset("dissipative")
print("equilibria:", [tuple(round(c, 4) for c in e) for e in equilibria(p)])
rng = np.random.default_rng(0)
dt = 0.02
for x0 in rng.uniform(-3, 3, (args.starts, 3)):
    t, x = ode_trajectory(x0, p, None, args.T, dt)
    half = len(t) // 2
    z = np.abs(x[half:, 2]) + 1e-300
    rate = -np.polyfit(t[half:], np.log(z), 1)[0]
    dist = np.linalg.norm(x[-1] - x[half])
    need = args.T / 2 + math.log(max(dist, 1e-300) / args.target) / max(rate, 1e-12)
    print(f"start {np.round(x0, 2)} -> {np.round(x[-1], 4)}; |z| decay rate {rate:.5f} "
          f"(r = {p.r}); distance below {args.target:g} near t = {need:.0f}")
