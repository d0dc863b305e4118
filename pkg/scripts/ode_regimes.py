"""Sweep the injected current J of the kinetic system and label each regime."""
import argparse

import numpy as np

from stochhr.model import preset
from stochhr.solver import classify_regime, ode_trajectory

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--preset", default="figure-1")
ap.add_argument("--J", type=float, nargs="+", default=[0.0, 1.2, 2.2, 3.1, 3.281])
ap.add_argument("--T", type=float, default=3000.0)
ap.add_argument("--dt", type=float, default=0.01)
ap.add_argument("--transient", type=float, default=1000.0)
args = ap.parse_args()

p = preset(args.preset)
print(f"{'J':>7} {'label':>18} {'spikes':>7} {'ISI mean':>9} {'ISI CV':>8}  bursts")
for J in args.J:
    t, x = ode_trajectory((-1.6, -11.8, 2.0), p, J, args.T, args.dt)
    r = classify_regime(t, x[:, 0], transient_cut=args.transient)
    sizes = sorted(set(r.burst_sizes)) if r.burst_sizes else "-"
    print(f"{J:7.3f} {r.label:>18} {r.spike_count:7d} {r.isi_mean:9.3f} {r.isi_cv:8.3f}  {sizes}")
