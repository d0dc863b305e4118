"""Command-line entry point.

Every command writes its CSVs, a gnuplot script and ``manifest.txt`` into
``--out``. Exit status: 0 success, 2 configuration error, 3 numerical
failure, 4 diagnostic violation under ``--strict`` (or a failed ``verify``).
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import io
from .errors import ConfigError, DomainError, NumericalError
from .grid import SpatialGrid, StateField
from .model import PRESETS, HRParameters, derived_constants, preset
from .pullback import (DEFAULT_LADDER, DEFAULT_RADIUS_CAP, absorbing_bounds,
                       attractor_approximation, energy_audit, energy_tolerance,
                       verify_absorbing)
from .solver import (DIRECT, TRANSFORMED, classify_regime, ode_trajectory,
                     solve_direct_spde, solve_transformed)
from .stochastic import q_weight, sample_path

COMMANDS = ("ode", "simulate", "pullback", "absorb", "attractor", "verify")
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VIOLATION = 0, 2, 3, 4
PARAM_KEYS = tuple(f.name for f in fields(HRParameters))
ENERGY_PASS_FRACTION = 0.99
# manifest lines that are not configuration, skipped when a manifest is reused
MANIFEST_ONLY = ("content_hash",)
# keys that cannot change any number, left out of the content hash
NON_NUMERIC_KEYS = ("out", "threads", "strict")


@dataclass
class RunConfig:
    """Everything a run depends on. Parameter overrides sit in ``overrides``."""

    command: str = "verify"
    preset: str = "paper-typical"
    overrides: dict = field(default_factory=dict)
    seed: int = 0
    dt: float = 0.01
    grid: str = "1:32:1.0"
    out: str = "out"
    threads: int = 1
    strict: bool = False
    scheme: str = TRANSFORMED
    t0: float = 0.0
    t_end: float = 1.0
    stride: int = 10
    T: float = 3000.0
    transient: float = 1000.0
    x0: tuple = (-1.6, -11.8, 2.0)
    ladder: tuple = DEFAULT_LADDER
    rho: float = 10.0
    n_samples: int = 8
    truncation: float = 40000.0
    quad_dt: float = 0.1
    path_dt: float = 0.01
    radius_cap: float = DEFAULT_RADIUS_CAP
    eta: float = 1.0
    snapshots: bool = False

    def params(self) -> HRParameters:
        return preset(self.preset).with_(**self.overrides)

    def grid_obj(self) -> SpatialGrid:
        return SpatialGrid.from_spec(self.grid)

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; known: {sorted(PRESETS)}")
        if self.scheme not in (TRANSFORMED, DIRECT):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        for name in ("dt", "T", "quad_dt", "path_dt", "radius_cap", "eta", "truncation"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.threads < 1 or self.stride < 1 or self.n_samples < 1:
            raise ConfigError("threads, stride and n_samples must be >= 1")
        if self.rho < 0:
            raise ConfigError("rho must be non-negative")
        if self.t_end < self.t0:
            raise ConfigError("t_end precedes t0")
        if len(self.x0) != 3:
            raise ConfigError("x0 needs three entries")
        try:
            self.params()
            self.grid_obj()
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
        return self


_SCALARS = {f.name: f for f in fields(RunConfig)}


def _parse_value(key, text):
    text = text.strip()
    if key in PARAM_KEYS:
        return float(text)
    proto = getattr(RunConfig(), key)
    if isinstance(proto, bool):
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {text!r}")
    if isinstance(proto, tuple):
        return tuple(float(x) for x in text.split(",") if x.strip())
    if isinstance(proto, int):
        return int(text)
    if isinstance(proto, float):
        return float(text)
    return text


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Merge ``key = value`` lines (``#`` comments) into ``base``."""
    cfg = RunConfig() if base is None else RunConfig(**{**base.__dict__,
                                                         "overrides": dict(base.overrides)})
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in MANIFEST_ONLY or key.startswith("output."):
            continue
        if key == "overrides" or (key not in _SCALARS and key not in PARAM_KEYS):
            raise ConfigError(f"line {n}: unknown key {key!r}")
        try:
            parsed = _parse_value(key, value)
        except ValueError as exc:
            raise ConfigError(f"line {n}: bad value for {key}: {exc}") from exc
        if key in PARAM_KEYS:
            cfg.overrides[key] = parsed
        else:
            setattr(cfg, key, parsed)
    return cfg


def _text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ",".join(repr(float(x)) for x in v)
    return str(v)


def serialize_config(cfg: RunConfig) -> str:
    lines = []
    for f in fields(RunConfig):
        if f.name == "overrides":
            continue
        lines.append(f"{f.name} = {_text(getattr(cfg, f.name))}")
    for key in PARAM_KEYS:
        if key in cfg.overrides:
            lines.append(f"{key} = {_text(float(cfg.overrides[key]))}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ commands

def _path_for(cfg, t_min, t_max):
    return sample_path(cfg.seed, t_min, t_max, cfg.path_dt)


def _initial_state(grid, x0):
    """Cosine-modulated state around ``x0`` (zero normal derivative)."""
    x = grid.centers()[0] / grid.extents[0]
    u, v, z = x0
    return StateField(grid, u + 0.5 * np.cos(np.pi * x), v + np.cos(2 * np.pi * x),
                      z + 0 * x)


def cmd_ode(cfg, out, log):
    p = cfg.params()
    times, states = ode_trajectory(cfg.x0, p, None, cfg.T, cfg.dt)
    rep = classify_regime(times, states[:, 0], transient_cut=cfg.transient)
    files = [io.write_ode_csv(out / "ode.csv", times, states, p.J),
             io.write_csv(out / "regime.csv", ["J", "spike_count", "isi_mean", "isi_cv", "label"],
                          [(p.J, rep.spike_count, rep.isi_mean, rep.isi_cv, rep.label)])]
    log(f"regime: {rep.label} (spikes {rep.spike_count}, ISI CV {rep.isi_cv:.4g})")
    return files, False


def cmd_simulate(cfg, out, log):
    p, grid = cfg.params(), cfg.grid_obj()
    path = _path_for(cfg, min(cfg.t0, 0.0), max(cfg.t_end, 0.0))
    g0 = _initial_state(grid, cfg.x0)
    if cfg.scheme == TRANSFORMED:
        G0 = g0.scaled(q_weight(path, p.eps, cfg.t0))
        traj = solve_transformed(G0, cfg.t0, cfg.t_end, cfg.dt, path, p, grid, cfg.stride)
    else:
        traj = solve_direct_spde(g0, cfg.t0, cfg.t_end, cfg.dt, path, p, grid, cfg.stride)
    files = [io.write_trajectory_csv(out / "trajectory.csv", traj)]
    violation = False
    if len(traj.energy_rows) >= 2:
        tol = energy_tolerance(cfg.dt, p, grid, cfg.eta)
        rows = energy_audit(traj, p, grid, cfg.eta)
        res = np.array([r.ineq_residual for r in rows[1:]])
        frac = float(np.mean(res <= tol))
        violation = frac < ENERGY_PASS_FRACTION
        files.append(io.write_energy_csv(out / "energy.csv", rows, derived_constants(p).c1,
                                         p, tol))
        log(f"energy audit: {frac:.2%} of steps within tol {tol:.3g}")
    if cfg.snapshots:
        for k, (t, s) in enumerate(zip(traj.snapshot_times, traj.states)):
            files.append(io.write_field_binary(out / f"snapshot_{k:05d}.bin", s))
    log(f"final norm {traj.final.norm():.6g} at t={cfg.t_end}")
    return files, violation


def _bounds(cfg, p, grid, path):
    return absorbing_bounds(path, p, grid, cfg.truncation, cfg.quad_dt, cfg.eta)


def cmd_absorb(cfg, out, log):
    p, grid = cfg.params(), cfg.grid_obj()
    path = _path_for(cfg, -cfg.truncation, 0.0)
    b = _bounds(cfg, p, grid, path)
    log(f"r0 = {b.r0:.10g}, R0 = {b.R0:.10g}, tail_bound = {b.tail_bound:.3g}, "
        f"log M = {b.log_M:.6g}")
    return [io.write_bounds_csv(out / "bounds.csv", b)], False


def cmd_pullback(cfg, out, log):
    p, grid = cfg.params(), cfg.grid_obj()
    path = _path_for(cfg, -max(cfg.truncation, max(cfg.ladder)), 0.0)
    b = _bounds(cfg, p, grid, path)
    rep = verify_absorbing(cfg.rho, cfg.n_samples, cfg.ladder, path, cfg.dt, p, grid,
                           bounds=b, threads=cfg.threads)
    log(f"sup norms {np.array2string(rep.sup_norms, precision=5)}; R0 = {b.R0:.6g}; "
        f"entry time {rep.entry_time}; tail variation {rep.tail_variation:.3%}")
    files = [io.write_pullback_csv(out / "pullback.csv", rep),
             io.write_bounds_csv(out / "bounds.csv", b)]
    return files, not bool(rep.within_bound.all())


def cmd_attractor(cfg, out, log):
    p, grid = cfg.params(), cfg.grid_obj()
    path = _path_for(cfg, -max(cfg.truncation, max(cfg.ladder)), 0.0)
    b = _bounds(cfg, p, grid, path)
    rep = attractor_approximation(cfg.n_samples, cfg.ladder, path, cfg.dt, p, grid, R0=b.R0,
                                  radius_cap=cfg.radius_cap, threads=cfg.threads)
    log(f"radius {rep.radius:.6g} (R0 {rep.R0:.6g}, capped {rep.capped}); distances "
        f"{np.array2string(rep.consecutive_distances, precision=5)}; "
        f"tail non-increasing {rep.monotone}")
    cloud = rep.attractor.reshape(rep.attractor.shape[0], -1)
    files = [io.write_attractor_csv(out / "attractor.csv", rep),
             io.write_csv(out / "attractor_cloud.csv",
                          ["sample"] + [f"c{k}" for k in range(cloud.shape[1])],
                          ([k] + list(row) for k, row in enumerate(cloud)))]
    return files, not rep.monotone


def cmd_verify(cfg, out, log):
    from .verification import run_all
    results = run_all(cfg.seed)
    for name, ok, detail in results:
        log(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    f = io.write_csv(out / "verify.csv", ["check", "passed", "detail"],
                     [(n, ok, d.replace(",", ";")) for n, ok, d in results])
    return [f], not all(ok for _, ok, _ in results)


HANDLERS = {"ode": cmd_ode, "simulate": cmd_simulate, "pullback": cmd_pullback,
            "absorb": cmd_absorb, "attractor": cmd_attractor, "verify": cmd_verify}
PLOTS = {"ode.csv": "membrane potential", "trajectory.csv": "norm of U",
         "energy.csv": "weighted energy", "pullback.csv": "sup endpoint norm",
         "attractor.csv": "consecutive semi-distance"}


def run(cfg: RunConfig, log=print) -> int:
    """Execute one command; returns the exit status."""
    try:
        cfg.validate()
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
    except (ConfigError, OSError) as exc:
        log(f"config error: {exc}")
        return EXIT_CONFIG
    try:
        files, violation = HANDLERS[cfg.command](cfg, out, log)
    except (ConfigError, DomainError) as exc:
        log(f"config error: {exc}")
        return EXIT_CONFIG
    except NumericalError as exc:
        log(f"numerical failure: {exc}")
        return EXIT_NUMERICAL
    plots = {PLOTS[f.name]: f for f in files if f.name in PLOTS}
    if plots:
        files.append(io.write_gnuplot(out / "plot.gp", plots))
    text = serialize_config(cfg)
    hashed = "".join(ln + "\n" for ln in text.splitlines()
                     if ln.split(" = ")[0] not in NON_NUMERIC_KEYS)
    io.write_manifest(out / "manifest.txt", text, files, hashed)
    if violation and (cfg.strict or cfg.command == "verify"):
        log("diagnostic violation")
        return EXIT_VIOLATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stochhr", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="flat key = value file; flags override it")
    ap.add_argument("--preset")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--dt", type=float)
    ap.add_argument("--grid", help="dim:cells:extent")
    ap.add_argument("--eps", type=float)
    ap.add_argument("--J", type=float)
    ap.add_argument("--out")
    ap.add_argument("--threads", type=int)
    ap.add_argument("--truncation", type=float)
    ap.add_argument("--strict", action="store_true", default=None)
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="any config key, repeatable")
    return ap


def config_from_args(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig()
    if ns.config:
        try:
            cfg = parse_config(Path(ns.config).read_text(), cfg)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    lines = [f"command = {ns.command}"]
    for key in ("preset", "seed", "dt", "grid", "out", "threads", "truncation", "strict"):
        v = getattr(ns, key)
        if v is not None:
            lines.append(f"{key} = {_text(v) if not isinstance(v, str) else v}")
    for key in ("eps", "J"):
        v = getattr(ns, key)
        if v is not None:
            lines.append(f"{key} = {v!r}")
    lines += ns.set
    return parse_config("\n".join(lines), cfg)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
