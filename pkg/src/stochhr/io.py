"""CSV, binary and manifest writers.

Floats are written with 17 significant digits so that equal numbers always
produce equal bytes; re-running a command with the same configuration
reproduces every CSV byte for byte.
"""
from __future__ import annotations

import hashlib
import struct
from pathlib import Path

import numpy as np

from .errors import DomainError
from .grid import SpatialGrid, StateField

FLOAT_FMT = "%.17g"


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return FLOAT_FMT % x
    return str(x)


def write_csv(path, header, rows, comments=()) -> Path:
    """Write ``rows`` under a column ``header``; ``comments`` become ``#`` lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="\n") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    return path


def read_csv(path):
    """``(comments, header, float array)`` of a file written by :func:`write_csv`."""
    comments, header, data = [], None, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            comments.append(line[1:].strip())
        elif header is None:
            header = line.split(",")
        elif line:
            data.append([float(x) for x in line.split(",")])
    return comments, header, np.array(data, dtype=float).reshape(len(data), len(header or ()))


def numeric_lines(path) -> list[str]:
    """Data rows of a CSV without comments or header: the determinism payload."""
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    return lines[1:]


# ------------------------------------------------------------------ paths

def write_path_csv(path, wiener, t_min=None, t_max=None) -> Path:
    t = wiener.node_times()
    lo = wiener.t_min if t_min is None else t_min
    hi = wiener.t_max if t_max is None else t_max
    m = (t >= lo - 1e-12) & (t <= hi + 1e-12)
    vals = wiener(t[m])
    return write_csv(path, ["t", "W"], zip(t[m], vals),
                     comments=[f"seed = {wiener.seed}", f"horizon = [{lo}, {hi}]",
                               f"dt_grid = {_fmt(wiener.dt_grid)}",
                               f"shift = {_fmt(wiener.shift_offset)}"])


# ----------------------------------------------------------------- fields

def write_field_csv(path, state: StateField) -> Path:
    grid = state.grid
    coords = [c.reshape(-1) for c in grid.centers()]
    names = ["index"] + [f"x{k}" for k in range(grid.dim)] + ["U", "V", "Z"]
    cols = [np.arange(grid.size)] + coords + [grid.flat(f) for f in (state.U, state.V, state.Z)]
    rows = ([int(c[i]) if j == 0 else c[i] for j, c in enumerate(cols)] for i in range(grid.size))
    return write_csv(path, names, rows, comments=[f"grid = {grid.spec()}"])


_MAGIC = b"SHRF"


def write_field_binary(path, state: StateField) -> Path:
    """Header: magic, dim, n_cells[dim] (int64), extents[dim] (float64), all
    little-endian; then U, V, Z as row-major float64 arrays."""
    g = state.grid
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<q", g.dim))
        fh.write(struct.pack(f"<{g.dim}q", *g.n_cells))
        fh.write(struct.pack(f"<{g.dim}d", *g.extents))
        for f in (state.U, state.V, state.Z):
            fh.write(np.ascontiguousarray(f, dtype="<f8").tobytes())
    return path


def read_field_binary(path) -> StateField:
    raw = Path(path).read_bytes()
    if raw[:4] != _MAGIC:
        raise DomainError(f"{path}: not a field snapshot")
    (dim,) = struct.unpack_from("<q", raw, 4)
    off = 12
    cells = struct.unpack_from(f"<{dim}q", raw, off)
    off += 8 * dim
    ext = struct.unpack_from(f"<{dim}d", raw, off)
    off += 8 * dim
    grid = SpatialGrid(dim=dim, extents=ext, n_cells=cells)
    arr = np.frombuffer(raw, dtype="<f8", offset=off).reshape((3,) + grid.shape)
    return StateField.from_array(grid, arr.astype(float))


# ------------------------------------------------------------ trajectories

def write_trajectory_csv(path, traj) -> Path:
    return write_csv(path, ["t", "norm_U", "norm_V", "norm_Z", "norm_grad_G", "Q"],
                     traj.norms(), comments=[f"scheme = {traj.scheme}",
                                             f"dt = {_fmt(traj.dt)}",
                                             f"path_seed = {traj.path_seed}"])


def write_ode_csv(path, times, states, J) -> Path:
    return write_csv(path, ["t", "u", "v", "z"],
                     (np.concatenate([[t], x]) for t, x in zip(times, states)),
                     comments=[f"J = {_fmt(J)}"])


def write_energy_csv(path, records, c1, p, tol) -> Path:
    rows = []
    for r in records:
        grad = c1 * r.grad_U2 + r.grad_V2 + r.grad_Z2
        rows.append((r.t, r.weighted_energy, grad, r.ineq_residual, r.q_t))
    return write_csv(path, ["t", "weighted_energy", "grad_term", "residual", "Q"], rows,
                     comments=[f"tol = {_fmt(tol)}"])


def write_pullback_csv(path, report) -> Path:
    rows = zip(report.pullback_times, report.sup_norms,
               np.full(report.sup_norms.shape, report.R0_used), report.within_bound)
    return write_csv(path, ["t", "sup_norm", "R0", "within_bound"], rows,
                     comments=[f"entry_time = {_fmt(report.entry_time)}",
                               f"tail_variation = {_fmt(report.tail_variation)}"])


def write_bounds_csv(path, bounds) -> Path:
    names = ["r0", "R0", "R1", "K", "C_omega", "P0", "N1", "N2", "N3", "M", "log_M",
             "log_H1", "kappa_tail", "eta"]
    rows = [(n, getattr(bounds, n), bounds.truncation_T, bounds.tail_bound) for n in names]
    return write_csv(path, ["name", "value", "truncation_T", "tail_bound"], rows)


def write_attractor_csv(path, report) -> Path:
    t = report.pullback_times
    rows = zip(t[:-1], t[1:], report.consecutive_distances)
    return write_csv(path, ["t_from", "t_to", "semidistance"], rows,
                     comments=[f"radius = {_fmt(report.radius)}", f"R0 = {_fmt(report.R0)}",
                               f"capped = {int(report.capped)}",
                               f"tail_monotone = {int(report.monotone)}"])


# ------------------------------------------------------------ plotting

def write_gnuplot(path, csv_files: dict) -> Path:
    """A gnuplot script plotting column 2 against column 1 of each CSV."""
    lines = ["set datafile separator ','", "set key autotitle columnhead", "set grid"]
    for title, name in csv_files.items():
        lines += [f"set title '{title}'", f"plot '{Path(name).name}' using 1:2 with lines",
                  "pause -1"]
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


# ------------------------------------------------------------ manifest

def git_blob_hash(data: bytes) -> str:
    """SHA-1 in git's blob framing, as printed by ``git hash-object``."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def write_manifest(path, config_text: str, outputs, hashed_text: str | None = None) -> Path:
    """Config echo, one hash line per output file, and the input content hash.

    The hash covers ``hashed_text`` (default: the whole config echo).
    """
    path = Path(path)
    lines = ["# run manifest", config_text.rstrip("\n")]
    for out in sorted(Path(o) for o in outputs):
        lines.append(f"output.{out.name} = {git_blob_hash(out.read_bytes())}")
    hashed = config_text if hashed_text is None else hashed_text
    lines.append(f"content_hash = {git_blob_hash(hashed.encode())}")
    path.write_text("\n".join(lines) + "\n")
    return path
