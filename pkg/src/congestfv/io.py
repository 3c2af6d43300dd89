"""Run outputs: snapshot CSVs, per-step diagnostics, summary and plot script.

Floats are written with ``%.17g`` so every file round-trips exactly, and no
timestamps are recorded, so identical runs produce identical bytes.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .params import StepReport
from .pressure import pressure
from .state import State, State2D

__all__ = [
    "snapshot_name",
    "write_snapshot",
    "read_snapshot",
    "write_diagnostics",
    "read_diagnostics",
    "write_summary",
    "write_failure",
    "write_plot_script",
]

FMT = "%.17g"


def _fmt(x):
    return FMT % x


def snapshot_name(t):
    return f"snapshot_t{t:.6g}"


def _write_table(path, header, columns):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*[np.ravel(c) for c in columns]):
            w.writerow([_fmt(v) for v in row])


def _read_table(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body], dtype=float).reshape(len(body), len(header))
    return {name: data[:, k] for k, name in enumerate(header)}


def write_snapshot(directory, state, grid, law):
    """Write ``<name>.csv`` (cell-centred, for plotting) and ``<name>_raw.csv``.

    The raw file holds the staggered fields exactly as stored and is what
    :func:`read_snapshot` reads back.
    """
    directory = Path(directory)
    base = snapshot_name(state.t)
    p = pressure(state.rho, law)
    if state.dim == 1:
        uc = 0.5 * (state.u + np.roll(state.u, 1))
        _write_table(directory / f"{base}.csv", ["x", "rho", "u", "p"],
                     [grid.centers, state.rho, uc, p])
        _write_table(directory / f"{base}_raw.csv", ["x_cell", "rho", "x_face", "u"],
                     [grid.centers, state.rho, grid.faces, state.u])
    else:
        X, Y = np.meshgrid(grid.xgrid.centers, grid.ygrid.centers, indexing="ij")
        uc = 0.5 * (state.u + np.roll(state.u, 1, axis=0))
        vc = 0.5 * (state.v + np.roll(state.v, 1, axis=1))
        _write_table(directory / f"{base}.csv", ["x", "y", "rho", "u", "v", "p"],
                     [X, Y, state.rho, uc, vc, p])
        I, J = np.meshgrid(np.arange(grid.mx), np.arange(grid.my), indexing="ij")
        _write_table(directory / f"{base}_raw.csv", ["i", "j", "rho", "u", "v"],
                     [I, J, state.rho, state.u, state.v])
    with open(directory / f"{base}.time", "w") as fh:
        fh.write(_fmt(state.t) + "\n")
    return directory / f"{base}.csv"


def read_snapshot(path):
    """Read a state back from a ``*_raw.csv`` file (or its plotting twin)."""
    path = Path(path)
    if not path.name.endswith("_raw.csv"):
        path = path.with_name(path.name.replace(".csv", "_raw.csv"))
    t = float(path.with_name(path.name.replace("_raw.csv", ".time")).read_text())
    cols = _read_table(path)
    if "x_face" in cols:
        return State(t=t, rho=cols["rho"], u=cols["u"])
    mx = int(cols["i"].max()) + 1
    my = int(cols["j"].max()) + 1
    shape = (mx, my)
    return State2D(t=t, rho=cols["rho"].reshape(shape), u=cols["u"].reshape(shape),
                   v=cols["v"].reshape(shape))


def write_diagnostics(path, reports):
    cols = StepReport.columns()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for rep in reports:
            w.writerow([str(v) if isinstance(v, int) else _fmt(v) for v in rep.row()])


def read_diagnostics(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    ints = {"step", "iterations", "dt_retries"}
    return [StepReport(**{k: int(v) if k in ints else float(v) for k, v in r.items()})
            for r in rows]


def _clean(obj):
    """Make floats JSON-safe (NaN/inf become strings) recursively."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_summary(path, summary):
    with open(path, "w") as fh:
        json.dump(_clean(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_failure(directory, exc, step=None, t=None):
    """Write the ``FAILED`` marker next to the partial outputs."""
    rec = {"error": type(exc).__name__, "message": str(exc), "step": step, "t": t}
    write_summary(Path(directory) / "FAILED", rec)


_PLOT = '''"""Plot the snapshots written in this directory (requires matplotlib)."""
import csv
import glob
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
DIM = {dim}


def load(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    data = np.array(rows[1:], dtype=float)
    return {{name: data[:, k] for k, name in enumerate(rows[0])}}


def main():
    files = sorted(f for f in glob.glob(os.path.join(HERE, "snapshot_t*.csv"))
                   if not f.endswith("_raw.csv"))
    for f in files:
        d = load(f)
        name = os.path.splitext(os.path.basename(f))[0]
        if DIM == 1:
            fig, ax = plt.subplots(1, 3, figsize=(12, 3.5))
            ax[0].plot(d["x"], d["rho"], ".-", ms=3)
            ax[0].set_title("density")
            ax[1].plot(d["x"], d["rho"] * d["u"], ".-", ms=3)
            ax[1].set_title("momentum")
            ax[2].plot(d["x"], d["p"], ".-", ms=3)
            ax[2].set_title("pressure")
        else:
            nx = len(np.unique(d["x"]))
            shape = (nx, -1)
            X, Y = d["x"].reshape(shape), d["y"].reshape(shape)
            rho = d["rho"].reshape(shape)
            fig, ax = plt.subplots(figsize=(6, 5))
            pc = ax.pcolormesh(X, Y, rho, shading="auto", cmap="YlOrBr")
            fig.colorbar(pc, ax=ax)
            k = max(1, nx // 25)
            qx = (d["rho"] * d["u"]).reshape(shape)
            qy = (d["rho"] * d["v"]).reshape(shape)
            ax.quiver(X[::k, ::k], Y[::k, ::k], qx[::k, ::k], qy[::k, ::k])
            ax.set_aspect("equal")
        fig.suptitle(name)
        fig.tight_layout()
        fig.savefig(os.path.join(HERE, name + ".png"), dpi=120)
        plt.close(fig)


if __name__ == "__main__":
    main()
'''


def write_plot_script(directory, dim):
    path = Path(directory) / "plot.py"
    path.write_text(_PLOT.format(dim=int(dim)))
    return path
