"""Command line interface: ``congestfv run`` and ``congestfv verify``.

Exit codes: 0 success, 1 numerical failure (solver or constraint), 2 bad
configuration, 3 failed acceptance criteria.
"""
from __future__ import annotations

import argparse
import configparser
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .cases import CASE_IDS, make_case
from .diagnostics import total_energy
from .errors import CongestionError, ConfigurationError
from .io import (write_diagnostics, write_failure, write_plot_script, write_snapshot,
                 write_summary)
from .kernels import BACKEND
from .oracles import double_shock_middle_state, l1_error
from .params import EtaPolicy, SchemeParams

__all__ = ["main", "build_parser", "run_case"]

EXIT_OK, EXIT_NUMERICAL, EXIT_CONFIG, EXIT_ACCEPTANCE = 0, 1, 2, 3

log = logging.getLogger("congestfv")

# option name -> (type, default); shared by the parser and the INI loader
RUN_OPTIONS = {
    "case": (str, None),
    "eps": (str, None),
    "cells": (str, None),
    "tfinal": (float, None),
    "cfl": (float, 0.9),
    "eta": (str, "local"),
    "out": (str, None),
    "snapshots": (str, None),
    "strict": (bool, False),
    "workers": (int, 1),
}


def _floats(text, what):
    try:
        return [float(s) for s in str(text).split(",") if s.strip()]
    except ValueError:
        raise ConfigurationError(f"cannot parse {what} {text!r} as comma-separated numbers")


def _cells(text):
    if text is None:
        return None
    try:
        parts = [int(s) for s in str(text).lower().replace("x", ",").split(",") if s.strip()]
    except ValueError:
        raise ConfigurationError(f"cannot parse --cells {text!r}")
    if not parts or any(n < 2 for n in parts):
        raise ConfigurationError(f"--cells needs integers >= 2, got {text!r}")
    return parts[0] if len(parts) == 1 else tuple(parts)


def build_parser():
    parser = argparse.ArgumentParser(prog="congestfv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one case for one or more epsilon values")
    run.add_argument("--case", choices=CASE_IDS, default=argparse.SUPPRESS)
    run.add_argument("--eps", default=argparse.SUPPRESS,
                     help="comma-separated epsilon values (default: the case's list)")
    run.add_argument("--cells", default=argparse.SUPPRESS, help="M or MXxMY")
    run.add_argument("--tfinal", type=float, default=argparse.SUPPRESS)
    run.add_argument("--cfl", type=float, default=argparse.SUPPRESS)
    run.add_argument("--eta", default=argparse.SUPPRESS,
                     help="'local' (default), 'adaptive' or a fixed number")
    run.add_argument("--out", default=argparse.SUPPRESS,
                     help="output root (default $CONGESTFV_OUT or ./out)")
    run.add_argument("--snapshots", default=argparse.SUPPRESS,
                     help="comma-separated output times (default: the case's list)")
    run.add_argument("--strict", action="store_true", default=argparse.SUPPRESS,
                     help="treat any energy increase as an error")
    run.add_argument("--workers", type=int, default=argparse.SUPPRESS,
                     help="parallel processes over epsilon values")
    run.add_argument("--config", help="INI file with a [run] section; flags take precedence")
    run.add_argument("--quiet", action="store_true", help="only print errors")

    ver = sub.add_parser("verify", help="run the acceptance criteria")
    ver.add_argument("--criteria", default=None, help="comma-separated subset of 1..11")
    ver.add_argument("--ex5-cells", type=int, default=100)
    ver.add_argument("--ex7-cells", type=int, default=200)
    return parser


def load_config(path):
    """Read the ``[run]`` section of an INI file into typed option values."""
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise ConfigurationError(f"cannot read config file {path!r}")
    if not cp.has_section("run"):
        raise ConfigurationError(f"{path}: missing [run] section")
    out = {}
    for key, raw in cp.items("run"):
        if key not in RUN_OPTIONS:
            raise ConfigurationError(f"{path}: unknown option {key!r}")
        typ = RUN_OPTIONS[key][0]
        try:
            out[key] = cp.getboolean("run", key) if typ is bool else typ(raw)
        except ValueError:
            raise ConfigurationError(f"{path}: bad value for {key}: {raw!r}")
    return out


def resolve_options(ns):
    """Merge defaults, environment, config file and flags (flags win)."""
    opts = {k: d for k, (_, d) in RUN_OPTIONS.items()}
    if os.environ.get("CONGESTFV_OUT"):
        opts["out"] = os.environ["CONGESTFV_OUT"]
    if getattr(ns, "config", None):
        opts.update(load_config(ns.config))
    opts.update({k: v for k, v in vars(ns).items() if k in RUN_OPTIONS})
    if opts["case"] is None:
        raise ConfigurationError("--case is required")
    if opts["case"] not in CASE_IDS:
        raise ConfigurationError(f"unknown case {opts['case']!r}; valid: {', '.join(CASE_IDS)}")
    if opts["out"] is None:
        opts["out"] = "out"
    if opts["workers"] < 1:
        raise ConfigurationError("--workers must be >= 1")
    return opts


def _eps_dir(eps):
    return f"eps_{eps:g}"


def run_case(case_id, eps, cells, tfinal, params, out_root, snapshots=None):
    """Run one ``(case, eps)`` pair and write its output directory.

    Returns ``(exit_code, message)``.
    """
    from .runner import simulate

    run_dir = Path(out_root) / case_id / _eps_dir(eps)
    run_dir.mkdir(parents=True, exist_ok=True)
    failed = run_dir / "FAILED"
    if failed.exists():
        failed.unlink()
    case = make_case(case_id)
    write_plot_script(run_dir, case.dimension)
    try:
        res = simulate(case, eps, cells=cells, t_final=tfinal, params=params, snapshots=snapshots)
    except CongestionError as exc:
        res = getattr(exc, "partial", None)
        if res is not None:
            _write_outputs(run_dir, res, status="failed")
        last = res.reports[-1] if res is not None and res.reports else None
        write_failure(run_dir, exc, step=last.step if last else 0, t=last.t if last else 0.0)
        return EXIT_NUMERICAL, f"{case_id} eps={eps:g}: {type(exc).__name__}: {exc}"
    _write_outputs(run_dir, res, status="ok")
    fin = res.reports[-1]
    return EXIT_OK, (f"{case_id} eps={eps:g}: {res.steps} steps to t={fin.t:.6g}, "
                     f"max rho={fin.max_density:.6f}, energy={fin.total_energy:.6g} -> {run_dir}")


def _write_outputs(run_dir, res, status):
    for st in res.snapshots.values():
        write_snapshot(run_dir, st, res.grid, res.law)
    write_snapshot(run_dir, res.final, res.grid, res.law)
    write_diagnostics(run_dir / "diagnostics.csv", res.reports)
    grid = res.grid
    mesh = [grid.m] if res.case.dimension == 1 else [grid.mx, grid.my]
    last = res.reports[-1] if res.reports else None
    summary = {
        "case": res.case.name, "epsilon": res.eps, "gamma": res.law.gamma, "mesh": mesh,
        "status": status, "steps": res.steps, "t_final": res.final.t,
        "cfl": res.params.cfl, "eta_policy": str(res.params.eta),
        "tol": res.params.tol, "backend": BACKEND,
        "snapshot_times": sorted(res.snapshots),
        "final_max_density": last.max_density if last else None,
        "final_min_density": last.min_density if last else None,
        "final_total_energy": last.total_energy if last else None,
        "final_total_mass": last.total_mass if last else None,
        "initial_total_energy": total_energy(res.initial, res.law, grid).total,
        "max_iterations": max((r.iterations for r in res.reports), default=0),
        "mean_iterations": (sum(r.iterations for r in res.reports) / res.steps
                            if res.reports else 0.0),
        "dt_retries": sum(r.dt_retries for r in res.reports),
    }
    summary.update(oracle_errors(res))
    write_summary(run_dir / "summary.json", summary)


def oracle_errors(res):
    """Errors of the final state against whatever exact reference the case has."""
    case, fin = res.case, res.final
    out = {}
    if case.exact is not None:
        try:
            out["l1_error_density"] = l1_error(fin, case.exact, fin.t, res.grid)
            out["l1_error_velocity"] = l1_error(fin, case.exact, fin.t, res.grid, "velocity")
        except CongestionError:
            pass
    elif case.left_state is not None and case.dimension == 1:
        rstar, _ = double_shock_middle_state(res.law, case.left_state)
        m = fin.rho.size
        plateau = float(np.median(fin.rho[int(0.4 * m):int(0.6 * m)]))
        out["rh_middle_density"] = rstar
        out["plateau_density"] = plateau
        out["plateau_rel_error"] = abs(plateau / rstar - 1.0)
    return out


def _run_job(job):
    return run_case(*job)


def cmd_run(ns):
    opts = resolve_options(ns)
    case = make_case(opts["case"])
    eps_list = _floats(opts["eps"], "--eps") if opts["eps"] else list(case.epsilon_list)
    if not eps_list or any(not e > 0 for e in eps_list):
        raise ConfigurationError("epsilon values must be positive")
    cells = _cells(opts["cells"])
    snaps = _floats(opts["snapshots"], "--snapshots") if opts["snapshots"] else None
    if opts["tfinal"] is not None and not opts["tfinal"] > 0:
        raise ConfigurationError("--tfinal must be positive")
    params = SchemeParams(eta=EtaPolicy.parse(opts["eta"]), cfl=opts["cfl"], strict=opts["strict"])
    # validate mesh/case combination before launching work
    from .runner import build_problem
    build_problem(case, eps_list[0], cells)

    jobs = [(opts["case"], e, cells, opts["tfinal"], params, opts["out"], snaps) for e in eps_list]
    if opts["workers"] > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(opts["workers"], len(jobs))) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = [_run_job(j) for j in jobs]
    code = EXIT_OK
    for rc, msg in results:
        if rc != EXIT_OK:
            print(msg, file=sys.stderr)
            code = rc
        elif not ns.quiet:
            print(msg)
    return code


def cmd_verify(ns):
    from .acceptance import ALL_CRITERIA, run_checks

    crit = ALL_CRITERIA
    if ns.criteria:
        try:
            crit = tuple(int(c) for c in ns.criteria.split(","))
        except ValueError:
            raise ConfigurationError(f"bad --criteria {ns.criteria!r}")
        if any(c not in ALL_CRITERIA for c in crit):
            raise ConfigurationError("criteria must be in 1..11")
    results = run_checks(crit, ex5_cells=ns.ex5_cells, ex7_cells=ns.ex7_cells)
    failed = [r.criterion for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failing: {failed}" if failed else ""))
    return EXIT_ACCEPTANCE if failed else EXIT_OK


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.ERROR if getattr(ns, "quiet", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if ns.command == "run":
            return cmd_run(ns)
        return cmd_verify(ns)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
