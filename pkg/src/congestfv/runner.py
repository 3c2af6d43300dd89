"""Time integration driver shared by the CLI, the tests and the benchmarks."""
from __future__ import annotations

from dataclasses import dataclass, field

from .cases import CaseDefinition, make_case
from .errors import CongestionError, ConfigurationError
from .grid import MacGrid1D, MacGrid2D, initialize_state, initialize_state2d
from .params import SchemeParams
from .pressure import PressureLaw
from .scheme1d import step
from .scheme2d import step2d

__all__ = ["RunResult", "build_problem", "simulate"]


@dataclass
class RunResult:
    case: CaseDefinition
    eps: float
    grid: object
    law: PressureLaw
    params: SchemeParams
    initial: object
    final: object
    reports: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)

    @property
    def steps(self):
        return len(self.reports)


def build_problem(case, eps, cells=None):
    """Return ``(case, grid, law, initial_state)`` for a case id or definition."""
    if isinstance(case, str):
        case = make_case(case)
    case.check(eps)
    mesh = tuple(cells) if isinstance(cells, (tuple, list)) else cells
    if mesh is None:
        mesh = case.default_mesh
    elif not isinstance(mesh, tuple):
        mesh = (int(mesh),) * case.dimension
    if len(mesh) != case.dimension:
        raise ConfigurationError(f"{case.name} is {case.dimension}D, got mesh {mesh}")
    law = PressureLaw(eps, case.gamma)
    fields = case.fields(eps)
    if case.dimension == 1:
        grid = MacGrid1D(*case.domain, int(mesh[0]))
        state = initialize_state(fields[0], fields[1], grid, breaks=case.breaks[0],
                                 points=case.quad_points)
    else:
        grid = MacGrid2D(*case.domain, int(mesh[0]), int(mesh[1]))
        state = initialize_state2d(*fields, grid, xbreaks=case.breaks[0],
                                   ybreaks=case.breaks[1], points=case.quad_points)
    return case, grid, law, state


def simulate(case, eps, cells=None, t_final=None, params=None, snapshots=None,
             callback=None, max_steps=None) -> RunResult:
    """Integrate ``case`` to ``t_final`` (default: the case's final time).

    Steps are shortened to land exactly on every requested snapshot time.
    ``callback(state, report)`` is called after each accepted step.  On a
    solver or constraint failure the raised exception carries the partial
    :class:`RunResult` as ``exc.partial``.
    """
    case, grid, law, state = build_problem(case, eps, cells)
    params = params or SchemeParams()
    t_end = case.final_time if t_final is None else float(t_final)
    if not t_end > 0:
        raise ConfigurationError(f"final time must be positive, got {t_end!r}")
    times = case.snapshots if snapshots is None else snapshots
    targets = sorted({float(s) for s in times if 0 < s < t_end} | {t_end})
    res = RunResult(case, eps, grid, law, params, state, state)
    if any(s == 0 for s in times):
        res.snapshots[0.0] = state
    advance = step if case.dimension == 1 else step2d
    close = 1e-12 * max(1.0, t_end)
    t = 0.0
    for target in targets:
        while target - t > close:
            if max_steps is not None and len(res.reports) >= max_steps:
                res.final = state
                return res
            try:
                state, rep = advance(state, params, grid, law, dt_cap=target - t,
                                     index=len(res.reports) + 1)
            except CongestionError as exc:
                res.final = state
                exc.partial = res
                raise
            t = state.t
            res.reports.append(rep)
            if callback is not None:
                callback(state, rep)
        res.snapshots[target] = state
    res.final = state
    return res
