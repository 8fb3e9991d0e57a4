"""Run driver: configuration parsing, the outer time loop, diagnostics
and snapshot output, convergence studies, and the fine-mesh 1D reference
solve for the oblique Riemann problem.

Configuration files are flat ``key = value`` text (``#`` comments), e.g.::

    problem = alfven
    nx = 64
    ny = 128
    nz = 1
    end_time = 1.5
    snapshot_times = 0.5 1.0 1.5
    output_dir = out

All keys are optional except ``problem``; defaults come from the problem
setups themselves.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field as dfield, fields, replace

import numpy as np

from . import mhd_core as mc
from . import problems
from .ct import CtConfig, CtState, ct_advance
from .fv_solver import mhd_step, suggest_dt
from .grid import ConfigurationError, Field
from .snapshots import CONSERVED_NAMES, write_snapshot

PROBLEMS = ("alfven", "orszag_tang", "rotated_shock_tube", "cloud_shock",
            "reference_shock_tube")

#: diagnostics CSV column order
DIAG_COLUMNS = ("step", "time", "dt", "max_courant", "max_divb",
                "max_divb_scaled", "total_mass", "total_mx", "total_my",
                "total_mz", "total_energy", "min_rho", "min_press")


@dataclass
class RunConfig:
    """Everything a run needs; ``None`` means "use the problem default"."""

    problem: str = "alfven"
    nx: int = 64
    ny: int = None
    nz: int = None
    phi: float = 0.0          # propagation angles (traveling wave)
    theta: float = 0.0
    scale: float = 1.0        # mesh multiplier (oblique Riemann problem)
    quarter: bool = True      # quarter domain (cloud problem)
    end_time: float = None
    cfl: float = 0.8
    limiter: str = None
    potential_limiter: str = None
    transverse: str = "double"
    energy_option: str = "conserve_total"
    nu: float = None
    eps: float = 1e-8
    snapshot_times: tuple = ()
    output_dir: str = "."
    seed: int = 0             # consumed by randomized property tests only

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ConfigurationError(f"unknown problem {self.problem!r}")
        if not 0.0 < self.cfl <= 1.0:
            raise ConfigurationError("cfl must lie in (0, 1]")


_BOOL = {"true": True, "false": False, "1": True, "0": False,
         "yes": True, "no": False}


def parse_config(text: str) -> RunConfig:
    """Build a RunConfig from flat ``key = value`` lines."""
    types = {f.name: f.type for f in fields(RunConfig)}
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        try:
            if key == "snapshot_times":
                kwargs[key] = tuple(float(t) for t in val.split())
            elif key == "quarter":
                kwargs[key] = _BOOL[val.lower()]
            elif types[key] == "int":
                kwargs[key] = int(val)
            elif types[key] == "float":
                kwargs[key] = float(val)
            else:
                kwargs[key] = val
        except (ValueError, KeyError) as exc:
            raise ConfigurationError(
                f"line {lineno}: bad value for {key!r}: {val!r}") from exc
    return RunConfig(**kwargs)


def load_config(path: str) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def make_setup(cfg: RunConfig) -> problems.ProblemSetup:
    """Instantiate the problem and apply the config's solver overrides."""
    if cfg.problem == "alfven":
        aspec = problems.AlfvenSpec(phi=cfg.phi, theta=cfg.theta)
        ny = cfg.ny if cfg.ny is not None else cfg.nx
        nz = cfg.nz if cfg.nz is not None else ny
        grid = problems.alfven_grid(aspec, cfg.nx, ny, nz)
        setup = problems.alfven_init(aspec, grid)
    elif cfg.problem == "orszag_tang":
        setup = problems.orszag_tang_init(cfg.nx)
    elif cfg.problem == "rotated_shock_tube":
        setup = problems.rotated_shock_tube_init(scale=cfg.scale)
    elif cfg.problem == "cloud_shock":
        ny = cfg.ny if cfg.ny is not None else cfg.nx // 2
        nz = cfg.nz if cfg.nz is not None else ny
        setup = problems.cloud_shock_init(cfg.nx, ny, nz,
                                          quarter=cfg.quarter)
    else:
        setup = problems.reference_shock_tube_init(cfg.nx)
    if cfg.end_time is not None:
        setup = replace(setup, end_time=cfg.end_time)
    if cfg.limiter is not None:
        setup = replace(setup, limiter=cfg.limiter)
    if cfg.potential_limiter is not None:
        setup = replace(setup, potential_limiter=cfg.potential_limiter)
    if cfg.nu is not None:
        setup = replace(setup, nu=cfg.nu)
    return setup


def ct_config(setup: problems.ProblemSetup, cfg: RunConfig) -> CtConfig:
    return CtConfig(bc_q=setup.bc_q, bc_a=setup.bc_a, limiter=setup.limiter,
                    potential_limiter=setup.potential_limiter,
                    transverse=cfg.transverse, nu=setup.nu, eps=cfg.eps,
                    energy_option=cfg.energy_option, gamma=setup.gamma)


def error_norms(numeric: Field, exact: Field):
    """Per-component interior L-infinity and L1 (mean absolute) errors."""
    if numeric.interior.shape != exact.interior.shape:
        raise ConfigurationError("error norms need matching meshes")
    diff = np.abs(numeric.interior - exact.interior)
    flat = diff.reshape(numeric.ncomp, -1)
    return flat.max(axis=1), flat.mean(axis=1)


class _DiagLog:
    """Streaming per-step diagnostics CSV (one row per accepted step)."""

    def __init__(self, path):
        self.rows = []
        self._fh = open(path, "w", newline="") if path else None
        self._writer = None
        if self._fh:
            self._writer = csv.writer(self._fh)
            self._writer.writerow(DIAG_COLUMNS)

    def add(self, step, time, stats):
        row = (step,) + tuple(float(v) for v in (
            time, stats.dt_used, stats.max_courant, stats.max_divb,
            stats.max_divb_scaled, stats.total_mass, *stats.total_momentum,
            stats.total_energy, stats.min_rho, stats.min_press))
        self.rows.append(row)
        if self._writer:
            self._writer.writerow(repr(v) for v in row)

    def close(self):
        if self._fh:
            self._fh.close()


def run(cfg: RunConfig, on_step=None):
    """Advance the configured problem to its end time.

    Writes snapshots at ``cfg.snapshot_times`` (time steps are clipped to
    hit them exactly), a final snapshot, and ``diagnostics.csv``; returns
    the final :class:`CtState` and the list of diagnostics rows.  The
    optional ``on_step(state, stats)`` callback fires after every step.
    """
    setup = make_setup(cfg)
    ccfg = ct_config(setup, cfg)
    state = CtState(setup.q0, setup.a0)
    outdir = cfg.output_dir
    os.makedirs(outdir, exist_ok=True)
    log = _DiagLog(os.path.join(outdir, "diagnostics.csv"))

    def snap_path(t):
        return os.path.join(outdir, f"{cfg.problem}_t{t:.6f}.snap")

    schedule = sorted(t for t in cfg.snapshot_times
                      if t <= setup.end_time + 1e-12)
    if schedule and schedule[0] <= 1e-12:
        write_snapshot(snap_path(0.0), state.q, 0.0, CONSERVED_NAMES)
        schedule = schedule[1:]

    step = 0
    try:
        while state.time < setup.end_time - 1e-12:
            dt = suggest_dt(state.q, cfg.cfl, gamma=setup.gamma)
            limit = schedule[0] if schedule else setup.end_time
            dt = min(dt, limit - state.time, setup.end_time - state.time)
            state, stats = ct_advance(state, dt, ccfg)
            step += 1
            log.add(step, state.time, stats)
            if on_step is not None:
                on_step(state, stats)
            if schedule and state.time >= schedule[0] - 1e-12:
                write_snapshot(snap_path(schedule[0]), state.q, state.time,
                               CONSERVED_NAMES)
                schedule = schedule[1:]
    finally:
        log.close()

    write_snapshot(os.path.join(outdir, f"{cfg.problem}_final.snap"),
                   state.q, state.time, CONSERVED_NAMES)
    if cfg.problem == "rotated_shock_tube":
        write_scatter(os.path.join(outdir, "scatter.csv"), setup, state)
    if cfg.problem == "alfven":
        _write_error_report(os.path.join(outdir, "errors.csv"), cfg, setup,
                            state)
    return state, log.rows


def _write_error_report(path, cfg, setup, state):
    aspec = problems.AlfvenSpec(phi=cfg.phi, theta=cfg.theta)
    qx, ax = problems.alfven_exact(aspec, state.time, setup.grid)
    linf_b, l1_b = error_norms(state.q, qx)
    linf_a, l1_a = error_norms(state.a.field, ax.field)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("variable", "linf", "l1"))
        for c, name in enumerate(CONSERVED_NAMES):
            w.writerow((name, repr(linf_b[c]), repr(l1_b[c])))
        for c, name in enumerate(("Ax", "Ay", "Az")):
            w.writerow((name, repr(linf_a[c]), repr(l1_a[c])))


# ---------------------------------------------------------------------------
# oblique Riemann problem artifacts

SCATTER_COLUMNS = ("xi", "rho", "u_xi", "u_eta", "u_zeta", "p",
                   "B_xi", "B_eta", "B_zeta")


def _rotated_frame_rows(q: Field, xi: np.ndarray, rot, gamma: float):
    """Scatter rows (xi, rotated-frame primitives), sorted by xi."""
    w = mc.cons_to_prim(q.interior, gamma, check=False)
    cm = rot.coord_matrix  # Cartesian vector components -> rotated
    u = [sum(cm[i, j] * w[mc.IMX + j] for j in range(3)) for i in range(3)]
    b = [sum(cm[i, j] * w[mc.IBX + j] for j in range(3)) for i in range(3)]
    cols = np.stack([xi, w[mc.IRHO], u[0], u[1], u[2], w[mc.IE],
                     b[0], b[1], b[2]])
    flat = cols.reshape(len(cols), -1)
    return flat[:, np.argsort(flat[0], kind="stable")].T


def write_scatter(path, setup, state: CtState):
    rot = problems.shock_tube_rotation()
    xi = problems.project_xi(setup.grid, rot)
    rows = _rotated_frame_rows(state.q, xi, rot, setup.gamma)
    _write_csv(path, SCATTER_COLUMNS, rows)


def _write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow(repr(float(v)) for v in row)


def reference_1d(cfg: RunConfig = None, out_path: str = None):
    """Fine-mesh axis-aligned solve of the oblique problem's Riemann data.

    Uses the base finite-volume scheme only: in 1D the normal field
    component is constant, so the potential update adds nothing.  Returns
    the profile as an array with :data:`SCATTER_COLUMNS` columns (here the
    Cartesian components are the tube-frame ones directly), and writes it
    as CSV when ``out_path`` is given.
    """
    cfg = cfg or RunConfig(problem="reference_shock_tube", nx=10000)
    if cfg.problem != "reference_shock_tube":
        cfg = replace(cfg, problem="reference_shock_tube", nx=10000)
    setup = make_setup(cfg)
    q, t = setup.q0, 0.0
    while t < setup.end_time - 1e-12:
        dt = min(suggest_dt(q, cfg.cfl, gamma=setup.gamma),
                 setup.end_time - t)
        q, _ = mhd_step(q, dt, setup.bc_q, limiter=setup.limiter,
                        gamma=setup.gamma)
        t += dt
    x = setup.grid.axis_centers(0)
    w = mc.cons_to_prim(q.interior, setup.gamma, check=False)
    flat = w.reshape(8, -1)
    rows = np.column_stack([x, flat[mc.IRHO], flat[mc.IMX], flat[mc.IMY],
                            flat[mc.IMZ], flat[mc.IE], flat[mc.IBX],
                            flat[mc.IBY], flat[mc.IBZ]])
    if out_path:
        _write_csv(out_path, SCATTER_COLUMNS, rows)
    return rows


# ---------------------------------------------------------------------------
# convergence studies


def convergence(cfg: RunConfig, meshes, out_path: str = None):
    """L-infinity errors of B and A per mesh with observed orders.

    ``meshes`` is a list of nx values; ny/nz follow the config's aspect
    (ny = nx * cfg.ny / cfg.nx when given).  Only the traveling-wave
    problem has the exact solution this needs.  Returns a list of dicts
    with keys mesh, errors (dict variable -> L-infinity), orders (dict
    variable -> float or None for the first mesh / zero errors).
    """
    if cfg.problem != "alfven":
        raise ConfigurationError(
            "convergence study needs a problem with an exact solution")
    variables = tuple(f"B{i}" for i in "123") + tuple(f"A{i}" for i in "123")
    table = []
    def scaled(n, nx):
        # preserve the aspect ratio; collapsed axes stay single cell
        if n is None or n == 1:
            return n
        return max(1, round(n * nx / cfg.nx))

    for nx in meshes:
        sub = replace(cfg, nx=nx, ny=scaled(cfg.ny, nx),
                      nz=scaled(cfg.nz, nx), snapshot_times=())
        setup = make_setup(sub)
        ccfg = ct_config(setup, sub)
        state = CtState(setup.q0, setup.a0)
        while state.time < setup.end_time - 1e-12:
            dt = min(suggest_dt(state.q, sub.cfl, gamma=setup.gamma),
                     setup.end_time - state.time)
            state, _ = ct_advance(state, dt, ccfg)
        aspec = problems.AlfvenSpec(phi=sub.phi, theta=sub.theta)
        qx, ax = problems.alfven_exact(aspec, state.time, setup.grid)
        linf_b, _ = error_norms(state.q, qx)
        linf_a, _ = error_norms(state.a.field, ax.field)
        errs = dict(zip(variables, [*linf_b[mc.IBX:mc.IBX + 3], *linf_a]))
        orders = {}
        for v in variables:
            if table and table[-1]["errors"][v] > 0.0 and errs[v] > 0.0:
                orders[v] = float(np.log2(table[-1]["errors"][v] / errs[v]))
            else:
                orders[v] = None
        table.append({"mesh": nx, "errors": errs, "orders": orders})

    if out_path:
        with open(out_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("mesh",) + tuple(f"err_{v}" for v in variables)
                       + tuple(f"order_{v}" for v in variables))
            for row in table:
                w.writerow([row["mesh"]]
                           + [repr(row["errors"][v]) for v in variables]
                           + [("—" if row["orders"][v] is None
                               else f"{row['orders'][v]:.3f}")
                              for v in variables])
    return table
