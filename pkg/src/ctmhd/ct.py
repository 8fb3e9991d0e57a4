"""Constrained-transport driver: couples the conserved-variable update to
the vector-potential evolution so the magnetic field stays divergence-free.

One :func:`ct_advance` performs
  1. base finite-volume update -> starred state (rho, rho u, E*, B*),
  2. half-time velocity u = (u^n + u^{n+1})/2,
  3. potential advance with that velocity,
  4. B^{n+1} = centered curl of the new potential,
  5. energy closure: keep E* (conserves total energy, default) or shift it
     by the magnetic-energy change (keeps thermal pressure).

The centered curl followed by the centered divergence vanishes identically,
so the divergence diagnostic stays at round-off by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield

import numpy as np

from . import mhd_core as mc
from .fv_solver import StepRejection, mhd_step
from .grid import BoundarySpec, Field, fill_ghost
from .potential import (DiffusionConfig, PotentialField, VelocityField,
                        fill_potential_ghost, strang_step)

ENERGY_OPTIONS = ("conserve_total", "preserve_pressure")

#: grid axis -> array dimension in (ncomp, NZ, NY, NX) blocks
_DIM = {0: 3, 1: 2, 2: 1}


@dataclass
class CtConfig:
    """Everything ct_advance needs besides the state itself."""

    bc_q: BoundarySpec = dfield(default_factory=BoundarySpec)
    bc_a: BoundarySpec = dfield(default_factory=BoundarySpec)
    limiter: str = "mc"
    potential_limiter: str = None  # None -> same as ``limiter``
    transverse: str = "double"
    nu: float = 0.0
    eps: float = 1e-8
    energy_option: str = "conserve_total"
    gamma: float = mc.GAMMA
    entropy_delta: float = 0.0
    mixed_precision: bool = True
    max_retries: int = 10

    def __post_init__(self):
        if self.energy_option not in ENERGY_OPTIONS:
            raise ValueError(f"unknown energy option {self.energy_option!r}")


@dataclass
class CtState:
    """Conserved variables and potential at a common time level."""

    q: Field
    a: PotentialField
    time: float = 0.0

    def copy(self) -> "CtState":
        return CtState(self.q.copy(), self.a.copy(), self.time)


@dataclass
class CtStats:
    """Per-step diagnostics; ``dt_used`` may be below the requested dt
    after rejections."""

    dt_used: float
    retries: int
    max_courant: float
    min_rho: float
    min_press: float
    max_divb: float
    max_divb_scaled: float
    total_mass: float
    total_momentum: tuple
    total_energy: float


def _centered_diff(vals: np.ndarray, axis: int, delta: float) -> np.ndarray:
    """(v[i+1] - v[i-1]) / (2 delta) on the one-ring-trimmed block."""
    dim = _DIM[axis] - 1  # vals is a single component (NZ, NY, NX)
    hi = [slice(1, -1)] * 3
    lo = [slice(1, -1)] * 3
    hi[dim] = slice(2, None)
    lo[dim] = slice(0, -2)
    return (vals[tuple(hi)] - vals[tuple(lo)]) / (2.0 * delta)


def curl_centered(a: PotentialField) -> Field:
    """B = curl A with two-point centered differences over 2*delta.

    ``a`` must be ghost-filled.  The returned field is valid on all cells
    one ring inside the padded block; the outermost ghost ring is zero and
    callers are expected to refill ghosts before using them.
    """
    spec = a.spec
    dx, dy, dz = spec.spacings
    v = a.values
    b = Field(spec, 3)
    core = (slice(1, -1),) * 3
    b.values[0][core] = (_centered_diff(v[2], 1, dy)
                         - _centered_diff(v[1], 2, dz))
    b.values[1][core] = (_centered_diff(v[0], 2, dz)
                         - _centered_diff(v[2], 0, dx))
    b.values[2][core] = (_centered_diff(v[1], 0, dx)
                         - _centered_diff(v[0], 1, dy))
    return b


def discrete_divergence(b) -> np.ndarray:
    """div B with the same centered differences; returns the interior block.

    ``b`` is a 3-component Field with valid values at least one ring
    outside the interior (either ghost-filled or fresh from
    :func:`curl_centered`).
    """
    if not isinstance(b, Field):
        raise TypeError("discrete_divergence needs a Field (for spacings)")
    vals = b.values
    deltas = b.spec.spacings
    g = b.spec.ghost
    acc = (_centered_diff(vals[0], 0, deltas[0])
           + _centered_diff(vals[1], 1, deltas[1])
           + _centered_diff(vals[2], 2, deltas[2]))
    t = g - 1
    return acc[t:-t, t:-t, t:-t] if t else acc


def half_time_velocity(qn: Field, qnp1: Field) -> VelocityField:
    """u^{n+1/2} = (m^n/rho^n + m^{n+1}/rho^{n+1}) / 2, cell by cell.

    Both inputs must be ghost-filled; the result inherits valid ghosts.
    """
    out = Field(qn.spec, 3)
    for q in (qn, qnp1):
        if np.any(q.interior[mc.IRHO] <= 0.0):
            raise mc.AdmissibilityError(
                "nonpositive density in velocity average")
        out.values += q.values[mc.IMX:mc.IMX + 3] / q.values[mc.IRHO]
    out.values *= 0.5
    return VelocityField(out)


def _attempt(state: CtState, dt: float, cfg: CtConfig):
    """One un-retried CT step; raises StepRejection on Courant violation."""
    qstar, stats = mhd_step(state.q, dt, cfg.bc_q, limiter=cfg.limiter,
                            transverse=cfg.transverse, gamma=cfg.gamma,
                            entropy_delta=cfg.entropy_delta,
                            mixed_precision=cfg.mixed_precision)
    qn_filled = fill_ghost(state.q.copy(), cfg.bc_q)
    qs_filled = fill_ghost(qstar, cfg.bc_q)  # fresh local; fill in place
    u_half = half_time_velocity(qn_filled, qs_filled)
    a_new = strang_step(state.a, u_half, dt,
                        limiter=cfg.potential_limiter or cfg.limiter,
                        diff=DiffusionConfig(nu=cfg.nu, eps=cfg.eps),
                        bc=cfg.bc_a)
    return qstar, a_new, stats


def ct_advance(state: CtState, dt: float, cfg: CtConfig):
    """Advance by dt (or less after rejections) and return (state, stats).

    On a step rejection both the conserved variables and the potential
    revert and the whole step retries with dt/2, at most
    ``cfg.max_retries`` times.
    """
    dt_try = dt
    retries = 0
    while True:
        try:
            qstar, a_new, stats = _attempt(state, dt_try, cfg)
            break
        except StepRejection:
            retries += 1
            if retries > cfg.max_retries:
                raise
            dt_try *= 0.5

    bnew = curl_centered(a_new)
    qnew = qstar.copy()
    g = state.q.spec.ghost
    if cfg.energy_option == "preserve_pressure":
        bstar_sq = np.sum(qstar.interior[mc.IBX:mc.IBX + 3] ** 2, axis=0)
        bnew_sq = np.sum(bnew.interior ** 2, axis=0)
        qnew.interior[mc.IE] += 0.5 * (bnew_sq - bstar_sq)
    qnew.interior[mc.IBX:mc.IBX + 3] = bnew.interior

    new_state = CtState(qnew, a_new, state.time + dt_try)

    # the curl is valid one ring inside the padded block, which is exactly
    # the stencil the interior divergence reads; ghost-filled B would mix
    # in boundary-condition data that is not part of the curl identity
    div = discrete_divergence(bnew)
    max_divb = float(np.abs(div).max())
    bmax = float(np.abs(bnew.interior).max())
    dmin = min(state.q.spec.spacings[a] for a in range(3)
               if (state.q.spec.nx, state.q.spec.ny, state.q.spec.nz)[a] > 1)
    scaled = max_divb * dmin / bmax if bmax > 0.0 else 0.0

    interior = qnew.interior
    w = mc.cons_to_prim(interior, cfg.gamma, check=False)
    stats_out = CtStats(
        dt_used=dt_try,
        retries=retries,
        max_courant=stats.max_courant,
        min_rho=float(interior[mc.IRHO].min()),
        min_press=float(w[mc.IE].min()),
        max_divb=max_divb,
        max_divb_scaled=scaled,
        total_mass=float(interior[mc.IRHO].sum()),
        total_momentum=tuple(
            float(interior[c].sum()) for c in range(mc.IMX, mc.IMX + 3)),
        total_energy=float(interior[mc.IE].sum()),
    )
    return new_state, stats_out
