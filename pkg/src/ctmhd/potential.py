"""Evolution of the magnetic vector potential in the zero-scalar gauge.

The potential obeys A_t + (curl A) x u = 0, which is only weakly
hyperbolic as a frozen-velocity system.  It is advanced by dimensional
Strang splitting: in the sweep along axis k the two components A^l (l != k)
satisfy decoupled scalar transport equations with speed u^k, while the
remaining component A^k is updated with a trapezoidal centered-difference
solve plus an adaptive artificial-diffusion limiter that suppresses the
oscillations the weakly hyperbolic part would otherwise create in the
magnetic field.

All sweeps are vectorized over the transverse indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield

import numpy as np

from .fv_solver import StepRejection, limiter_phi
from .grid import BoundarySpec, ConfigurationError, Field, GridSpec, fill_ghost

#: grid axis -> array dimension in (NZ, NY, NX) component blocks
_CDIM = {0: 2, 1: 1, 2: 0}


@dataclass
class PotentialField:
    """Cell-centered vector potential with an affine/periodic split.

    ``linear_part[c] = (c0, gx, gy, gz)`` describes an affine function
    c0 + gx*x + gy*y + gz*z carried by component c.  Ghost fills apply the
    boundary tags to the remainder (values minus affine) and restore the
    affine part exactly afterwards, so e.g. a periodic tag is usable for
    fields that are periodic only up to a linear ramp.
    """

    field: Field
    linear_part: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.field.ncomp != 3:
            raise ConfigurationError("potential field needs 3 components")
        if self.linear_part is None:
            self.linear_part = np.zeros((3, 4))
        else:
            self.linear_part = np.asarray(self.linear_part, dtype=float)
            if self.linear_part.shape != (3, 4):
                raise ConfigurationError("linear_part must have shape (3,4)")
        self._affine_cache = None

    @property
    def spec(self) -> GridSpec:
        return self.field.spec

    @property
    def values(self) -> np.ndarray:
        return self.field.values

    def copy(self) -> "PotentialField":
        out = PotentialField(self.field.copy(), self.linear_part.copy())
        out._affine_cache = self._affine_cache  # coefficients are immutable
        return out

    def affine_values(self) -> np.ndarray:
        """The affine part sampled at all (ghost-padded) cell centers.

        Cached: the affine coefficients never change during a run (the
        update equations only see differences of the potential).
        """
        if self._affine_cache is not None:
            return self._affine_cache
        spec = self.spec
        x = spec.axis_centers(0, ghost=True)[None, None, :]
        y = spec.axis_centers(1, ghost=True)[None, :, None]
        z = spec.axis_centers(2, ghost=True)[:, None, None]
        out = np.empty((3,) + spec.padded_shape)
        for c in range(3):
            c0, gx, gy, gz = self.linear_part[c]
            out[c] = c0 + gx * x + gy * y + gz * z
        self._affine_cache = out
        return out


@dataclass
class VelocityField:
    """Cell-centered velocity at the half time level, ghost layers filled."""

    field: Field

    def __post_init__(self):
        if self.field.ncomp != 3:
            raise ConfigurationError("velocity field needs 3 components")

    @property
    def values(self) -> np.ndarray:
        return self.field.values


@dataclass
class DiffusionConfig:
    """Artificial-diffusion strength nu in [0, 1/2] and regularization eps."""

    nu: float = 0.0
    eps: float = 1e-8

    def __post_init__(self):
        if not 0.0 <= self.nu <= 0.5:
            raise ConfigurationError("nu must lie in [0, 1/2]")
        if self.eps <= 0.0:
            raise ConfigurationError("eps must be positive")


def fill_potential_ghost(a: PotentialField, bc: BoundarySpec) -> PotentialField:
    """Ghost fill honoring the affine/periodic split."""
    if np.any(a.linear_part != 0.0):
        aff = a.affine_values()
        a.field.values -= aff
        fill_ghost(a.field, bc)
        a.field.values += aff
    else:
        fill_ghost(a.field, bc)
    return a


def hyperbolic_solve_1d(a: np.ndarray, u: np.ndarray, dtau: float, dx: float,
                        limiter: str = "mc") -> np.ndarray:
    """One sweep of the scalar transport solve a_t + u a_x = 0.

    ``a`` and ``u`` are ghost-padded arrays with the sweep axis LAST.
    Waves are neighbor differences W_{i-1/2} = a_i - a_{i-1}; the left and
    right fluctuations use the adjacent cell-centered speeds, and the
    cell-based correction fluxes carry one limiter value phi(theta_i) per
    cell, with theta built from wave differences (second differences of a)
    because the quantity whose oscillations matter is the derivative field.
    Returns a new array; only cells with a full stencil are modified.
    """
    r = dtau / dx
    waves = a[..., 1:] - a[..., :-1]
    uface = 0.5 * (u[..., :-1] + u[..., 1:])

    uc = u[..., 1:-1]                      # cells 1..M-2
    wm = waves[..., :-1]                   # wave at the low face of the cell
    wp = waves[..., 1:]                    # wave at the high face
    out = a.copy()
    out[..., 1:-1] -= r * (np.maximum(uc, 0.0) * wm
                           + np.minimum(uc, 0.0) * wp)

    # cell-based corrections on cells 2..M-3 (full limiter stencil)
    ucc = uc[..., 1:-1]
    dw = wp - wm
    dwc = dw[..., 1:-1]
    dwup = dw[..., :-2]
    dwdn = dw[..., 2:]
    num = np.where(ucc > 0.0, dwup, np.where(ucc < 0.0, dwdn, 0.0))
    theta = np.where(dwc != 0.0, num / np.where(dwc != 0.0, dwc, 1.0), 0.0)
    phi = limiter_phi(theta, limiter)
    fplus = 0.5 * (np.abs(ucc) - r * uface[..., 2:-1] * ucc) \
        * wp[..., 1:-1] * phi
    fminus = 0.5 * (np.abs(ucc) - r * uface[..., 1:-2] * ucc) \
        * wm[..., 1:-1] * phi
    out[..., 2:-2] -= r * (fplus - fminus)
    return out


def weakly_hyperbolic_solve(a_weak: np.ndarray, olds: list, news: list,
                            speeds: list, dtau: float, dx: float) -> np.ndarray:
    """Trapezoidal update of the non-advected component of a sub-problem.

    a_new = a + (dtau/2) * sum_l u_l (D a_l_old + D a_l_new) with D the
    centered difference over 2*dx along the LAST axis.  Only cells with
    both neighbors present are modified.
    """
    out = a_weak.copy()
    acc = np.zeros_like(a_weak[..., 1:-1])
    for u, a_old, a_new in zip(speeds, olds, news):
        dold = (a_old[..., 2:] - a_old[..., :-2]) / (2.0 * dx)
        dnew = (a_new[..., 2:] - a_new[..., :-2]) / (2.0 * dx)
        acc += u[..., 1:-1] * (dold + dnew)
    out[..., 1:-1] += 0.5 * dtau * acc
    return out


def smoothness_alpha(am: np.ndarray, a0: np.ndarray, ap: np.ndarray,
                     eps: float = 1e-8) -> np.ndarray:
    """Discontinuity indicator in [0, 1/2]: ~0 on smooth data, ~1/2 at jumps."""
    al = (eps + (np.asarray(a0) - am) ** 2) ** -2
    ar = (eps + (ap - np.asarray(a0)) ** 2) ** -2
    tot = al + ar
    return np.maximum(np.abs(al / tot - 0.5), np.abs(ar / tot - 0.5))


def apply_diffusion(a_star: np.ndarray, a_old: np.ndarray, dtau: float,
                    dt: float, nu: float, alpha: np.ndarray) -> np.ndarray:
    """Add the limited diffusion 2 (dtau/dt) nu alpha * (second difference
    of the OLD values) along the LAST axis to the starred update."""
    coef = 2.0 * (dtau / dt) * nu * alpha
    if np.any(coef > 0.5 + 1e-12):
        raise ConfigurationError(
            "diffusive limiter outside its stability bound")
    out = a_star.copy()
    out[..., 1:-1] += coef * (a_old[..., :-2] - 2.0 * a_old[..., 1:-1]
                              + a_old[..., 2:])
    return out


def _substep_schedule(dt: float) -> list:
    """Strang sweep sequence (axis, dtau) with adjacent same-axis entries
    merged."""
    raw = [(0, 0.5 * dt), (1, 0.5 * dt), (2, dt), (1, 0.5 * dt),
           (0, 0.5 * dt)]
    merged: list = []
    for ax, tau in raw:
        if merged and merged[-1][0] == ax:
            merged[-1] = (ax, merged[-1][1] + tau)
        else:
            merged.append((ax, tau))
    return merged


def _affine_substep(a: PotentialField, uv: np.ndarray, axis: int,
                    dtau: float):
    """Sweep along an axis the grid does not resolve (a single cell).

    The remainder is constant along such an axis, but the affine part may
    still carry a gradient g_c = d A^c / d axis, so the sub-problem
    reduces to pointwise updates: the advected components lose
    dtau * u_axis * g_c and the weak component gains
    dtau * sum_l u_l * g_l (exact, since the gradients are static).
    """
    grads = a.linear_part[:, 1 + axis]
    if not np.any(grads):
        return
    acc = np.zeros_like(uv[0])
    for c in range(3):
        if c == axis:
            continue
        if grads[c]:
            a.values[c] -= dtau * uv[axis] * grads[c]
            acc += uv[c] * grads[c]
    a.values[axis] += dtau * acc


def strang_step(a: PotentialField, u: VelocityField, dt: float,
                limiter: str = "mc",
                diff: DiffusionConfig = DiffusionConfig(),
                bc: BoundarySpec = None) -> PotentialField:
    """Advance the potential by dt with the split sweep sequence
    L1(dt/2) L2(dt/2) L3(dt) L2(dt/2) L1(dt/2).

    Ghost layers are refreshed before every sweep (and between the
    hyperbolic and weakly hyperbolic halves of a sweep, which needs the
    freshly advected neighbor values).  Velocity ghosts must already be
    valid.  Raises StepRejection when a sweep Courant number exceeds 1.
    """
    if bc is None:
        bc = BoundarySpec()
    spec = a.spec
    counts = (spec.nx, spec.ny, spec.nz)
    out = a.copy()
    uv = u.values
    # restrict sweep arrays to the center plane of collapsed axes (their
    # ghost planes are copies and would multiply the work done per sweep)
    core = tuple(slice(spec.ghost, spec.ghost + 1) if counts[ax] == 1
                 else slice(None) for ax in (2, 1, 0))

    for axis, dtau in _substep_schedule(dt):
        if counts[axis] == 1:
            _affine_substep(out, uv, axis, dtau)
            continue
        dim = _CDIM[axis]
        dx = spec.spacings[axis]
        uax = np.moveaxis(uv[axis][core], dim, -1)
        cmax = float(np.abs(uax).max()) * dtau / dx
        if cmax > 1.0:
            raise StepRejection(
                f"potential sweep Courant {cmax:.3f} > 1 on axis {axis}")

        fill_potential_ghost(out, bc)
        olds = [np.moveaxis(out.values[c][core].copy(), dim, -1)
                for c in range(3)]
        adv = [c for c in range(3) if c != axis]
        for c in adv:
            moved = np.moveaxis(out.values[c][core], dim, -1)
            moved[...] = hyperbolic_solve_1d(olds[c], uax, dtau, dx, limiter)
        fill_potential_ghost(out, bc)

        news = [np.moveaxis(out.values[c][core], dim, -1) for c in adv]
        weak = np.moveaxis(out.values[axis][core], dim, -1)
        star = weakly_hyperbolic_solve(olds[axis], [olds[c] for c in adv],
                                       news, [np.moveaxis(uv[c][core], dim, -1)
                                              for c in adv], dtau, dx)
        if diff.nu > 0.0:
            alpha = smoothness_alpha(olds[axis][..., :-2],
                                     olds[axis][..., 1:-1],
                                     olds[axis][..., 2:], diff.eps)
            star = apply_diffusion(star, olds[axis], dtau, dt, diff.nu, alpha)
        weak[...] = star

    fill_potential_ghost(out, bc)
    out.field.check_finite("potential")
    return out
