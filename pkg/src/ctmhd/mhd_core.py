"""Ideal-MHD state algebra and the eight-wave characteristic decomposition.

States are stacked component-first: an array of shape (8, ...) holds
(rho, mx, my, mz, E, Bx, By, Bz) in conserved form or
(rho, ux, uy, uz, p, Bx, By, Bz) in primitive form.  All functions are
numpy-vectorized over the trailing axes.

The characteristic decomposition uses the eight-wave eigenstructure
(seven MHD waves plus a divergence wave advecting the normal field
component with the flow), evaluated at the arithmetic average of two
primitive states.  The governing equations themselves are always handled
in conservative form; the extra wave only shapes the decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is optional
    _njit = None

GAMMA = 5.0 / 3.0

# component indices in the stacked layout
IRHO = 0
IMX, IMY, IMZ = 1, 2, 3
IE = 4
IBX, IBY, IBZ = 5, 6, 7

#: (normal, tangential-1, tangential-2) Cartesian axes per sweep direction,
#: cyclic so orientation is preserved
AXIS_PERM = {0: (0, 1, 2), 1: (1, 2, 0), 2: (2, 0, 1)}

#: wave ordering within a fan
WAVE_NAMES = ("fast-", "alfven-", "slow-", "entropy", "divergence",
              "slow+", "alfven+", "fast+")


class AdmissibilityError(ValueError):
    """State left the physically admissible set (rho <= 0 etc.)."""


@dataclass
class Conserved:
    """View of a stacked conserved array (rho, rho*u, E, B)."""

    data: np.ndarray

    @property
    def rho(self):
        return self.data[IRHO]

    @property
    def mom(self):
        return self.data[IMX:IMZ + 1]

    @property
    def ener(self):
        return self.data[IE]

    @property
    def bfield(self):
        return self.data[IBX:IBZ + 1]


@dataclass
class Primitive:
    """View of a stacked primitive array (rho, u, p, B)."""

    data: np.ndarray

    @property
    def rho(self):
        return self.data[IRHO]

    @property
    def vel(self):
        return self.data[IMX:IMZ + 1]

    @property
    def press(self):
        return self.data[IE]

    @property
    def bfield(self):
        return self.data[IBX:IBZ + 1]


def cons_to_prim(q: np.ndarray, gamma: float = GAMMA,
                 check: bool = True) -> np.ndarray:
    """Conserved -> primitive.  p = (gamma-1)(E - B^2/2 - rho u^2/2)."""
    rho = q[IRHO]
    if check and np.any(rho <= 0.0):
        idx = np.argwhere(rho <= 0.0)
        raise AdmissibilityError(f"nonpositive density at {idx[0]}")
    w = np.empty_like(q)
    w[IRHO] = rho
    w[IMX:IMZ + 1] = q[IMX:IMZ + 1] / rho
    ke = 0.5 * np.einsum("i...,i...->...", q[IMX:IMZ + 1], w[IMX:IMZ + 1])
    pb = 0.5 * np.einsum("i...,i...->...", q[IBX:IBZ + 1], q[IBX:IBZ + 1])
    w[IE] = (gamma - 1.0) * (q[IE] - ke - pb)
    w[IBX:IBZ + 1] = q[IBX:IBZ + 1]
    return w


def prim_to_cons(w: np.ndarray, gamma: float = GAMMA) -> np.ndarray:
    """Primitive -> conserved; exact inverse of cons_to_prim."""
    q = np.empty_like(w)
    q[IRHO] = w[IRHO]
    q[IMX:IMZ + 1] = w[IRHO] * w[IMX:IMZ + 1]
    ke = 0.5 * w[IRHO] * np.einsum(
        "i...,i...->...", w[IMX:IMZ + 1], w[IMX:IMZ + 1])
    pb = 0.5 * np.einsum("i...,i...->...", w[IBX:IBZ + 1], w[IBX:IBZ + 1])
    q[IE] = w[IE] / (gamma - 1.0) + ke + pb
    q[IBX:IBZ + 1] = w[IBX:IBZ + 1]
    return q


def flux(q: np.ndarray, axis: int, gamma: float = GAMMA,
         w: np.ndarray = None) -> np.ndarray:
    """Axis column of the ideal-MHD flux tensor.

    mass: rho u_n; momentum: rho u u_n + (p + B^2/2) e_n - B B_n;
    energy: u_n (E + p + B^2/2) - B_n (u.B); field: u_n B - B_n u
    (so the normal field flux is exactly zero).  Pass the matching
    primitive array ``w`` to skip the internal conversion.
    """
    if w is None:
        w = cons_to_prim(q, gamma, check=False)
    n, _, _ = AXIS_PERM[axis]
    un = w[IMX + n]
    bn = q[IBX + n]
    p = w[IE]
    pb = 0.5 * np.einsum("i...,i...->...", q[IBX:IBZ + 1], q[IBX:IBZ + 1])
    ptot = p + pb
    udotb = np.einsum("i...,i...->...", w[IMX:IMZ + 1], q[IBX:IBZ + 1])

    f = np.empty_like(q)
    f[IRHO] = q[IMX + n]
    f[IMX:IMZ + 1] = q[IMX:IMZ + 1] * un - q[IBX:IBZ + 1] * bn
    f[IMX + n] += ptot
    f[IE] = un * (q[IE] + ptot) - bn * udotb
    f[IBX:IBZ + 1] = un * q[IBX:IBZ + 1] - bn * w[IMX:IMZ + 1]
    f[IBX + n] = 0.0
    return f


@dataclass
class WaveSpeeds:
    """Characteristic speeds relative to the flow for a unit direction n."""

    a: np.ndarray
    ca: np.ndarray
    cf: np.ndarray
    cs: np.ndarray


def wave_speeds(w: np.ndarray, n, gamma: float = GAMMA) -> WaveSpeeds:
    """Sound, Alfven, fast and slow speeds of a primitive state along n.

    a^2 = gamma p / rho, ca^2 = (B.n)^2 / rho, and cf/cs are the outer and
    inner roots of c^4 - (a^2 + B^2/rho) c^2 + a^2 ca^2 = 0.
    """
    n = np.asarray(n, dtype=float)
    rho = w[IRHO]
    p = w[IE]
    b = w[IBX:IBZ + 1]
    a2 = gamma * p / rho
    bn = np.einsum("i,i...->...", n, b)
    ca2 = bn * bn / rho
    b2 = np.einsum("i...,i...->...", b, b) / rho
    # discriminant written as a sum of squares for round-off safety
    bperp2 = np.maximum(b2 - ca2, 0.0)
    disc = np.sqrt((a2 - b2) ** 2 + 4.0 * a2 * bperp2)
    cf2 = 0.5 * (a2 + b2 + disc)
    cs2 = np.where(cf2 > 0.0, a2 * ca2 / np.maximum(cf2, 1e-300), 0.0)
    return WaveSpeeds(a=np.sqrt(a2), ca=np.sqrt(ca2),
                      cf=np.sqrt(cf2), cs=np.sqrt(cs2))


@dataclass
class WaveFan:
    """Interface f-waves: speeds s^p, waves Z^p, optional limiter ratios."""

    speeds: np.ndarray   # (8, ...)
    fwaves: np.ndarray   # (8, 8, ...): wave index, component, cells
    theta: np.ndarray = None  # type: ignore[assignment]


def _with_batch_axes(vec: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Insert singleton axes after the component axis of ``vec`` so it
    broadcasts against ``v``, which may carry extra batch axes."""
    extra = v.ndim - vec.ndim
    if extra > 0:
        return vec.reshape(vec.shape[:1] + (1,) * extra + vec.shape[1:])
    return vec


# Fused per-cell versions of Eigensystem.project / Eigensystem.combine.
# They compute the same arithmetic as the numpy methods below but in one
# pass over memory, which dominates the solver's runtime.  The numpy
# methods remain the reference implementation (and the fallback when
# numba is absent); the test suite checks the two paths agree.

if _njit is not None:

    @_njit(cache=True, fastmath=True)
    def _combine_kernel(coefs, rho, gp, af, asl, b2, b3, s1, cf, cs, a, sr,
                        ux, uy, uz, bx, by, bz, u2s, gm1,
                        iun, iut1, iut2, ibn, ibt1, ibt2, out):
        nb, n = coefs.shape[1], coefs.shape[2]
        acc = np.empty(8, dtype=coefs.dtype)
        for b in range(nb):
            for i in range(n):
                f_sum = coefs[0, b, i] + coefs[7, b, i]
                f_dif = coefs[7, b, i] - coefs[0, b, i]
                s_sum = coefs[2, b, i] + coefs[5, b, i]
                s_dif = coefs[5, b, i] - coefs[2, b, i]
                a_sum = coefs[1, b, i] + coefs[6, b, i]
                a_dif = coefs[6, b, i] - coefs[1, b, i]
                fast_slow = af[i] * f_sum + asl[i] * s_sum
                acc[0] = rho[i] * fast_slow + coefs[3, b, i]
                acc[iun] = af[i] * cf[i] * f_dif + asl[i] * cs[i] * s_dif
                t_dif = s1[i] * (af[i] * cf[i] * s_dif
                                 - asl[i] * cs[i] * f_dif)
                acc[iut1] = t_dif * b2[i] - b3[i] * a_sum
                acc[iut2] = t_dif * b3[i] + b2[i] * a_sum
                acc[4] = gp[i] * fast_slow
                acc[ibn] = coefs[4, b, i]
                bt = sr[i] * a[i] * (asl[i] * f_sum - af[i] * s_sum)
                acc[ibt1] = bt * b2[i] + s1[i] * sr[i] * b3[i] * a_dif
                acc[ibt2] = bt * b3[i] - s1[i] * sr[i] * b2[i] * a_dif
                out[0, b, i] = acc[0]
                out[1, b, i] = ux[i] * acc[0] + rho[i] * acc[1]
                out[2, b, i] = uy[i] * acc[0] + rho[i] * acc[2]
                out[3, b, i] = uz[i] * acc[0] + rho[i] * acc[3]
                out[4, b, i] = (0.5 * u2s[i] * acc[0]
                                + rho[i] * (ux[i] * acc[1] + uy[i] * acc[2]
                                            + uz[i] * acc[3])
                                + acc[4] / gm1
                                + bx[i] * acc[5] + by[i] * acc[6]
                                + bz[i] * acc[7])
                out[5, b, i] = acc[5]
                out[6, b, i] = acc[6]
                out[7, b, i] = acc[7]

    @_njit(cache=True, fastmath=True)
    def _project_kernel(v, rho, gp, af, asl, b2, b3, s1, cf, cs, a, sr,
                        ux, uy, uz, bx, by, bz, u2s, gm1,
                        iun, iut1, iut2, ibn, ibt1, ibt2, out):
        nb, n = v.shape[1], v.shape[2]
        dw = np.empty(8, dtype=v.dtype)
        for b in range(nb):
            for i in range(n):
                a2i = gp[i] / rho[i]
                v0 = v[0, b, i]
                dw[0] = v0
                dw[1] = (v[1, b, i] - ux[i] * v0) / rho[i]
                dw[2] = (v[2, b, i] - uy[i] * v0) / rho[i]
                dw[3] = (v[3, b, i] - uz[i] * v0) / rho[i]
                dw[4] = gm1 * (0.5 * u2s[i] * v0
                               - (ux[i] * v[1, b, i] + uy[i] * v[2, b, i]
                                  + uz[i] * v[3, b, i])
                               + v[4, b, i]
                               - (bx[i] * v[5, b, i] + by[i] * v[6, b, i]
                                  + bz[i] * v[7, b, i]))
                dw[5] = v[5, b, i]
                dw[6] = v[6, b, i]
                dw[7] = v[7, b, i]
                dun, dut1, dut2 = dw[iun], dw[iut1], dw[iut2]
                dp = dw[4]
                dbt1, dbt2 = dw[ibt1], dw[ibt2]
                nrm = 0.5 / a2i
                ut_s = s1[i] * (b2[i] * dut1 + b3[i] * dut2)
                bt_p = b2[i] * dbt1 + b3[i] * dbt2
                common_f = nrm * (af[i] * dp / rho[i]
                                  + a[i] * asl[i] * bt_p / sr[i])
                odd_f = nrm * (af[i] * cf[i] * dun - asl[i] * cs[i] * ut_s)
                out[0, b, i] = common_f - odd_f
                out[7, b, i] = common_f + odd_f
                common_s = nrm * (asl[i] * dp / rho[i]
                                  - a[i] * af[i] * bt_p / sr[i])
                odd_s = nrm * (asl[i] * cs[i] * dun + af[i] * cf[i] * ut_s)
                out[2, b, i] = common_s - odd_s
                out[5, b, i] = common_s + odd_s
                even_a = 0.5 * (-b3[i] * dut1 + b2[i] * dut2)
                odd_a = 0.5 * s1[i] * (b3[i] * dbt1 - b2[i] * dbt2) / sr[i]
                out[1, b, i] = even_a - odd_a
                out[6, b, i] = even_a + odd_a
                out[3, b, i] = v0 - dp / a2i
                out[4, b, i] = dw[ibn]
else:  # pragma: no cover - numba is optional
    _combine_kernel = None
    _project_kernel = None


class Eigensystem:
    """Eight-wave eigen-decomposition at an averaged primitive state.

    Holds the coefficient fields of the decomposition and applies the left
    and right eigenvector sets matrix-free; explicit (8, 8, ...) stacks are
    available for testing and for the per-wave correction fluxes.
    """

    def __init__(self, wbar: np.ndarray, axis: int, gamma: float = GAMMA):
        self.axis = axis
        self.gamma = gamma
        self.w = wbar
        n, t1, t2 = AXIS_PERM[axis]
        self._iu = (IMX + n, IMX + t1, IMX + t2)
        self._ib = (IBX + n, IBX + t1, IBX + t2)

        rho = wbar[IRHO]
        p = wbar[IE]
        un = wbar[self._iu[0]]
        bn = wbar[self._ib[0]]
        bt1 = wbar[self._ib[1]]
        bt2 = wbar[self._ib[2]]

        self.rho = rho
        self.sqrt_rho = np.sqrt(rho)
        a2 = gamma * p / rho
        self.a2 = a2
        self.a = np.sqrt(a2)
        ca2 = bn * bn / rho
        bperp2 = (bt1 * bt1 + bt2 * bt2) / rho
        b2 = ca2 + bperp2
        disc = np.sqrt((a2 - b2) ** 2 + 4.0 * a2 * bperp2)
        cf2 = 0.5 * (a2 + b2 + disc)
        cs2 = np.where(cf2 > 0.0, a2 * ca2 / np.maximum(cf2, 1e-300), 0.0)
        self.ca = np.sqrt(ca2)
        self.cf = np.sqrt(cf2)
        self.cs = np.sqrt(cs2)

        # Roe-Balsara style normalization factors, clamped at degeneracies:
        # when cf ~ cs the wave families coincide and (1, 0) is continuous
        # in the limit B_perp -> 0 with a > ca.
        d = cf2 - cs2
        tiny = 1e-14 * (a2 + b2) + 1e-300
        af2 = np.where(d > tiny, np.clip((a2 - cs2) / np.where(d > tiny, d, 1.0),
                                         0.0, 1.0), 1.0)
        self.alpha_f = np.sqrt(af2)
        self.alpha_s = np.sqrt(1.0 - af2)

        bperp = np.sqrt(bt1 * bt1 + bt2 * bt2)
        ok = bperp > 1e-14 * np.sqrt(rho * b2 + 1e-300) + 1e-300
        safe = np.where(ok, bperp, 1.0)
        self.beta2 = np.where(ok, bt1 / safe, 1.0)
        self.beta3 = np.where(ok, bt2 / safe, 0.0)
        self.sgn_bn = np.where(bn < 0.0, -1.0, 1.0)

        self.un = un
        self.speeds = np.stack([
            un - self.cf, un - self.ca, un - self.cs, un, un,
            un + self.cs, un + self.ca, un + self.cf])

        u = wbar[IMX:IMZ + 1]
        self._u2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2]
        self._flat = None  # lazy flattened state for the fused kernels

    def _flat_state(self):
        """1D views of the per-cell coefficient fields, kernel order."""
        if self._flat is None:
            w = self.w
            fields = (self.rho, self.gamma * w[IE], self.alpha_f,
                      self.alpha_s, self.beta2, self.beta3, self.sgn_bn,
                      self.cf, self.cs, self.a, self.sqrt_rho,
                      w[IMX], w[IMY], w[IMZ], w[IBX], w[IBY], w[IBZ],
                      self._u2)
            self._flat = tuple(np.ascontiguousarray(f).reshape(-1)
                               for f in fields)
        return self._flat

    def _run_kernel(self, kernel, v):
        """Reshape (8, batch..., cells) <-> (8, B, N) around a fused kernel."""
        ncell = self.rho.ndim
        n = int(np.prod(v.shape[v.ndim - ncell:])) if ncell else 1
        nb = v.size // (8 * n)
        vf = np.ascontiguousarray(v).reshape(8, nb, n)
        out = np.empty_like(vf)
        iun, iut1, iut2 = self._iu
        ibn, ibt1, ibt2 = self._ib
        kernel(vf, *self._flat_state(), self.gamma - 1.0,
               iun, iut1, iut2, ibn, ibt1, ibt2, out)
        return out.reshape(v.shape)

    # -- primitive <-> conserved perturbation maps (matrix-free) ----------

    def _prim_pert_from_cons(self, v: np.ndarray) -> np.ndarray:
        """Apply d(prim)/d(cons) at the average state to a vector field."""
        w = self.w
        g1 = self.gamma - 1.0
        u = w[IMX:IMZ + 1]
        b = w[IBX:IBZ + 1]
        out = np.empty_like(v)
        out[IRHO] = v[IRHO]
        ub = _with_batch_axes(u, v)
        out[IMX:IMZ + 1] = (v[IMX:IMZ + 1] - ub * v[IRHO]) / w[IRHO]
        udm = (u[0] * v[IMX] + u[1] * v[IMY] + u[2] * v[IMZ])
        bdb = (b[0] * v[IBX] + b[1] * v[IBY] + b[2] * v[IBZ])
        out[IE] = g1 * (0.5 * self._u2 * v[IRHO] - udm + v[IE] - bdb)
        out[IBX:IBZ + 1] = v[IBX:IBZ + 1]
        return out

    def _cons_pert_from_prim(self, v: np.ndarray) -> np.ndarray:
        """Apply d(cons)/d(prim) at the average state to a vector field."""
        w = self.w
        u = w[IMX:IMZ + 1]
        b = w[IBX:IBZ + 1]
        out = np.empty_like(v)
        out[IRHO] = v[IRHO]
        ub = _with_batch_axes(u, v)
        out[IMX:IMZ + 1] = ub * v[IRHO] + w[IRHO] * v[IMX:IMZ + 1]
        udv = (u[0] * v[IMX] + u[1] * v[IMY] + u[2] * v[IMZ])
        bdb = (b[0] * v[IBX] + b[1] * v[IBY] + b[2] * v[IBZ])
        out[IE] = (0.5 * self._u2 * v[IRHO] + w[IRHO] * udv
                   + v[IE] / (self.gamma - 1.0) + bdb)
        out[IBX:IBZ + 1] = v[IBX:IBZ + 1]
        return out

    # -- eigenvector applications -----------------------------------------

    def project(self, v: np.ndarray) -> np.ndarray:
        """Left-eigenvector coefficients beta_p = l^p . v of a conserved
        perturbation v; returns shape (8, ...)."""
        if _project_kernel is not None:
            return self._run_kernel(_project_kernel, v)
        return self._project_numpy(v)

    def _project_numpy(self, v: np.ndarray) -> np.ndarray:
        dw = self._prim_pert_from_cons(v)
        iun, iut1, iut2 = self._iu
        ibn, ibt1, ibt2 = self._ib
        drho, dun, dut1, dut2 = dw[IRHO], dw[iun], dw[iut1], dw[iut2]
        dp = dw[IE]
        dbn, dbt1, dbt2 = dw[ibn], dw[ibt1], dw[ibt2]

        af, asl = self.alpha_f, self.alpha_s
        b2v, b3v = self.beta2, self.beta3
        s1 = self.sgn_bn
        a, cf, cs = self.a, self.cf, self.cs
        sr = self.sqrt_rho
        nrm = 0.5 / self.a2

        ut_s = s1 * (b2v * dut1 + b3v * dut2)   # signed tangential proj
        bt_p = b2v * dbt1 + b3v * dbt2

        betas = np.empty((8,) + v.shape[1:], dtype=v.dtype)
        # fast(sigma): N[sigma af cf dun - sigma as cs s1 (b.dut)
        #              + af dp / rho + a as (b.dbt)/sqrt(rho)]
        common_f = nrm * (af * dp / self.rho + a * asl * bt_p / sr)
        odd_f = nrm * (af * cf * dun - asl * cs * ut_s)
        betas[0] = common_f - odd_f          # fast-
        betas[7] = common_f + odd_f          # fast+
        common_s = nrm * (asl * dp / self.rho - a * af * bt_p / sr)
        odd_s = nrm * (asl * cs * dun + af * cf * ut_s)
        betas[2] = common_s - odd_s          # slow-
        betas[5] = common_s + odd_s          # slow+
        # alfven(sigma): 1/2[-b3 dut1 + b2 dut2
        #                + sigma s1 (b3 dbt1 - b2 dbt2)/sqrt(rho)]
        even_a = 0.5 * (-b3v * dut1 + b2v * dut2)
        odd_a = 0.5 * s1 * (b3v * dbt1 - b2v * dbt2) / sr
        betas[1] = even_a - odd_a            # alfven-
        betas[6] = even_a + odd_a            # alfven+
        betas[3] = drho - dp / self.a2       # entropy
        betas[4] = dbn                       # divergence
        return betas

    def right_vectors(self, dtype=float) -> np.ndarray:
        """Conserved-variable right eigenvectors, shape (8, 8, ...)."""
        shape = (8, 8) + self.rho.shape
        r = np.zeros(shape, dtype=dtype)
        iun, iut1, iut2 = self._iu
        ibn, ibt1, ibt2 = self._ib
        af, asl = self.alpha_f, self.alpha_s
        b2v, b3v = self.beta2, self.beta3
        s1 = self.sgn_bn
        a, cf, cs = self.a, self.cf, self.cs
        sr = self.sqrt_rho
        gp = self.gamma * self.w[IE]

        for p, sigma in ((0, -1.0), (7, 1.0)):      # fast
            r[p, IRHO] = self.rho * af
            r[p, iun] = sigma * af * cf
            r[p, iut1] = -sigma * asl * cs * s1 * b2v
            r[p, iut2] = -sigma * asl * cs * s1 * b3v
            r[p, IE] = gp * af
            r[p, ibt1] = sr * a * asl * b2v
            r[p, ibt2] = sr * a * asl * b3v
        for p, sigma in ((1, -1.0), (6, 1.0)):      # alfven
            r[p, iut1] = -b3v
            r[p, iut2] = b2v
            r[p, ibt1] = sigma * s1 * sr * b3v
            r[p, ibt2] = -sigma * s1 * sr * b2v
        for p, sigma in ((2, -1.0), (5, 1.0)):      # slow
            r[p, IRHO] = self.rho * asl
            r[p, iun] = sigma * asl * cs
            r[p, iut1] = sigma * af * cf * s1 * b2v
            r[p, iut2] = sigma * af * cf * s1 * b3v
            r[p, IE] = gp * asl
            r[p, ibt1] = -sr * a * af * b2v
            r[p, ibt2] = -sr * a * af * b3v
        r[3, IRHO] = 1.0                            # entropy
        r[4, ibn] = 1.0                             # divergence

        for p in range(8):
            r[p] = self._cons_pert_from_prim(r[p])
        return r

    def left_vectors(self) -> np.ndarray:
        """Conserved-variable left eigenvectors, shape (8, 8, ...).

        Built by projecting the unit basis; used for testing, not in the
        solver hot path.
        """
        shape = self.rho.shape
        out = np.empty((8, 8) + shape)
        for comp in range(8):
            e = np.zeros((8,) + shape)
            e[comp] = 1.0
            out[:, comp] = self.project(e)
        return out

    def combine(self, coefs: np.ndarray) -> np.ndarray:
        """Sum_p coefs[p] * r^p without materializing the full stack."""
        if _combine_kernel is not None:
            return self._run_kernel(_combine_kernel, coefs)
        return self._combine_numpy(coefs)

    def _combine_numpy(self, coefs: np.ndarray) -> np.ndarray:
        iun, iut1, iut2 = self._iu
        ibn, ibt1, ibt2 = self._ib
        af, asl = self.alpha_f, self.alpha_s
        b2v, b3v = self.beta2, self.beta3
        s1 = self.sgn_bn
        a, cf, cs = self.a, self.cf, self.cs
        sr = self.sqrt_rho
        gp = self.gamma * self.w[IE]

        f_sum = coefs[0] + coefs[7]
        f_dif = coefs[7] - coefs[0]
        s_sum = coefs[2] + coefs[5]
        s_dif = coefs[5] - coefs[2]
        a_sum = coefs[1] + coefs[6]
        a_dif = coefs[6] - coefs[1]

        # coefs may carry extra batch axes between the wave and cell axes
        acc = np.empty((8,) + np.broadcast(self.rho, coefs[0]).shape,
                       dtype=coefs.dtype)
        acc[IRHO] = self.rho * (af * f_sum + asl * s_sum) + coefs[3]
        acc[iun] = af * cf * f_dif + asl * cs * s_dif
        t_dif = s1 * (af * cf * s_dif - asl * cs * f_dif)
        acc[iut1] = t_dif * b2v - b3v * a_sum
        acc[iut2] = t_dif * b3v + b2v * a_sum
        acc[IE] = gp * (af * f_sum + asl * s_sum)
        acc[ibn] = coefs[4]
        bt = sr * a * (asl * f_sum - af * s_sum)
        acc[ibt1] = bt * b2v + s1 * sr * b3v * a_dif
        acc[ibt2] = bt * b3v - s1 * sr * b2v * a_dif
        return self._cons_pert_from_prim(acc)


def eigensystem(ql: np.ndarray, qr: np.ndarray, axis: int,
                gamma: float = GAMMA, wl: np.ndarray = None,
                wr: np.ndarray = None) -> Eigensystem:
    """Eigen-decomposition at the arithmetic average of the two primitive
    states adjacent to an interface."""
    if wl is None:
        wl = cons_to_prim(ql, gamma)
    if wr is None:
        wr = cons_to_prim(qr, gamma)
    return Eigensystem(0.5 * (wl + wr), axis, gamma)


def fwave_decompose(ql: np.ndarray, qr: np.ndarray, axis: int,
                    gamma: float = GAMMA) -> WaveFan:
    """Split the interface flux difference onto the averaged eigenbasis.

    Z^p = (l^p . dF) r^p with dF = f(qr) - f(ql); the waves always sum
    back to dF because the eigenvector sets are bi-orthonormal.
    """
    es = eigensystem(ql, qr, axis, gamma)
    df = flux(qr, axis, gamma) - flux(ql, axis, gamma)
    betas = es.project(df)
    r = es.right_vectors()
    fwaves = betas[:, None] * r
    return WaveFan(speeds=es.speeds, fwaves=fwaves)
