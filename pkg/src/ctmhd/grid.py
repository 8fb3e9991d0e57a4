"""Cartesian mesh containers with ghost layers and boundary-condition fills.

Storage convention: a field block has shape (ncomp, NZ, NY, NX) where
NX = nx + 2*ghost etc., so the x index runs fastest in memory.  Interior
cell (i, j, k) (zero based) lives at block index [:, k+g, j+g, i+g].
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

#: face identifiers, low/high per axis
FACES = ("xlo", "xhi", "ylo", "yhi", "zlo", "zhi")

#: valid boundary tags
BC_TAGS = ("periodic", "extrapolate0", "extrapolate1", "reflect_wall",
           "shifted_shock_tube")


class ConfigurationError(ValueError):
    """Inconsistent grid / boundary configuration."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform 3D Cartesian mesh: cell counts, lower corner, spacings, ghosts."""

    nx: int
    ny: int
    nz: int
    x0: float = 0.0
    y0: float = 0.0
    z0: float = 0.0
    dx: float = 1.0
    dy: float = 1.0
    dz: float = 1.0
    ghost: int = 2

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 1:
            raise ConfigurationError("cell counts must be >= 1")
        if min(self.dx, self.dy, self.dz) <= 0.0:
            raise ConfigurationError("cell widths must be > 0")
        if self.ghost < 2:
            raise ConfigurationError("ghost width must be >= 2")

    @property
    def shape(self):
        """Interior shape in (nz, ny, nx) array order."""
        return (self.nz, self.ny, self.nx)

    @property
    def padded_shape(self):
        g = 2 * self.ghost
        return (self.nz + g, self.ny + g, self.nx + g)

    @property
    def spacings(self):
        """(dx, dy, dz)."""
        return (self.dx, self.dy, self.dz)

    def axis_centers(self, axis: int, ghost: bool = False):
        """1D cell-center coordinates along axis 0=x, 1=y, 2=z."""
        n = (self.nx, self.ny, self.nz)[axis]
        lo = (self.x0, self.y0, self.z0)[axis]
        d = (self.dx, self.dy, self.dz)[axis]
        idx = np.arange(-self.ghost, n + self.ghost) if ghost else np.arange(n)
        return lo + (idx + 0.5) * d


def cell_centers(spec: GridSpec, ghost: bool = False):
    """Coordinate arrays (x, y, z), each of shape (nz, ny, nx) [+ ghosts].

    Broadcast against each other; cell (i,j,k) is centered at
    (x0+(i+1/2)dx, y0+(j+1/2)dy, z0+(k+1/2)dz).
    """
    x = spec.axis_centers(0, ghost)
    y = spec.axis_centers(1, ghost)
    z = spec.axis_centers(2, ghost)
    return tuple(np.broadcast_arrays(
        x[None, None, :], y[None, :, None], z[:, None, None]))


@dataclass
class Field:
    """Cell data with ghost layers; values shape (ncomp, NZ, NY, NX)."""

    spec: GridSpec
    ncomp: int
    values: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        full = (self.ncomp,) + self.spec.padded_shape
        if self.values is None:
            self.values = np.zeros(full)
        elif self.values.shape != full:
            raise ConfigurationError(
                f"values shape {self.values.shape} != expected {full}")

    @property
    def interior(self):
        g = self.spec.ghost
        return self.values[:, g:-g, g:-g, g:-g]

    @interior.setter
    def interior(self, block):
        g = self.spec.ghost
        self.values[:, g:-g, g:-g, g:-g] = block

    def copy(self) -> "Field":
        return Field(self.spec, self.ncomp, self.values.copy())

    def check_finite(self, where: str = "field"):
        if not np.all(np.isfinite(self.interior)):
            bad = np.argwhere(~np.isfinite(self.interior))
            raise FloatingPointError(f"non-finite value in {where} at {bad[0]}")


@dataclass(frozen=True)
class BoundarySpec:
    """Per-face boundary tags plus the extra data some tags need.

    ``reflect_components`` maps a face name to the component indices that
    reflect_wall negates there (e.g. the wall-normal momentum).
    ``shift_y``/``shift_z`` are the (di, dj-or-dk) index shifts that leave
    the oblique 1D profile invariant for the shifted shock-tube fill.
    """

    tags: dict = field(default_factory=lambda: {f: "periodic" for f in FACES})
    reflect_components: dict = field(default_factory=dict)
    shift_y: tuple = (1, -2)
    shift_z: tuple = (1, -4)

    def __post_init__(self):
        for f, t in self.tags.items():
            if f not in FACES:
                raise ConfigurationError(f"unknown face {f!r}")
            if t not in BC_TAGS:
                raise ConfigurationError(f"unknown boundary tag {t!r}")
        for lo, hi in (("xlo", "xhi"), ("ylo", "yhi"), ("zlo", "zhi")):
            lo_p = self.tags.get(lo) == "periodic"
            hi_p = self.tags.get(hi) == "periodic"
            if lo_p != hi_p:
                raise ConfigurationError(
                    f"periodic must be paired on opposite faces ({lo}/{hi})")

    def tag(self, face: str) -> str:
        return self.tags.get(face, "periodic")

    def with_tags(self, **tags) -> "BoundarySpec":
        merged = dict(self.tags)
        merged.update(tags)
        return replace(self, tags=merged)


def periodic_bc() -> BoundarySpec:
    return BoundarySpec()


def extrapolation_bc(order: int = 0) -> BoundarySpec:
    tag = "extrapolate1" if order == 1 else "extrapolate0"
    return BoundarySpec(tags={f: tag for f in FACES})


# axis -> array axis in (NZ, NY, NX) blocks (component axis excluded)
_ARRAY_AXIS = {0: 2, 1: 1, 2: 0}


def sl_rev(ax, ndim):
    s = [slice(None)] * ndim
    s[ax] = slice(None, None, -1)
    return tuple(s)


def _fill_axis(block: np.ndarray, axis: int, bc: BoundarySpec, g: int):
    ax = _ARRAY_AXIS[axis] + 1
    n = block.shape[ax] - 2 * g
    lo_tag = bc.tag(FACES[2 * axis])
    hi_tag = bc.tag(FACES[2 * axis + 1])

    def sl(idx):
        s = [slice(None)] * block.ndim
        s[ax] = idx
        return tuple(s)

    for low, tag in ((True, lo_tag), (False, hi_tag)):
        if tag == "periodic":
            # modular wrap is exact even when n < ghost width
            if low:
                src = g + np.arange(-g, 0) % n
                block[sl(slice(0, g))] = np.take(block, src, axis=ax)
            else:
                src = g + np.arange(n, n + g) % n
                block[sl(slice(n + g, n + 2 * g))] = np.take(block, src,
                                                             axis=ax)
        elif tag == "extrapolate0":
            edge = sl(slice(g, g + 1)) if low else sl(slice(n + g - 1, n + g))
            tgt = sl(slice(0, g)) if low else sl(slice(n + g, n + 2 * g))
            block[tgt] = block[edge]
        elif tag == "extrapolate1":
            if n == 1:
                # a single cell defines no slope; copy it (same as order 0)
                edge = sl(slice(g, g + 1))
                tgt = sl(slice(0, g)) if low else sl(slice(n + g, n + 2 * g))
                block[tgt] = block[edge]
            elif low:
                q0, q1 = block[sl(g)], block[sl(g + 1)]
                for m in range(1, g + 1):
                    block[sl(g - m)] = q0 - m * (q1 - q0)
            else:
                q0, q1 = block[sl(n + g - 1)], block[sl(n + g - 2)]
                for m in range(1, g + 1):
                    block[sl(n + g - 1 + m)] = q0 - m * (q1 - q0)
        elif tag == "reflect_wall":
            face = FACES[2 * axis] if low else FACES[2 * axis + 1]
            comps = bc.reflect_components.get(face, ())
            if low:
                src = block[sl(slice(g, 2 * g))][sl_rev(ax, block.ndim)]
                block[sl(slice(0, g))] = src
                for c in comps:
                    block[(c,) + sl(slice(0, g))[1:]] *= -1.0
            else:
                src = block[sl(slice(n, n + g))][sl_rev(ax, block.ndim)]
                block[sl(slice(n + g, n + 2 * g))] = src
                for c in comps:
                    block[(c,) + sl(slice(n + g, n + 2 * g))[1:]] *= -1.0
        elif tag == "shifted_shock_tube":
            _fill_shifted(block, axis, low, bc, g)
        else:
            raise ConfigurationError(f"unknown tag {tag!r}")


def _fill_shifted(block: np.ndarray, axis: int, low: bool, bc: BoundarySpec,
                  g: int):
    """Oblique-profile ghost fill: q(i,j,k) = q(i+di, j+dj, k) (axis=1)
    or q(i,j,k) = q(i+di, j, k+dk) (axis=2), applied layer by layer.

    For the high face the relation is used as given; for the low face the
    inverted shift is used so the source lies toward the interior.  Cells
    whose shifted source falls outside the block (one x column per layer)
    are copied from the adjacent filled x column.
    """
    if axis == 0:
        raise ConfigurationError("shifted_shock_tube is only valid in y or z")
    di, dt = bc.shift_y if axis == 1 else bc.shift_z
    ax = _ARRAY_AXIS[axis] + 1
    nt = block.shape[ax] - 2 * g
    nxf = block.shape[3]

    if low:
        di, dt = -di, -dt
        layers = range(g - 1, -1, -1)
    else:
        layers = range(nt + g, nt + 2 * g)

    for j in layers:
        src_j = j + dt
        # source x range shifted by di; fill what maps inside, pad the rest
        if di >= 0:
            tgt_x = slice(0, nxf - di)
            src_x = slice(di, nxf)
            pad_x, pad_src = slice(nxf - di, nxf), nxf - di - 1
        else:
            tgt_x = slice(-di, nxf)
            src_x = slice(0, nxf + di)
            pad_x, pad_src = slice(0, -di), -di

        def sl(jj, xx):
            s = [slice(None)] * block.ndim
            s[ax] = jj
            s[3] = xx
            return tuple(s)

        block[sl(j, tgt_x)] = block[sl(src_j, src_x)]
        block[sl(j, pad_x)] = block[sl(j, pad_src)][..., None] \
            if isinstance(pad_x, slice) else block[sl(j, pad_src)]


def fill_ghost(f: Field, bc: BoundarySpec) -> Field:
    """Fill all ghost layers of ``f`` in place (and return it).

    Axes are processed x, then y, then z, so later fills may consume
    already-filled ghost corners (correct for periodic wrapping and for the
    shifted shock-tube relations, which read x ghosts).
    """
    g = f.spec.ghost
    for axis in (0, 1, 2):
        _fill_axis(f.values, axis, bc, g)
    return f
