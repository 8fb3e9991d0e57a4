import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ctmhd.grid import (BoundarySpec, ConfigurationError, FACES, Field,
                        GridSpec, cell_centers, extrapolation_bc, fill_ghost,
                        periodic_bc)


def test_gridspec_validation():
    with pytest.raises(ConfigurationError):
        GridSpec(0, 4, 4)
    with pytest.raises(ConfigurationError):
        GridSpec(4, 4, 4, dx=0.0)
    with pytest.raises(ConfigurationError):
        GridSpec(4, 4, 4, ghost=1)


def test_shapes_and_centers():
    spec = GridSpec(5, 3, 2, x0=-1.0, dx=0.5, dy=0.25, dz=2.0)
    assert spec.shape == (2, 3, 5)
    assert spec.padded_shape == (6, 7, 9)
    x, y, z = cell_centers(spec)
    assert x.shape == (2, 3, 5)
    assert x[0, 0, 0] == -0.75 and x[0, 0, 1] == -0.25
    assert y[0, 1, 0] == 0.375
    assert z[1, 0, 0] == 3.0
    # ghost centers continue the uniform spacing outward
    xg = spec.axis_centers(0, ghost=True)
    assert np.allclose(np.diff(xg), 0.5)
    assert xg[spec.ghost] == -0.75


def test_field_shape_check():
    spec = GridSpec(4, 4, 4)
    with pytest.raises(ConfigurationError):
        Field(spec, 8, np.zeros((8, 4, 4, 4)))


def test_periodic_pairing_enforced():
    with pytest.raises(ConfigurationError):
        BoundarySpec(tags={"xlo": "periodic", "xhi": "extrapolate0"})
    with pytest.raises(ConfigurationError):
        BoundarySpec(tags={"xlo": "outflow"})
    with pytest.raises(ConfigurationError):
        BoundarySpec(tags={"front": "periodic"})


def test_periodic_fill_wraps_exactly(rng):
    spec = GridSpec(6, 5, 4)
    f = Field(spec, 2)
    f.interior = rng.standard_normal(f.interior.shape)
    fill_ghost(f, periodic_bc())
    g = spec.ghost
    v = f.values
    # x wrap
    assert np.array_equal(v[:, g:-g, g:-g, :g], v[:, g:-g, g:-g, -2 * g:-g])
    assert np.array_equal(v[:, g:-g, g:-g, -g:], v[:, g:-g, g:-g, g:2 * g])
    # corners are wrapped consistently too (fill order x, y, z)
    assert v[0, g, g - 1, g - 1] == v[0, g, -g - 1, -g - 1]


def test_periodic_fill_single_cell_axis(rng):
    # modular wrap must hold even when the axis is narrower than the halo
    spec = GridSpec(4, 1, 1)
    f = Field(spec, 1)
    f.interior = rng.standard_normal(f.interior.shape)
    fill_ghost(f, periodic_bc())
    g = spec.ghost
    col = f.values[0, :, :, g]
    assert np.all(col == col[g, g])


def test_extrapolation_fills():
    spec = GridSpec(5, 1, 1)
    f = Field(spec, 1)
    x = spec.axis_centers(0, ghost=True)
    g = spec.ghost
    f.values[0, g, g, g:-g] = 3.0 * x[g:-g] + 1.0
    f0 = f.copy()
    fill_ghost(f0, extrapolation_bc(0))
    assert np.all(f0.values[0, g, g, :g] == f0.values[0, g, g, g])
    f1 = f.copy()
    fill_ghost(f1, extrapolation_bc(1))
    # linear data extends exactly under first-order extrapolation
    assert np.allclose(f1.values[0, g, g], 3.0 * x + 1.0)


def test_extrapolation_order1_single_cell():
    # one cell defines no slope; the fill degrades to a copy
    spec = GridSpec(1, 1, 1)
    f = Field(spec, 1)
    f.interior = 7.0
    fill_ghost(f, extrapolation_bc(1))
    assert np.all(f.values == 7.0)


def test_reflect_wall_negates_selected_components(rng):
    spec = GridSpec(4, 4, 4)
    bc = BoundarySpec(tags={f: "extrapolate0" for f in FACES}
                      | {"ylo": "reflect_wall"},
                      reflect_components={"ylo": (2,)})
    f = Field(spec, 3)
    f.interior = rng.standard_normal(f.interior.shape)
    fill_ghost(f, bc)
    g = spec.ghost
    v = f.values[:, g:-g, :, g:-g]
    # mirror image about the wall, component 2 sign-flipped
    assert np.array_equal(v[0, :, g - 1], v[0, :, g])
    assert np.array_equal(v[0, :, g - 2], v[0, :, g + 1])
    assert np.array_equal(v[2, :, g - 1], -v[2, :, g])
    assert np.array_equal(v[1, :, g - 2], v[1, :, g + 1])


@settings(deadline=None, max_examples=25)
@given(st.integers(3, 8), st.integers(1, 2 ** 31 - 1))
def test_fill_is_idempotent(n, seed):
    rng = np.random.default_rng(seed)
    spec = GridSpec(n, n - 1, 3)
    f = Field(spec, 2)
    f.interior = rng.standard_normal(f.interior.shape)
    bc = periodic_bc()
    once = fill_ghost(f, bc).values.copy()
    twice = fill_ghost(f, bc).values
    assert np.array_equal(once, twice)
