import csv
import filecmp

import numpy as np
import pytest

from ctmhd import runner
from ctmhd.grid import ConfigurationError, Field, GridSpec
from ctmhd.snapshots import (CONSERVED_NAMES, SnapshotError, read_snapshot,
                             write_snapshot)


def test_snapshot_round_trip_bit_exact(tmp_path, rng):
    spec = GridSpec(7, 5, 3, x0=-2.0, y0=0.5, dx=0.1, dy=0.2, dz=0.4)
    f = Field(spec, 8)
    f.interior = rng.standard_normal(f.interior.shape)
    path = tmp_path / "state.snap"
    write_snapshot(path, f, 0.375)
    g, t, names = read_snapshot(path)
    assert t == 0.375
    assert names == CONSERVED_NAMES
    assert g.spec == spec
    assert np.array_equal(g.interior, f.interior)


def test_snapshot_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.snap"
    bad.write_bytes(b"not-a-snapshot\nend\n")
    with pytest.raises(SnapshotError):
        read_snapshot(bad)
    trunc = tmp_path / "trunc.snap"
    spec = GridSpec(4, 1, 1)
    f = Field(spec, 8)
    write_snapshot(trunc, f, 0.0)
    trunc.write_bytes(trunc.read_bytes()[:-16])
    with pytest.raises(SnapshotError):
        read_snapshot(trunc)


def test_parse_config_values_and_errors():
    cfg = runner.parse_config(
        "# comment\nproblem = orszag_tang\nnx = 32\ncfl = 0.6\n"
        "snapshot_times = 0.5 1.0\nlimiter = minmod\n")
    assert cfg.problem == "orszag_tang"
    assert cfg.nx == 32 and cfg.cfl == 0.6
    assert cfg.snapshot_times == (0.5, 1.0)
    for text in ("problem = nonsense\n", "nx = not_a_number\n",
                 "unknown_key = 3\n", "just words\n", "cfl = 1.5\n"):
        with pytest.raises(ConfigurationError):
            runner.parse_config(text)


ALFVEN_CFG = """
problem = alfven
nx = 16
ny = 1
nz = 32
theta = 0.4636476090008061
end_time = 0.1
"""


def test_run_writes_artifacts_and_diagnostics(tmp_path):
    cfg = runner.parse_config(
        ALFVEN_CFG + f"snapshot_times = 0.0 0.05 0.1\n"
        f"output_dir = {tmp_path}\n")
    state, rows = runner.run(cfg)
    assert state.time == pytest.approx(0.1)
    produced = {p.name for p in tmp_path.iterdir()}
    assert {"alfven_t0.000000.snap", "alfven_t0.050000.snap",
            "alfven_t0.100000.snap", "alfven_final.snap",
            "diagnostics.csv", "errors.csv"} <= produced
    # snapshots carry the scheduled times
    _, t, _ = read_snapshot(tmp_path / "alfven_t0.050000.snap")
    assert t == pytest.approx(0.05)
    with open(tmp_path / "diagnostics.csv") as fh:
        table = list(csv.DictReader(fh))
    assert len(table) == len(rows)
    for row in table:
        assert float(row["max_divb_scaled"]) < 1e-11
        assert float(row["min_rho"]) > 0.0 and float(row["min_press"]) > 0.0


def test_run_is_deterministic(tmp_path):
    outs = []
    for sub in ("a", "b"):
        d = tmp_path / sub
        cfg = runner.parse_config(ALFVEN_CFG + f"output_dir = {d}\n")
        runner.run(cfg)
        outs.append(d)
    assert filecmp.cmp(outs[0] / "alfven_final.snap",
                       outs[1] / "alfven_final.snap", shallow=False)


def test_error_norms_examples(rng):
    spec = GridSpec(6, 4, 3)
    a, b = Field(spec, 2), Field(spec, 2)
    a.interior = rng.standard_normal(a.interior.shape)
    b.values = a.values.copy()
    linf, l1 = runner.error_norms(a, b)
    assert np.all(linf == 0.0) and np.all(l1 == 0.0)
    b.interior = a.interior + 0.25
    linf, l1 = runner.error_norms(a, b)
    assert np.allclose(linf, 0.25) and np.allclose(l1, 0.25)
    b.interior = rng.standard_normal(b.interior.shape)
    linf, l1 = runner.error_norms(a, b)
    diff = np.abs(a.interior - b.interior)
    assert np.allclose(linf, diff.reshape(2, -1).max(axis=1))
    assert np.allclose(l1, diff.reshape(2, -1).mean(axis=1))
    with pytest.raises(ConfigurationError):
        runner.error_norms(a, Field(GridSpec(3, 3, 3), 2))


def test_convergence_requires_exact_solution():
    with pytest.raises(ConfigurationError):
        runner.convergence(runner.RunConfig(problem="orszag_tang"), [8, 16])


def test_convergence_reports_dash_for_zero_errors(tmp_path):
    # exact solution fed back as the numeric one: errors 0, order "—"
    cfg = runner.parse_config(ALFVEN_CFG)
    table = [{"mesh": 8, "errors": {v: 0.0 for v in
                                    ("B1", "B2", "B3", "A1", "A2", "A3")},
              "orders": {v: None for v in
                         ("B1", "B2", "B3", "A1", "A2", "A3")}}]
    # the public path: a one-mesh study has no ratio to take
    out = runner.convergence(cfg, [8], out_path=tmp_path / "c.csv")
    assert all(v is None for v in out[0]["orders"].values())
    text = (tmp_path / "c.csv").read_text()
    assert "—" in text


def test_reference_profile_and_self_convergence(tmp_path):
    coarse = runner.reference_1d(
        runner.RunConfig(problem="reference_shock_tube", nx=400),
        out_path=tmp_path / "ref.csv")
    fine = runner.reference_1d(
        runner.RunConfig(problem="reference_shock_tube", nx=800))
    assert coarse.shape == (400, 9)
    # multi-wave structure: density takes several plateau-like levels
    rho = coarse[:, 1]
    assert rho.min() >= 0.99 and rho.max() > 1.4
    interp = np.interp(coarse[:, 0], fine[:, 0], fine[:, 1])
    rel = np.abs(rho - interp).mean() / np.abs(interp).mean()
    assert rel < 0.01
    header = (tmp_path / "ref.csv").read_text().splitlines()[0]
    assert header.split(",") == list(runner.SCATTER_COLUMNS)


def test_initial_reference_profile_is_step():
    cfg = runner.RunConfig(problem="reference_shock_tube", nx=100,
                           end_time=0.0)
    rows = runner.reference_1d(cfg)
    rho = rows[:, 1]
    assert set(np.round(rho, 12)) == {1.0, 1.08}
    assert np.all(np.diff((rho > 1.04).astype(int)) <= 0)
