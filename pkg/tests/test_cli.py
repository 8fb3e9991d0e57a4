import numpy as np

from ctmhd import cli
from ctmhd.snapshots import read_snapshot

ALFVEN_CFG = """
problem = alfven
nx = 16
ny = 1
nz = 32
theta = 0.4636476090008061
end_time = 0.05
snapshot_times = 0.0 0.05
"""


def _write_cfg(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_run_subcommand(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, ALFVEN_CFG)
    rc = cli.main(["run", cfg, "--output-dir", str(tmp_path / "out")])
    assert rc == 0
    assert (tmp_path / "out" / "alfven_final.snap").exists()
    assert "finished alfven" in capsys.readouterr().out


def test_configuration_errors_exit_1(tmp_path, capsys):
    assert cli.main(["run", str(tmp_path / "missing.cfg")]) == 1
    bad = _write_cfg(tmp_path, "problem = nonsense\n", "bad.cfg")
    assert cli.main(["run", bad]) == 1
    assert "error:" in capsys.readouterr().err


def test_admissibility_failure_exits_2(tmp_path, capsys, monkeypatch):
    from ctmhd import runner
    from ctmhd.mhd_core import AdmissibilityError

    def explode(cfg, on_step=None):
        raise AdmissibilityError("nonpositive density at (0, 0, 0)")

    monkeypatch.setattr(runner, "run", explode)
    cfg = _write_cfg(tmp_path, ALFVEN_CFG)
    assert cli.main(["run", cfg]) == 2
    assert "solver failure" in capsys.readouterr().err


def test_diff_subcommand(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, ALFVEN_CFG)
    out = tmp_path / "out"
    assert cli.main(["run", cfg, "--output-dir", str(out)]) == 0
    rc = cli.main(["diff", str(out / "alfven_t0.000000.snap"),
                   str(out / "alfven_final.snap")])
    assert rc == 0
    text = capsys.readouterr().out
    assert "rho" in text and "max|diff|" in text


def test_reference1d_subcommand(tmp_path, capsys):
    cfg = _write_cfg(tmp_path,
                     "problem = reference_shock_tube\nnx = 200\n")
    out = tmp_path / "out"
    rc = cli.main(["reference1d", cfg, "--output-dir", str(out)])
    assert rc == 0
    lines = (out / "reference1d.csv").read_text().splitlines()
    assert len(lines) == 201  # header + one row per cell


def test_convergence_subcommand(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, ALFVEN_CFG)
    out = tmp_path / "out"
    rc = cli.main(["convergence", cfg, "--meshes", "8", "16",
                   "--output-dir", str(out)])
    assert rc == 0
    assert (out / "convergence.csv").exists()
    assert "mesh 16" in capsys.readouterr().out
