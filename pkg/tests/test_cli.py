import numpy as np
import pytest

from vortexflow.cli import main
from vortexflow.fieldfile import read_fields

FAST_CONFIG = """
[domain]
sigma = 0.5
R = 2.5
L = 2.0
[grid]
nr = 16
nz = 12
[physics]
nu = 0.1
[bc]
profile = uniform
gamma = 0.62831853071795865
[solver]
strategy = stokes
[output]
"""


def write_cfg(tmp_path, text=FAST_CONFIG, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_solve_writes_outputs(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "fields.dat").exists()
    assert (out / "diagnostics.txt").exists()
    assert (out / "resolved.ini").exists()
    ff = read_fields(out / "fields.dat")
    assert ff.meta["converged"] == "true"
    # the resolved config re-parses and reproduces the run parameters
    from vortexflow.config import parse_config

    cfg2 = parse_config((out / "resolved.ini").read_text())
    assert cfg2.domain.sigma == 0.5
    assert cfg2.nr == 16


def test_solve_validation_error(tmp_path, capsys):
    bad = write_cfg(tmp_path, FAST_CONFIG.replace("nu = 0.1", "nu = -1"), "bad.ini")
    assert main(["solve", "--config", bad, "--out", str(tmp_path / "o")]) == 1


def test_solve_nonconvergence_exit_2(tmp_path):
    text = FAST_CONFIG.replace("nu = 0.1", "nu = 0.002").replace(
        "[solver]\nstrategy = stokes",
        "[solver]\nstrategy = stokes\nnewton_max_iters = 1")
    cfg = write_cfg(tmp_path, text, "hard.ini")
    assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o2")]) == 2


def test_couette_prints_error(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    assert main(["couette", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "max error vs oracle" in out
    rel = float(out.split("relative")[1].strip(" )\n"))
    assert rel < 1e-3


def test_stokes_subcommand(tmp_path):
    cfg = write_cfg(tmp_path)
    out = tmp_path / "stokes_out"
    assert main(["stokes", "--config", cfg, "--out", str(out)]) == 0
    ff = read_fields(out / "fields.dat")
    assert np.max(np.abs(ff.fields.u)) == 0.0
    assert ff.fields.v.max() > 0.0


def test_mms_subcommand(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    assert main(["mms", "--config", cfg, "--levels", "3", "--coarsest", "17"]) == 0
    out = capsys.readouterr().out
    assert "final orders" in out


def test_diag_subcommand(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    out = tmp_path / "out"
    main(["solve", "--config", cfg, "--out", str(out)])
    capsys.readouterr()
    assert main(["diag", "--field", str(out / "fields.dat")]) == 0
    text = capsys.readouterr().out
    assert "cell_count=" in text
    assert "re=" in text


def test_sweep_subcommand(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", cfg, "--vary", "physics.nu=0.1,0.2",
                 "--out", str(out)]) == 0
    assert (out / "physics.nu=0.1" / "fields.dat").exists()
    assert (out / "physics.nu=0.2" / "fields.dat").exists()
    assert (out / "physics.nu=0.2" / "resolved.ini").exists()


def test_unknown_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as err:
        main(["solve", "--bogus", "x"])
    assert err.value.code == 1
