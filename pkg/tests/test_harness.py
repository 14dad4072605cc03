import csv
import hashlib

import numpy as np
import pytest

from vpmcf.cli import main
from vpmcf.errors import ConfigError
from vpmcf.flow import FlowConfig, Mode, run
from vpmcf.harness import analyze, parse_config, presets, run_monitors
from vpmcf.harness.config import MONITOR_NAMES
from vpmcf.harness.output import read_columns, read_snapshot_csv
from vpmcf.profile import GridSpec


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_parse_config_full():
    cfg = parse_config("""
        # comment line
        a = -1
        b = 1      # trailing comment
        N = 64
        n = 3
        mode = plain_mcf
        t_end = 0.2
        dt_safety = 0.1
        stop_rho_min = auto
        volume_projection = no
        output_every = 50
        record_rho_factor = 0.9
        initial = perturbed(1.0, 0.1, 1, 3)
        monitors = volume, sturm
        census_tol = 1e-9
        c00 = 5
        out_dir = results
        svg = true
    """)
    assert cfg.grid == GridSpec(-1, 1, 64, 3)
    assert cfg.flow.mode is Mode.PLAIN_MCF and cfg.flow.t_end == 0.2
    assert cfg.flow.stop_rho_min is None and cfg.flow.volume_projection is False
    assert cfg.monitors == ("volume", "sturm")
    assert cfg.initial.kind == "perturbed" and cfg.initial.args == (1.0, 0.1, 1.0, 3.0)
    assert cfg.svg and cfg.c00 == 5
    assert cfg.initial_profile().rho.shape == (65,)


def test_default_monitors_are_all():
    assert parse_config("initial = cylinder(1)").monitors == MONITOR_NAMES
    assert len(MONITOR_NAMES) == 9


@pytest.mark.parametrize("text,line", [
    ("initial = cylinder(1)\nfoo = 2", 2),
    ("\n\ninitial = cylinder(1)\nN = abc", 4),
    ("initial = cylinder(1)\nno equals sign", 2),
    ("initial = cylinder(1)\ninitial = cylinder(2)", 2),
    ("initial = blob(1)", 1),
    ("initial = dumbbell(1.0)", 1),
    ("initial = cylinder(1)\nmonitors = volume, bogus", 2),
    ("initial = cylinder(1)\nc00 = 2", 2),
    ("N = 4\ninitial = cylinder(1)", 1),
    ("initial = cylinder(1)\ndt_safety = 3", 2),
])
def test_config_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError, match=f"line {line}:"):
        parse_config(text)


def test_missing_initial():
    with pytest.raises(ConfigError, match="initial"):
        parse_config("N = 16")


def test_preset_validation():
    grid = GridSpec(0, 1, 16)
    with pytest.raises(ValueError):
        presets.perturbed(grid, 1.0, 0.6, (1, 2))
    with pytest.raises(ValueError):
        presets.dumbbell(grid, 1.0, 1.0)
    with pytest.raises(ValueError):
        presets.cylinder(grid, 0.0)
    assert presets.escalated_amplitude(0.2, 0.12) == pytest.approx(0.16)


def test_presets_symmetric():
    grid = GridSpec(0, 2, 64)
    for prof in (presets.perturbed(grid, 1, 0.1, (1, 2, 3)), presets.dumbbell(grid, 1, 0.5)):
        assert np.array_equal(prof.rho, prof.rho[::-1])
    assert np.argmin(presets.dumbbell(grid, 1, 0.5).rho) == 32


def test_monitors_on_clean_run():
    grid = GridSpec(0, 1, 64)
    traj = run(presets.perturbed(grid, 1.0, 0.1, (2,)), FlowConfig(t_end=0.02))
    reports = run_monitors(analyze(traj), MONITOR_NAMES)
    assert [r.name for r in reports] == list(MONITOR_NAMES)
    assert not any(r.failed for r in reports)
    status = {r.name: r.status for r in reports}
    assert status["min_H"] == status["sharp_v"] == "observed"


def test_monitor_detects_volume_loss():
    grid = GridSpec(0, 1, 32)
    traj = run(presets.perturbed(grid, 1.0, 0.1, (2,)), FlowConfig(t_end=0.01))
    an = analyze(traj)
    an.rows[-1]["volume"] *= 1.01
    (rep,) = run_monitors(an, ["volume"])
    assert rep.failed and rep.worst_time == traj.final.t


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_cli_run_cylinder(tmp_path, capsys):
    cfg = _write(tmp_path, "c.cfg", "initial = cylinder(1.0)\nN = 32\nt_end = 0.1\n"
                                     "out_dir = out\nsvg = yes\n")
    assert main(["run", "--config", cfg, "--strict"]) == 0
    out = tmp_path / "out"
    rows = _rows(out / "timeseries.csv")
    assert len({r["volume"] for r in rows}) == 1
    assert rows[-1]["status"] == "reached_t_end"
    for name in ("census.csv", "monitors.txt"):
        assert (out / name).exists()
    assert not (out / "fit.txt").exists()
    snaps = sorted((out / "snapshots").glob("*.csv"))
    assert len(snaps) == len(rows)
    assert (out / "snapshots" / "0000.svg").read_text().count("<polyline") == 2
    prof = read_snapshot_csv(snaps[-1])
    assert np.allclose(prof.rho, 1.0)
    header = list(read_columns(snaps[0]))
    assert header == ["x", "rho", "d1", "d2", "y", "v", "p", "q", "k", "H", "A2"]


def test_cli_env_override(tmp_path, monkeypatch):
    cfg = _write(tmp_path, "c.cfg", "initial = cylinder(1.0)\nN = 16\nt_end = 0.01\n")
    monkeypatch.setenv("VPMCF_OUT", str(tmp_path / "elsewhere"))
    assert main(["run", "--config", cfg]) == 0
    assert (tmp_path / "elsewhere" / "timeseries.csv").exists()


def test_cli_plain_cylinder_is_type1(tmp_path, capsys):
    cfg = _write(tmp_path, "p.cfg", "initial = cylinder(1.0)\nN = 32\nmode = plain_mcf\n"
                                     "t_end = 1\nrecord_rho_factor = 0.9\nout_dir = out\n")
    assert main(["run", "--config", cfg]) == 0
    fit = (tmp_path / "out" / "fit.txt").read_text()
    assert "classification = type_I" in fit
    capsys.readouterr()
    assert main(["fit", str(tmp_path / "out" / "timeseries.csv")]) == 0
    assert "classification = type_I" in capsys.readouterr().out


def test_cli_config_error(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.cfg", "initial = cylinder(1)\nN = 16\nwat\n")
    assert main(["run", "--config", cfg]) == 1
    assert "line 3" in capsys.readouterr().err


def test_cli_strict_exit_on_monitor_failure(tmp_path):
    # Without projection and with a tiny tolerance the volume monitor trips.
    cfg = _write(tmp_path, "s.cfg", "initial = perturbed(1.0, 0.2, 3)\nN = 64\nt_end = 0.01\n"
                                     "volume_projection = false\nvol_tol = 1e-18\nout_dir = o\n")
    assert main(["run", "--config", cfg]) == 0
    assert main(["run", "--config", cfg, "--strict"]) == 2


def test_cli_fit_missing_columns(tmp_path, capsys):
    path = _write(tmp_path, "ts.csv", "t,other\n0,1\n")
    assert main(["fit", path]) == 1
    assert "max_A2" in capsys.readouterr().err


def test_cli_rescale(tmp_path, capsys):
    cfg = _write(tmp_path, "d.cfg", "initial = dumbbell(0.2, 0.12)\nN = 200\nt_end = 0.05\n"
                                     "stop_rho_min = 0.04\noutput_every = 500\nout_dir = o\n")
    assert main(["run", "--config", cfg]) == 0
    snaps = sorted((tmp_path / "o" / "snapshots").glob("*.csv"))
    out = tmp_path / "r.csv"
    capsys.readouterr()
    assert main(["rescale", str(snaps[-1]), "--alpha", "auto", "--center", "auto",
                 "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "cyl_resid" in text and "cat_resid" in text
    prof = read_snapshot_csv(out)
    assert prof.rho.min() == pytest.approx(1.0)
    assert main(["rescale", str(snaps[-1]), "--alpha", "2", "--center", "0.5"]) == 0
    assert main(["rescale", str(snaps[-1]), "--alpha", "1000", "--center", "0.5",
                 "--half-width", "1"]) == 1


def test_from_file_round_trip(tmp_path):
    cfg = _write(tmp_path, "d.cfg", "initial = perturbed(1.0, 0.1, 2)\nN = 32\nt_end = 0.001\n"
                                     "out_dir = o\n")
    assert main(["run", "--config", cfg]) == 0
    snap = tmp_path / "o" / "snapshots" / "0000.csv"
    cfg2 = parse_config(f"initial = from_file({snap})\nN = 32")
    assert np.array_equal(cfg2.initial_profile().rho,
                          parse_config("initial = perturbed(1.0, 0.1, 2)\nN = 32")
                          .initial_profile().rho)
    with pytest.raises(ValueError):
        parse_config(f"initial = from_file({snap})\nN = 64").initial_profile()


def test_runs_are_bit_identical(tmp_path):
    text = "initial = perturbed(1.0, 0.1, 2)\nN = 64\nt_end = 0.01\noutput_every = 50\n"
    digests = []
    for k in range(2):
        cfg = _write(tmp_path, f"{k}.cfg", text + f"out_dir = run{k}\n")
        assert main(["run", "--config", cfg]) == 0
        digests.append(hashlib.sha256((tmp_path / f"run{k}" / "timeseries.csv").read_bytes())
                       .hexdigest())
    assert digests[0] == digests[1]
