import io
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from recoilshift import cli
from recoilshift.config import (
    ParseError, ValidationError, build_config, default_cutoff, dump_config, load_config, parse_text,
    with_overrides,
)
from recoilshift.ensemble import delta_waist
from recoilshift.scenarios import (
    COLUMNS, Dataset, PRESETS, UnknownPreset, emit_report, preset_configs, preset_grid, read_csv,
    run_configs, write_csv,
)
from recoilshift.wavepacket import CAESIUM

GOLDEN = Path(__file__).parent / "golden"
NUMERIC = [c for c in COLUMNS if c not in ("preset", "error", "runtime_s")]


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_empty_file_defaults(tmp_path):
    cfg = load_config(write(tmp_path, ""))
    assert cfg.preset == "standard-a"
    assert (cfg.timing.T_b, cfg.timing.T, cfg.timing.T_d) == (0.15, 0.5, 0.8)
    assert cfg.ensemble.theta == 0.8e-6
    assert (cfg.timing.k, cfg.timing.k_x) == (135.04, 137.43)
    assert cfg.ensemble.waist == delta_waist(CAESIUM, 0.8e-6)
    assert cfg.cutoff == 9 and cfg.mode == "ensemble"


def test_units_converted(tmp_path):
    cfg = load_config(write(tmp_path, "cloud.w_mm = 2.5\ncloud.theta_uK = 3.2 # hot\npulse.power = 5\n"))
    assert cfg.ensemble.w == pytest.approx(2.5e-3)
    assert cfg.ensemble.theta == pytest.approx(3.2e-6)
    assert cfg.cutoff == default_cutoff(5) == 15


def test_base_preset_b(tmp_path):
    cfg = load_config(write(tmp_path, "preset = standard-b\n"))
    assert (cfg.timing.T_b, cfg.timing.T) == (0.21, 0.25)
    fig3b = preset_configs("fig3b")[0]
    assert (fig3b.timing.T_b, fig3b.timing.T) == (0.21, 0.25)


def test_waist_constraint(tmp_path):
    # a cloud narrower than the smallest admissible packet
    with pytest.raises(ValidationError, match="waist"):
        load_config(write(tmp_path, "cloud.w_mm = 2e-5\n"))
    with pytest.raises(ValidationError, match="waist"):
        load_config(write(tmp_path, "cloud.w_mm = 0.2\ncloud.waist_m = 3e-4\n"))


@pytest.mark.parametrize("text", ["nonsense\n", "foo.bar = 1\n", "pulse.power = three\n",
                                  "preset = fig9\n", "pulse.power = 1\npulse.power = 3\n"])
def test_parse_errors(tmp_path, text):
    with pytest.raises(ParseError):
        load_config(write(tmp_path, text))


@pytest.mark.parametrize("kw", [dict(samples=0), dict(pulse_power=0), dict(mode="fast"),
                                dict(pulse_profile="square"), dict(T_d=0.3), dict(theta=-1.0)])
def test_validation_errors(kw):
    with pytest.raises(ValidationError):
        build_config(kw)


@pytest.mark.parametrize("name", PRESETS)
def test_dump_round_trip(name):
    for cfg in preset_configs(name):
        assert build_config(parse_text(dump_config(cfg))) == cfg


def test_with_overrides_rederives(standard):
    hot = with_overrides(standard, theta=3.2e-6, pulse_power=7)
    assert hot.ensemble.waist == delta_waist(CAESIUM, 3.2e-6)
    assert hot.cutoff == default_cutoff(7)
    pinned = with_overrides(with_overrides(standard, cutoff=12), pulse_power=7)
    assert pinned.cutoff == 12


def test_omega0(standard):
    assert standard.omega0 * standard.timing.tau == pytest.approx(np.pi**2 / 4)
    assert with_overrides(standard, omega0_tau=0.3).omega0 * standard.timing.tau == pytest.approx(0.3)


def test_preset_grids():
    assert len(preset_grid("table1")) == 4
    for name in ("fig3a", "fig3b", "fig3c", "fig4"):
        assert len(preset_grid(name)) == 20
    assert {c.ensemble.theta for c in preset_configs("fig3c")} == {3.2e-6}
    with pytest.raises(UnknownPreset):
        preset_grid("fig5")


def _row(**kw):
    row = {c: 0.0 for c in COLUMNS}
    row.update(preset="p", N=1, samples=4, error="")
    row.update(kw)
    return row


def test_single_row_csv(tmp_path):
    ds = Dataset("p", list(COLUMNS), [_row(shift_rel=1.234567891e-16)])
    out = tmp_path / "x.csv"
    side = emit_report(ds, out)
    lines = out.read_bytes().split(b"\r\n")
    assert len(lines) == 3 and lines[-1] == b""
    assert Path(side).exists()


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    rows = [_row(shift_rel=x, contrast=y, error='bad, "quoted"') for x, y in rng.normal(size=(5, 2)) * 1e-16]
    ds = Dataset("p", list(COLUMNS), rows)
    buf = io.StringIO()
    write_csv(ds, buf)
    path = tmp_path / "r.csv"
    path.write_text(buf.getvalue(), newline="")
    back = read_csv(path)
    for a, b in zip(rows, back):
        assert b["error"] == a["error"]
        assert b["shift_rel"] == pytest.approx(a["shift_rel"], rel=1e-6)
        assert b["contrast"] == pytest.approx(a["contrast"], rel=1e-6)


def test_empty_dataset_rejected(tmp_path):
    with pytest.raises(ValueError):
        emit_report(Dataset("p", list(COLUMNS)), tmp_path / "e.csv")


def test_threads_do_not_change_output():
    cfgs = [with_overrides(c, samples=4) for c in preset_configs("tb-zero")]
    one = run_configs(cfgs, "tb-zero", threads=1)
    four = run_configs(cfgs, "tb-zero", threads=4)
    for a, b in zip(one.rows, four.rows):
        assert [a[c] for c in NUMERIC] == [b[c] for c in NUMERIC]


def test_golden_table1(tmp_path):
    out = tmp_path / "t1.csv"
    assert cli.main(["--preset", "table1", "--out", str(out)]) == 0
    got, ref = read_csv(out), read_csv(GOLDEN / "table1.csv")
    assert len(got) == len(ref)
    for a, b in zip(got, ref):
        assert {c: a[c] for c in NUMERIC} == {c: b[c] for c in NUMERIC}
        assert a["error"] == b["error"] == ""


def test_cli_config_success(tmp_path, capsys):
    p = write(tmp_path, "mode = plane_wave\n")
    assert cli.main(["--config", str(p)]) == 0
    text = capsys.readouterr().out
    assert text.startswith("preset,N,")
    assert "1.18" in text


def test_cli_partial_failure(tmp_path):
    out = tmp_path / "o.csv"
    assert cli.main(["--preset", "table1", "--nrec", "2", "--out", str(out)]) == 2
    rows = read_csv(out)
    assert all("CutoffTooSmall" in r["error"] for r in rows)
    assert "ERROR" in Path(str(out) + ".summary.txt").read_text()


def test_cli_config_errors(tmp_path, capsys):
    assert cli.main(["--config", str(tmp_path / "missing.cfg")]) == 1
    assert cli.main(["--config", str(write(tmp_path, "pulse.power = 0\n"))]) == 1
    assert cli.main(["--preset", "table1", "--threads", "0"]) == 1
    assert "configuration error" in capsys.readouterr().err


def test_cli_sim_threads(monkeypatch, tmp_path):
    monkeypatch.setenv("SIM_THREADS", "zero")
    assert cli.main(["--config", str(write(tmp_path, "mode = plane_wave\n"))]) == 1
    monkeypatch.setenv("SIM_THREADS", "3")
    assert cli._threads(None) == 3
    assert cli._threads(2) == 2
    monkeypatch.delenv("SIM_THREADS")
    assert cli._threads(None) == 1


def test_console_script(tmp_path):
    p = write(tmp_path, "mode = plane_wave\npulse.power = 3\n")
    env = dict(os.environ, SIM_THREADS="2")
    res = subprocess.run([sys.executable, "-m", "recoilshift.cli", "--config", str(p), "--out",
                          str(tmp_path / "o.csv")], capture_output=True, text=True, env=env)
    assert res.returncode == 0, res.stderr
    assert read_csv(tmp_path / "o.csv")[0]["shift_rel"] == pytest.approx(-3.62e-16, rel=1e-3)


def test_cli_needs_source():
    with pytest.raises(SystemExit):
        cli.main([])
