"""End-to-end command-line checks on small, fast configurations."""

import math
import textwrap

import numpy as np
import pytest
from click.testing import CliRunner

from rydgate.cli import main, read_csv, write_csv
from rydgate.config import load_config


@pytest.fixture()
def runner():
    return CliRunner()


def text(result):
    out = result.output
    try:
        out += result.stderr
    except ValueError:
        pass
    return out


DIPOLE_TQD = textwrap.dedent(
    """
    [gate]
    kind = "dipole"
    synthesis = "tqd"
    t_gate_us = 0.02

    [pulse]
    omega0_mhz = 24.92
    delta0_mhz = 49.55
    tau_fraction = 0.266

    [sequence]
    phi_r_over_pi = 0.4
    phi_big_over_pi = 1.9

    [integrator]
    step_us = 1e-4
    """
)

QUAD_ADIABATIC = textwrap.dedent(
    """
    [gate]
    kind = "quadrupole"
    synthesis = "adiabatic"
    t_gate_us = 0.04

    [pulse]
    omega_b0_mhz = 300.0
    omega_r0_mhz = 300.0
    delta_b_mhz = 1762.90
    tau_b_fraction = 0.35
    tau_r_fraction = 0.35

    [integrator]
    step_us = 1e-4
    """
)


def write(path, body):
    path.write_text(body)
    return str(path)


def test_version_flag(runner):
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0
    assert "rydgate" in result.output


def test_simulate_writes_report_trajectories_and_mc(runner, tmp_path):
    cfg_path = write(tmp_path / "gate.toml", DIPOLE_TQD + "\n[noise]\nruns = 3\n")
    out = tmp_path / "out"
    result = runner.invoke(
        main,
        ["simulate", "--config", cfg_path, "--seed", "5", "--workers", "1",
         "--out-dir", str(out)],
    )
    assert result.exit_code == 0, text(result)
    for name in ("report.csv", "trajectory_01.csv", "trajectory_11.csv",
                 "mc_runs.csv", "waveform.png", "mc_hist.png"):
        assert (out / name).exists(), name

    cols, rows, cfg_hash = read_csv(out / "report.csv", "report")
    assert cfg_hash == load_config(cfg_path).source_hash
    assert len(rows) == 1
    row = dict(zip(cols, rows[0]))
    assert row["kind"] == "dipole"
    assert row["synthesis"] == "tqd"
    assert 0.0 <= float(row["f_intrinsic"]) <= 1.0
    assert np.isfinite(float(row["f_mean"]))
    assert "# seed: 5" in (out / "report.csv").read_text()

    _, mc_rows, _ = read_csv(out / "mc_runs.csv", "mc")
    assert len(mc_rows) == 3

    tcols, trows, _ = read_csv(out / "trajectory_01.csv", "trajectory")
    assert tcols[0] == "t_us"
    assert float(trows[0][1]) == pytest.approx(1.0)


def test_simulate_without_noise_or_figures(runner, tmp_path):
    cfg_path = write(tmp_path / "gate.toml", DIPOLE_TQD)
    out = tmp_path / "out"
    result = runner.invoke(
        main,
        ["simulate", "--config", cfg_path, "--out-dir", str(out), "--no-figures"],
    )
    assert result.exit_code == 0, text(result)
    assert not (out / "mc_runs.csv").exists()
    assert not (out / "waveform.png").exists()
    cols, rows, _ = read_csv(out / "report.csv", "report")
    row = dict(zip(cols, rows[0]))
    assert row["f_mean"] == "nan"


def test_simulate_rejects_invalid_config(runner, tmp_path):
    cfg_path = write(tmp_path / "bad.toml", DIPOLE_TQD + "\n[typo]\nx = 1\n")
    result = runner.invoke(main, ["simulate", "--config", cfg_path])
    assert result.exit_code == 1
    assert "ConfigError" in text(result)


def test_scan_t_gate_is_resumable(runner, tmp_path):
    cfg_path = write(tmp_path / "gate.toml", DIPOLE_TQD)
    out = tmp_path / "scan"
    base_args = ["scan", "--config", cfg_path, "--variable", "t_gate",
                 "--out-dir", str(out)]
    first = runner.invoke(main, base_args + ["--grid", "0.02,0.04"])
    assert first.exit_code == 0, text(first)
    cols, rows, _ = read_csv(out / "scan_t_gate.csv", "scan")
    assert cols == ["value", "f_intrinsic", "f_mean", "f_std_error"]
    assert len(rows) == 2
    assert (out / "scan_t_gate.png").exists()

    second = runner.invoke(main, base_args + ["--grid", "0.02:0.06:3"])
    assert second.exit_code == 0, text(second)
    assert text(second).count("already done, skipping") == 2
    _, rows, _ = read_csv(out / "scan_t_gate.csv", "scan")
    assert len(rows) == 3


def test_scan_refuses_other_configs_results(runner, tmp_path):
    cfg_path = write(tmp_path / "gate.toml", DIPOLE_TQD)
    out = tmp_path / "scan"
    args = ["scan", "--variable", "t_gate", "--grid", "0.02", "--out-dir", str(out)]
    assert runner.invoke(main, args + ["--config", cfg_path]).exit_code == 0

    other = write(
        tmp_path / "other.toml", DIPOLE_TQD.replace("24.92", "20.0")
    )
    result = runner.invoke(main, args + ["--config", other])
    assert result.exit_code == 1
    assert "refusing to mix" in text(result)


def test_scan_omega_max_and_failed_points(runner, tmp_path):
    cfg_path = write(tmp_path / "gate.toml", DIPOLE_TQD)
    out = tmp_path / "scan"
    result = runner.invoke(
        main,
        ["scan", "--config", cfg_path, "--variable", "omega_max",
         "--grid", "20:30:2", "--out-dir", str(out), "--no-figures"],
    )
    assert result.exit_code == 0, text(result)
    _, rows, _ = read_csv(out / "scan_omega_max.csv", "scan")
    assert [r[0] for r in rows] == ["20", "30"]

    bad = runner.invoke(
        main,
        ["scan", "--config", cfg_path, "--variable", "t_gate",
         "--grid", "-0.01,0.06", "--out-dir", str(out), "--no-figures"],
    )
    assert bad.exit_code == 0, text(bad)
    assert "FAILED" in text(bad)
    assert "1 failed point(s)" in text(bad)
    _, rows, _ = read_csv(out / "scan_t_gate.csv", "scan")
    failed = [r for r in rows if r[0] == "-0.01"]
    assert len(failed) == 1 and failed[0][1] == "nan"


def test_scan_rejects_bad_grids(runner, tmp_path):
    cfg_path = write(tmp_path / "gate.toml", DIPOLE_TQD)
    for grid in ("1:2", "1:2:3:4", "0.02:0.04:0"):
        result = runner.invoke(
            main,
            ["scan", "--config", cfg_path, "--variable", "t_gate",
             "--grid", grid, "--out-dir", str(tmp_path / "x")],
        )
        assert result.exit_code == 1, grid


def test_scan_resource_requires_dipole(runner, tmp_path):
    cfg_path = write(tmp_path / "gate.toml", QUAD_ADIABATIC)
    result = runner.invoke(
        main,
        ["scan", "--config", cfg_path, "--variable", "resource",
         "--grid", "0.5", "--out-dir", str(tmp_path / "x"), "--no-figures"],
    )
    assert result.exit_code == 1
    assert "dipole" in text(result)


def test_optimize_phases_writes_csv(runner, tmp_path):
    cfg_path = write(tmp_path / "gate.toml", DIPOLE_TQD)
    out = tmp_path / "opt"
    result = runner.invoke(
        main, ["optimize", "--config", cfg_path, "--out-dir", str(out)]
    )
    assert result.exit_code == 0, text(result)
    assert "best phases" in result.output
    cols, rows, _ = read_csv(out / "phases.csv", "phases")
    assert cols == ["phi_r_rad", "phi_big_rad", "f_intrinsic", "flat"]
    row = dict(zip(cols, rows[0]))
    assert 0.0 <= float(row["phi_r_rad"]) < 2.0 * math.pi
    assert row["flat"] == "False"

    adiabatic = write(tmp_path / "arp.toml", QUAD_ADIABATIC)
    refused = runner.invoke(
        main, ["optimize", "--config", adiabatic, "--out-dir", str(out)]
    )
    assert refused.exit_code == 1
    assert "tqd" in text(refused)


def test_optimize_pulse_mode_runs_de(runner, tmp_path):
    cfg_path = write(
        tmp_path / "gate.toml", DIPOLE_TQD.replace("step_us = 1e-4", "step_us = 5e-4")
    )
    out = tmp_path / "de"
    result = runner.invoke(
        main,
        ["optimize", "--config", cfg_path, "--mode", "pulse",
         "--generations", "1", "--out-dir", str(out)],
    )
    assert result.exit_code == 0, text(result)
    assert "DE best" in result.output
    cols, rows, _ = read_csv(out / "de_result.csv", "de")
    assert cols[:4] == ["duration_us", "omega0_mhz", "delta0_mhz", "tau_frac"]
    row = dict(zip(cols, rows[0]))
    assert 0.0 <= float(row["f_intrinsic"]) <= 1.0
    assert int(row["evaluations"]) >= 60


def test_fit_power_roundtrip(runner, tmp_path):
    t = np.geomspace(0.12, 1.0, 12)
    y = 4.0 * t ** (-2.5) + 1.0
    scan_csv = tmp_path / "scan_resource.csv"
    write_csv(
        scan_csv, "scan", ["t_gate_us", "omega_max_mhz", "f_intrinsic"],
        [[f"{a:.10g}", f"{b:.10g}", "0.999"] for a, b in zip(t, y)],
        "abc123def456", 0,
    )
    result = runner.invoke(
        main, ["fit", "--csv", str(scan_csv), "--model", "power",
               "--out-dir", str(tmp_path)],
    )
    assert result.exit_code == 0, text(result)
    assert (tmp_path / "fit_power.png").exists()
    cols, rows, cfg_hash = read_csv(tmp_path / "fit_power.csv", "fit")
    assert cols == ["parameter", "value", "sigma"]
    assert cfg_hash == "abc123def456"
    values = {r[0]: r[1] for r in rows}
    assert float(values["p"]) == pytest.approx(2.5, abs=1e-6)
    assert float(values["r_squared"]) == pytest.approx(1.0, abs=1e-9)

    mismatched = runner.invoke(
        main, ["fit", "--csv", str(scan_csv), "--model", "logistic"]
    )
    assert mismatched.exit_code == 1
    assert "needs columns" in text(mismatched)


def test_fit_logistic_roundtrip(runner, tmp_path):
    x = np.linspace(5.0, 40.0, 16)
    y = 2.0 / (1.0 + np.exp(-0.5 * x + 10.0)) + 2.0
    scan_csv = tmp_path / "scan_speedup.csv"
    write_csv(
        scan_csv, "scan", ["omega_budget_mhz", "speedup"],
        [[f"{a:.10g}", f"{b:.10g}"] for a, b in zip(x, y)],
        "feedc0ffee12", 7,
    )
    result = runner.invoke(
        main, ["fit", "--csv", str(scan_csv), "--model", "logistic",
               "--out-dir", str(tmp_path), "--no-figures"],
    )
    assert result.exit_code == 0, text(result)
    _, rows, _ = read_csv(tmp_path / "fit_logistic.csv", "fit")
    values = {r[0]: r[1] for r in rows}
    assert float(values["b"]) == pytest.approx(0.5, abs=1e-6)
    assert not (tmp_path / "fit_logistic.png").exists()


def test_fit_rejects_wrong_schema(runner, tmp_path):
    other = tmp_path / "report.csv"
    write_csv(other, "report", ["kind"], [["dipole"]], "abc", 0)
    result = runner.invoke(main, ["fit", "--csv", str(other), "--model", "power"])
    assert result.exit_code == 1
    assert "expected" in text(result)


def test_waveform_command(runner, tmp_path):
    cfg_path = write(tmp_path / "arp.toml", QUAD_ADIABATIC)
    out = tmp_path / "wave"
    result = runner.invoke(
        main, ["waveform", "--config", cfg_path, "--out-dir", str(out)]
    )
    assert result.exit_code == 0, text(result)
    assert "pulse area / 2pi" in result.output
    assert (out / "waveform.png").exists()
    cols, rows, _ = read_csv(out / "waveform.csv", "waveform")
    assert cols[0] == "t_us"
    assert len(cols) == 5
    times = [float(r[0]) for r in rows]
    assert times[0] == 0.0
    assert times[-1] == pytest.approx(0.04)
    assert all(b >= a for a, b in zip(times, times[1:]))


def test_waveform_runs_phase_search_when_requested(runner, tmp_path):
    body = DIPOLE_TQD.replace(
        "phi_r_over_pi = 0.4\nphi_big_over_pi = 1.9", "search = true"
    )
    cfg_path = write(tmp_path / "search.toml", body)
    out = tmp_path / "wave"
    result = runner.invoke(
        main,
        ["waveform", "--config", cfg_path, "--out-dir", str(out), "--no-figures"],
    )
    assert result.exit_code == 0, text(result)
    assert "phase search:" in result.output
    assert (out / "waveform.csv").exists()


def test_out_dir_defaults(runner, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    configured = tmp_path / "configured_out"
    body = DIPOLE_TQD + f'\n[run]\nlabel = "demo"\nout_dir = "{configured}"\n'
    cfg_path = write(tmp_path / "gate.toml", body)
    result = runner.invoke(main, ["waveform", "--config", cfg_path, "--no-figures"])
    assert result.exit_code == 0, text(result)
    assert (configured / "waveform.csv").exists()

    body2 = DIPOLE_TQD + '\n[run]\nlabel = "demo2"\n'
    cfg2 = write(tmp_path / "gate2.toml", body2)
    result = runner.invoke(main, ["waveform", "--config", cfg2, "--no-figures"])
    assert result.exit_code == 0, text(result)
    assert (tmp_path / "runs" / "demo2" / "waveform.csv").exists()
