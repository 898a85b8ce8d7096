"""Command-line front end.

Subcommands: simulate, scan, optimize, fit, waveform.  Every run reads
one TOML experiment config, writes versioned CSV files whose headers
record the schema, the config hash, and the seed, and (by default)
renders matplotlib figures next to the CSVs.  All rows are written by
the main process; worker processes only compute.
"""

from __future__ import annotations

import csv
import math
import sys
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from . import __version__
from .atom import ExcitationKind
from .bell import GateReport
from .config import (
    ConfigError,
    ExperimentConfig,
    load_config,
    mask_pairs,
)
from .dynamics import IntegratorConfig
from .noise import sample_run_pairs
from .optimize import (
    FitError,
    UnreachableTargetError,
    find_phase_shifts,
    fit_logistic,
    fit_power_law,
    pulse_area,
    search_adiabatic_parameters,
)
from .pipeline import evaluate_gate, gate_sectors, population_series
from .pulses import LcgParams, scale_amplitude, waveform_table

TWO_PI = 2.0 * math.pi

SCHEMAS = {
    "report": "rydgate-report-v1",
    "trajectory": "rydgate-trajectory-v1",
    "mc": "rydgate-mc-v1",
    "scan": "rydgate-scan-v1",
    "phases": "rydgate-phases-v1",
    "de": "rydgate-de-v1",
    "fit": "rydgate-fit-v1",
    "waveform": "rydgate-waveform-v1",
}


class CliFailure(click.ClickException):
    exit_code = 1


def _fail(exc: Exception) -> CliFailure:
    return CliFailure(f"{type(exc).__name__}: {exc}")


# ---------------------------------------------------------------------------
# CSV plumbing

def _meta_lines(schema_key: str, cfg_hash: str, seed: int | None) -> list[str]:
    seed_txt = "-" if seed is None else str(seed)
    return [
        f"# schema: {SCHEMAS[schema_key]}",
        f"# config: {cfg_hash}",
        f"# seed: {seed_txt}",
    ]


def write_csv(
    path: Path,
    schema_key: str,
    columns: list[str],
    rows,
    cfg_hash: str,
    seed: int | None,
) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        for line in _meta_lines(schema_key, cfg_hash, seed):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow(row)
    return path


def _fmt(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def read_csv(path: Path, schema_key: str) -> tuple[list[str], list[list[str]], str]:
    """Read one of our CSVs; enforce the schema header.

    Returns (columns, rows-as-strings, config hash).  A missing or
    different schema line is an error, never a silent reinterpretation.
    """
    want = SCHEMAS[schema_key]
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if first != f"# schema: {want}":
            raise ConfigError(
                f"{path}: expected '# schema: {want}', found {first!r}"
            )
        cfg_line = fh.readline().strip()
        cfg_hash = cfg_line.removeprefix("# config: ").strip() if cfg_line.startswith("# config:") else "-"
        pos = fh.tell()
        line = fh.readline()
        while line.startswith("#"):
            pos = fh.tell()
            line = fh.readline()
        fh.seek(pos)
        reader = csv.reader(fh)
        columns = next(reader)
        rows = [r for r in reader if r]
    return columns, rows, cfg_hash


class ScanWriter:
    """Append-mode scan CSV with resume support.

    Existing rows (matched by the formatted value in the first column)
    are kept and skipped on re-run; a schema, column, or config-hash
    mismatch aborts instead of mixing incompatible runs.  Each row is
    flushed as soon as it is computed, so an interrupted scan loses at
    most the point in flight.
    """

    def __init__(self, path: Path, columns: list[str], cfg_hash: str, seed: int):
        self.path = path
        self.done: set[str] = set()
        if path.exists():
            old_cols, rows, old_hash = read_csv(path, "scan")
            if old_hash != cfg_hash:
                raise ConfigError(
                    f"{path}: existing scan was produced by config {old_hash}, "
                    f"current config is {cfg_hash}; refusing to mix"
                )
            if old_cols != columns:
                raise ConfigError(
                    f"{path}: existing columns {old_cols} != requested {columns}"
                )
            self.done = {r[0] for r in rows}
            self._fh = open(path, "a", newline="")
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = open(path, "w", newline="")
            for line in _meta_lines("scan", cfg_hash, seed):
                self._fh.write(line + "\n")
            csv.writer(self._fh).writerow(columns)
            self._fh.flush()

    def key(self, value: float) -> str:
        return _fmt(float(value))

    def contains(self, value: float) -> bool:
        return self.key(value) in self.done

    def append(self, value: float, *rest) -> None:
        row = [self.key(value)] + [_fmt(v) for v in rest]
        csv.writer(self._fh).writerow(row)
        self._fh.flush()
        self.done.add(row[0])

    def close(self) -> None:
        self._fh.close()

    def rows(self):
        _, rows, _ = read_csv(self.path, "scan")
        return rows


# ---------------------------------------------------------------------------
# shared helpers

def _out_dir(cfg: ExperimentConfig, flag: str | None) -> Path:
    if flag:
        return Path(flag)
    if cfg.out_dir:
        return Path(cfg.out_dir)
    return Path("runs") / cfg.label


def _load(config_path: str, seed: int | None) -> ExperimentConfig:
    try:
        cfg = load_config(config_path)
    except (OSError, ConfigError) as exc:
        raise _fail(exc)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    return cfg


def _resolve_phases(cfg: ExperimentConfig) -> tuple[float, float, float | None]:
    """(phi_r, phi_big, searched F0 or None) honoring sequence.search."""
    if cfg.synthesis != "tqd" or not cfg.search_phases:
        return cfg.phi_r, cfg.phi_big, None
    res = find_phase_shifts(
        cfg.model(), cfg.base, synthesis="tqd",
        config=IntegratorConfig(step=cfg.step),
    )
    click.echo(
        f"phase search: phi_r = {res.phi_r / math.pi:.4f} pi, "
        f"phi_R = {res.phi_big / math.pi:.4f} pi, F0 = {res.fidelity:.6f}"
        + (" (flat landscape)" if res.flat else "")
    )
    return res.phi_r, res.phi_big, res.fidelity


def _report_rows(report: GateReport, cfg_hash: str, phi_r: float, phi_big: float):
    cols = [
        "kind", "synthesis", "t_gate_us", "f_intrinsic", "f_decay", "f_mean",
        "f_std_error", "phi_10_rad", "phi_11_rad", "phi_r_rad", "phi_big_rad",
        "pulse_area_over_2pi", "target", "config",
    ]
    row = [
        report.kind, report.synthesis, _fmt(report.t_gate),
        _fmt(report.f_intrinsic), _fmt(report.f_decay), _fmt(report.f_mean),
        _fmt(report.f_std_error), _fmt(report.phi_10), _fmt(report.phi_11),
        _fmt(phi_r), _fmt(phi_big), _fmt(report.pulse_area_over_2pi),
        report.target, cfg_hash,
    ]
    return cols, [row]


def _echo_report(report: GateReport) -> None:
    click.echo(
        f"{report.kind} {report.synthesis} gate, T_g = {report.t_gate:.4g} us: "
        f"F0 = {_fmt(report.f_intrinsic)}"
        + (f", F_decay = {_fmt(report.f_decay)}" if report.f_decay is not None else "")
        + (
            f", mean F = {_fmt(report.f_mean)} +- {_fmt(report.f_std_error)}"
            if report.f_mean is not None
            else ""
        )
    )


# ---------------------------------------------------------------------------
# commands

@click.group()
@click.version_option(version=__version__, prog_name="rydgate")
def main() -> None:
    """Rydberg-blockade CZ gate simulation and pulse synthesis."""


_config_opt = click.option(
    "--config", "config_path", required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Experiment TOML file.",
)
_seed_opt = click.option("--seed", type=int, default=None, help="Override run.seed.")
_workers_opt = click.option(
    "--workers", type=int, default=1, show_default=True,
    help="Worker processes for Monte-Carlo and scan points.",
)
_outdir_opt = click.option(
    "--out-dir", type=click.Path(file_okay=False), default=None,
    help="Output directory (default: run.out_dir or runs/<label>).",
)
_figures_opt = click.option(
    "--figures/--no-figures", default=True, show_default=True,
    help="Render PNG figures next to the CSV output.",
)


@main.command()
@_config_opt
@_seed_opt
@_workers_opt
@_outdir_opt
@_figures_opt
def simulate(config_path, seed, workers, out_dir, figures):
    """Evaluate one gate: intrinsic, decay-only, and Monte-Carlo stages."""
    cfg = _load(config_path, seed)
    out = _out_dir(cfg, out_dir)
    model = cfg.model()
    try:
        phi_r, phi_big, _ = _resolve_phases(cfg)
        schedule = cfg.schedule(phi_r, phi_big)
        pairs = None
        if cfg.noise.any_mc:
            pairs = mask_pairs(
                sample_run_pairs(model, cfg.seed, cfg.noise.runs), cfg.noise
            )
        report, run, summary = evaluate_gate(
            model,
            schedule,
            IntegratorConfig(step=cfg.step),
            with_decay=cfg.noise.decay,
            workers=workers,
            pairs=pairs,
        )
    except (ValueError, RuntimeError) as exc:
        raise _fail(exc)

    cols, rows = _report_rows(report, cfg.source_hash, phi_r, phi_big)
    write_csv(out / "report.csv", "report", cols, rows, cfg.source_hash, cfg.seed)

    for name, sector in zip(("01", "11"), gate_sectors(cfg.kind)):
        times, pops = population_series(
            model, schedule, sector, IntegratorConfig(step=cfg.step)
        )
        tcols = ["t_us"] + [f"p{k}" for k in range(pops.shape[1])]
        trows = [[_fmt(t)] + [_fmt(p) for p in prow] for t, prow in zip(times, pops)]
        write_csv(
            out / f"trajectory_{name}.csv", "trajectory", tcols, trows,
            cfg.source_hash, cfg.seed,
        )

    if summary is not None:
        mrows = [[str(k), _fmt(f)] for k, f in enumerate(summary.fidelities)]
        write_csv(
            out / "mc_runs.csv", "mc", ["run", "fidelity"], mrows,
            cfg.source_hash, cfg.seed,
        )

    if figures:
        from . import plots

        plots.plot_waveform(schedule, out / "waveform.png")
        if summary is not None:
            plots.plot_mc_histogram(summary.fidelities, out / "mc_hist.png")

    _echo_report(report)
    click.echo(f"wrote {out}/report.csv")


def _grid_values(spec: str) -> np.ndarray:
    """Parse 'start:stop:count' (inclusive linspace) or 'v1,v2,...'."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid {spec!r} must be start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ConfigError("grid count must be >= 1")
        return np.linspace(start, stop, count)
    return np.array([float(v) for v in spec.split(",") if v.strip()])


def _scan_config(cfg: ExperimentConfig, variable: str, value: float) -> ExperimentConfig:
    if variable == "t_gate":
        n_seg = 2 if cfg.synthesis == "adiabatic" else 4
        d = value / n_seg
        if isinstance(cfg.base, LcgParams):
            base = replace(cfg.base, duration=d, tau=cfg.base.tau / cfg.base.duration * d)
        else:
            base = replace(
                cfg.base, duration=d,
                tau_b=cfg.base.tau_b / cfg.base.duration * d,
                tau_r=cfg.base.tau_r / cfg.base.duration * d,
            )
        return replace(cfg, t_gate=value, base=base)
    if variable == "omega_max":
        if isinstance(cfg.base, LcgParams):
            factor = TWO_PI * value / cfg.base.omega0
        else:
            factor = TWO_PI * value / max(cfg.base.omega_b0, cfg.base.omega_r0)
        return replace(cfg, base=scale_amplitude(cfg.base, factor))
    raise ConfigError(f"unknown scan variable {variable!r}")


_SCAN_COLUMNS = {
    "t_gate": ["value", "f_intrinsic", "f_mean", "f_std_error"],
    "omega_max": ["value", "f_intrinsic", "f_mean", "f_std_error"],
    "resource": ["t_gate_us", "omega_max_mhz", "f_intrinsic"],
    "speedup": ["omega_budget_mhz", "speedup", "t_adiabatic_us", "t_tqd_us"],
}


def _fidelity_point(cfg: ExperimentConfig, workers: int) -> tuple:
    phi_r, phi_big, _ = _resolve_phases(cfg)
    schedule = cfg.schedule(phi_r, phi_big)
    pairs = None
    if cfg.noise.any_mc:
        pairs = mask_pairs(
            sample_run_pairs(cfg.model(), cfg.seed, cfg.noise.runs), cfg.noise
        )
    report, _, _ = evaluate_gate(
        cfg.model(),
        schedule,
        IntegratorConfig(step=cfg.step),
        with_decay=False,
        workers=workers,
        pairs=pairs,
    )
    return report.f_intrinsic, report.f_mean, report.f_std_error


def _resource_point_row(cfg: ExperimentConfig, t_gate: float, target_f0: float | None):
    from .optimize import min_omega_search

    base = cfg.base
    if not isinstance(base, LcgParams):
        raise CliFailure("resource scans are defined for the dipole scheme")
    if target_f0 is None:
        target_f0 = 0.9989 if cfg.synthesis == "tqd" else 0.989
    res = min_omega_search(
        t_gate,
        target_f0,
        synthesis=cfg.synthesis,
        model=cfg.model(),
        delta0=base.delta0,
        tau_frac=base.tau / base.duration,
        config=IntegratorConfig(step=cfg.step),
    )
    return res.omega_max / TWO_PI, res.fidelity


def _speedup_point_row(cfg: ExperimentConfig, budget_mhz: float, target_f0: float | None):
    from .optimize import min_time_search

    base = cfg.base
    if not isinstance(base, LcgParams):
        raise CliFailure("speedup scans are defined for the dipole scheme")
    kwargs = dict(
        model=cfg.model(),
        delta0=base.delta0,
        tau_frac=base.tau / base.duration,
        config=IntegratorConfig(step=cfg.step),
    )
    target = 0.99 if target_f0 is None else target_f0
    t_arp, _ = min_time_search(TWO_PI * budget_mhz, target, synthesis="adiabatic", **kwargs)
    t_tqd, _ = min_time_search(TWO_PI * budget_mhz, target, synthesis="tqd", **kwargs)
    return t_arp / t_tqd, t_arp, t_tqd


@main.command()
@_config_opt
@click.option(
    "--variable",
    type=click.Choice(["t_gate", "omega_max", "resource", "speedup"]),
    required=True,
    help=(
        "t_gate / omega_max: gate fidelity versus total time (us) or peak "
        "Rabi / 2pi (MHz).  resource: minimum peak Rabi reaching an "
        "intrinsic-fidelity target versus gate time.  speedup: adiabatic "
        "over synthesized minimum gate time versus a peak-Rabi budget."
    ),
)
@click.option(
    "--grid", required=True,
    help="Grid values: 'start:stop:count' or comma-separated list.",
)
@click.option(
    "--target-f0", type=float, default=None,
    help="Intrinsic-fidelity target for resource/speedup scans.",
)
@_seed_opt
@_workers_opt
@_outdir_opt
@_figures_opt
def scan(config_path, variable, grid, target_f0, seed, workers, out_dir, figures):
    """Sweep one variable; one CSV row per grid point, resumable."""
    cfg = _load(config_path, seed)
    out = _out_dir(cfg, out_dir)
    try:
        values = _grid_values(grid)
        writer = ScanWriter(
            out / f"scan_{variable}.csv", _SCAN_COLUMNS[variable],
            cfg.source_hash, cfg.seed,
        )
    except ConfigError as exc:
        raise _fail(exc)

    failures = 0
    for value in values:
        value = float(value)
        if writer.contains(value):
            click.echo(f"{variable} = {value:.6g}: already done, skipping")
            continue
        try:
            if variable in ("t_gate", "omega_max"):
                point = _scan_config(cfg, variable, value)
                f0, f_mean, f_err = _fidelity_point(point, workers)
                writer.append(value, f0, f_mean, f_err)
                click.echo(
                    f"{variable} = {value:.6g}: F0 = {_fmt(f0)}"
                    + (f", mean F = {_fmt(f_mean)}" if f_mean is not None else "")
                )
            elif variable == "resource":
                omega_mhz, f0 = _resource_point_row(cfg, value, target_f0)
                writer.append(value, omega_mhz, f0)
                click.echo(
                    f"T_g = {value:.6g} us: peak Rabi / 2pi = {omega_mhz:.4f} MHz "
                    f"(F0 = {f0:.6f})"
                )
            else:
                ratio, t_arp, t_tqd = _speedup_point_row(cfg, value, target_f0)
                writer.append(value, ratio, t_arp, t_tqd)
                click.echo(
                    f"budget = {value:.6g} MHz: speedup = {ratio:.4f} "
                    f"(adiabatic {t_arp:.4f} us / synthesized {t_tqd:.4f} us)"
                )
        except (ValueError, RuntimeError, UnreachableTargetError) as exc:
            click.echo(f"{variable} = {value:.6g}: FAILED ({exc})", err=True)
            pad = [math.nan] * (len(_SCAN_COLUMNS[variable]) - 1)
            writer.append(value, *pad)
            failures += 1
    rows = writer.rows()
    writer.close()

    if figures and rows:
        from . import plots

        data = np.array([[float(c) for c in row] for row in rows], dtype=float)
        data = data[np.argsort(data[:, 0])]
        if variable in ("t_gate", "omega_max"):
            label = "T_g (us)" if variable == "t_gate" else "peak Rabi / 2pi (MHz)"
            plots.plot_scan(
                data[:, 0], data[:, 1], data[:, 2], data[:, 3], label,
                out / f"scan_{variable}.png",
            )
        elif variable == "resource":
            plots.plot_xy(
                data[:, 0], data[:, 1], "T_g (us)", "min peak Rabi / 2pi (MHz)",
                out / f"scan_{variable}.png", loglog=True,
            )
        else:
            plots.plot_xy(
                data[:, 0], data[:, 1], "peak Rabi budget / 2pi (MHz)",
                "gate-time speedup", out / f"scan_{variable}.png",
            )
    click.echo(f"wrote {out}/scan_{variable}.csv ({failures} failed point(s))")


@main.command()
@_config_opt
@click.option(
    "--mode", type=click.Choice(["phases", "pulse"]), default="phases",
    show_default=True,
    help="phases: grid+simplex phase-shift search; pulse: DE over the pulse family.",
)
@click.option(
    "--generations", type=int, default=300, show_default=True,
    help="DE generation budget (pulse mode).",
)
@_seed_opt
@_workers_opt
@_outdir_opt
def optimize(config_path, mode, generations, seed, workers, out_dir):
    """Search gate parameters: segment phases or the full pulse family."""
    cfg = _load(config_path, seed)
    out = _out_dir(cfg, out_dir)
    model = cfg.model()

    if mode == "phases":
        if cfg.synthesis != "tqd":
            raise CliFailure("phase search applies to the synthesized (tqd) gate")
        try:
            res = find_phase_shifts(
                model, cfg.base, synthesis="tqd",
                config=IntegratorConfig(step=cfg.step),
            )
        except (ValueError, RuntimeError) as exc:
            raise _fail(exc)
        cols = ["phi_r_rad", "phi_big_rad", "f_intrinsic", "flat"]
        row = [_fmt(res.phi_r), _fmt(res.phi_big), _fmt(res.fidelity), str(res.flat)]
        write_csv(out / "phases.csv", "phases", cols, [row], cfg.source_hash, cfg.seed)
        click.echo(
            f"best phases: phi_r = {res.phi_r / math.pi:.4f} pi, "
            f"phi_R = {res.phi_big / math.pi:.4f} pi, F0 = {res.fidelity:.6f}"
        )
        click.echo(f"wrote {out}/phases.csv")
        return

    from .optimize import DeConfig

    try:
        de = search_adiabatic_parameters(
            cfg.kind,
            DeConfig(max_generations=generations, seed=cfg.seed),
            model=model,
            step=cfg.step,
            workers=workers,
        )
    except (ValueError, RuntimeError) as exc:
        raise _fail(exc)
    from .optimize import LCG_DOMAIN, ZCHG_DOMAIN

    domain = LCG_DOMAIN if cfg.kind is ExcitationKind.DIPOLE else ZCHG_DOMAIN
    cols = list(domain.names) + ["f_intrinsic", "generations", "evaluations", "early_stop"]
    row = [_fmt(float(v)) for v in de.x] + [
        _fmt(-de.value), str(de.n_generations), str(de.n_evaluations), str(de.stopped_early)
    ]
    write_csv(out / "de_result.csv", "de", cols, [row], cfg.source_hash, cfg.seed)
    click.echo(
        "DE best: "
        + ", ".join(f"{n} = {float(v):.5g}" for n, v in zip(domain.names, de.x))
        + f"; F0 = {-de.value:.6f} after {de.n_generations} generation(s)"
    )
    click.echo(f"wrote {out}/de_result.csv")


_FIT_COLUMNS = {
    "power": ("t_gate_us", "omega_max_mhz"),
    "logistic": ("omega_budget_mhz", "speedup"),
}


@main.command(name="fit")
@click.option(
    "--csv", "csv_path", required=True, type=click.Path(exists=True, dir_okay=False),
    help="Scan CSV to fit (columns must match the model).",
)
@click.option(
    "--model", "model_name", type=click.Choice(["power", "logistic"]), required=True,
)
@_outdir_opt
@_figures_opt
def fit_cmd(csv_path, model_name, out_dir, figures):
    """Fit a resource scan: power law (Rabi vs time) or logistic (speedup)."""
    path = Path(csv_path)
    out = Path(out_dir) if out_dir else path.parent
    try:
        columns, rows, cfg_hash = read_csv(path, "scan")
    except (ConfigError, OSError) as exc:
        raise _fail(exc)
    want = _FIT_COLUMNS[model_name]
    if tuple(columns[:2]) != want:
        raise CliFailure(
            f"{path}: fit model {model_name!r} needs columns {want}, found {tuple(columns[:2])}"
        )
    data = np.array([[float(r[0]), float(r[1])] for r in rows], dtype=float)
    try:
        fit = (fit_power_law if model_name == "power" else fit_logistic)(
            data[:, 0], data[:, 1]
        )
    except (FitError, ValueError) as exc:
        raise _fail(exc)

    cols = ["parameter", "value", "sigma"]
    prows = [[n, _fmt(float(v)), _fmt(float(s))]
             for n, v, s in zip(fit.names, fit.values, fit.sigmas)]
    prows.append(["r_squared", _fmt(fit.r_squared), ""])
    write_csv(out / f"fit_{model_name}.csv", "fit", cols, prows, cfg_hash, None)

    if figures:
        from . import plots

        plots.plot_fit(data[:, 0], data[:, 1], fit, model_name,
                       out / f"fit_{model_name}.png")
    click.echo(
        ", ".join(f"{n} = {float(v):.5g} +- {float(s):.2g}"
                  for n, v, s in zip(fit.names, fit.values, fit.sigmas))
        + f", R^2 = {fit.r_squared:.5f}"
    )
    click.echo(f"wrote {out}/fit_{model_name}.csv")


@main.command()
@_config_opt
@_seed_opt
@_outdir_opt
@_figures_opt
def waveform(config_path, seed, out_dir, figures):
    """Export the synthesized drive waveform of one gate sequence."""
    cfg = _load(config_path, seed)
    out = _out_dir(cfg, out_dir)
    try:
        phi_r, phi_big, _ = _resolve_phases(cfg)
        schedule = cfg.schedule(phi_r, phi_big)
        names, table = waveform_table(schedule)
    except (ValueError, RuntimeError) as exc:
        raise _fail(exc)
    rows = [[_fmt(float(v)) for v in row] for row in table]
    write_csv(out / "waveform.csv", "waveform", names, rows, cfg.source_hash, cfg.seed)
    area = pulse_area(schedule)
    if figures:
        from . import plots

        plots.plot_waveform(schedule, out / "waveform.png")
    click.echo(
        f"{cfg.kind.value} {cfg.synthesis} sequence, T_g = {cfg.t_gate:.4g} us, "
        f"pulse area / 2pi = {area:.4f}"
    )
    click.echo(f"wrote {out}/waveform.csv")


if __name__ == "__main__":
    main()
