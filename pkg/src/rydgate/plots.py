"""Figure rendering for CLI reports.

Each function draws one matplotlib figure from already-computed data and
writes it next to the corresponding CSV.  The library core never
imports this module; only the CLI report path does.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .optimize import FitResult, _logistic_model, _power_model
from .pulses import PulseSchedule, waveform_table


def plot_waveform(schedule: PulseSchedule, path: str | Path) -> Path:
    """Synthesized drive amplitudes and detuning over the full sequence."""
    names, table = waveform_table(schedule)
    t = table[:, 0]
    fig, (ax_amp, ax_det) = plt.subplots(2, 1, sharex=True, figsize=(7, 5))
    det_col = names.index("delta_mhz" if "delta_mhz" in names else "delta_blue_mhz")
    for k, name in enumerate(names):
        if name.startswith("omega"):
            ax_amp.plot(t, table[:, k], label=name.replace("_mhz", "") + " / 2π (MHz)")
    ax_det.plot(t, table[:, det_col], color="tab:green",
                label=names[det_col].replace("_mhz", "") + " / 2π (MHz)")
    for seg in schedule.segments[1:]:
        for ax in (ax_amp, ax_det):
            ax.axvline(seg.start, color="0.8", lw=0.8, zorder=0)
    ax_amp.set_ylabel("coupling / 2π (MHz)")
    ax_det.set_ylabel("detuning / 2π (MHz)")
    ax_det.set_xlabel("t (μs)")
    ax_amp.legend(loc="best", fontsize=8)
    ax_det.legend(loc="best", fontsize=8)
    ax_amp.set_title(f"{schedule.kind.value} {schedule.synthesis} sequence")
    return _save(fig, path)


def plot_mc_histogram(fidelities, path: str | Path) -> Path:
    """Distribution of Monte-Carlo Bell-state fidelities."""
    f = np.asarray(fidelities, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(f, bins=min(40, max(10, f.size // 5)), color="tab:blue", alpha=0.85)
    ax.axvline(f.mean(), color="tab:red", lw=1.5, label=f"mean = {f.mean():.5f}")
    ax.set_xlabel("Bell-state fidelity")
    ax.set_ylabel("runs")
    ax.legend(loc="best", fontsize=8)
    ax.set_title(f"{f.size} Monte-Carlo runs")
    return _save(fig, path)


def plot_scan(values, f0, f_mean, f_err, variable: str, path: str | Path) -> Path:
    """Fidelity versus the scanned variable, infidelity on a log axis."""
    v = np.asarray(values, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    f0 = np.asarray(f0, dtype=float)
    ok = np.isfinite(f0)
    ax.semilogy(v[ok], 1.0 - f0[ok], "o-", label="1 - F⁰")
    fm = np.asarray(f_mean, dtype=float)
    if np.isfinite(fm).any():
        ok = np.isfinite(fm)
        err = np.asarray(f_err, dtype=float)[ok]
        ax.errorbar(v[ok], 1.0 - fm[ok], yerr=err, fmt="s", capsize=3,
                    label="1 - mean F", color="tab:orange")
    ax.set_xlabel(variable)
    ax.set_ylabel("gate infidelity")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, path)


def plot_xy(x, y, xlabel: str, ylabel: str, path: str | Path, *, loglog: bool = False) -> Path:
    """Single scan curve with labeled axes."""
    fig, ax = plt.subplots(figsize=(6, 4))
    plot = ax.loglog if loglog else ax.plot
    plot(np.asarray(x, dtype=float), np.asarray(y, dtype=float), "o-")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, path)


def plot_fit(x, y, fit: FitResult, model: str, path: str | Path) -> Path:
    """Scan data with the fitted curve overlaid."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    grid = np.linspace(x.min(), x.max(), 400)
    if model == "power":
        curve = _power_model(grid, *fit.values)
    elif model == "logistic":
        curve = _logistic_model(grid, *fit.values)
    else:
        raise ValueError(f"unknown fit model {model!r}")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(x, y, "o", label="scan")
    ax.plot(grid, curve, "-", label=f"{model} fit, R² = {fit.r_squared:.4f}")
    ax.set_xlabel("scan variable")
    ax.set_ylabel("fitted quantity")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
