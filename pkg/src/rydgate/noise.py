"""Quasi-static technical-noise sampling and Monte-Carlo statistics.

Each Monte-Carlo run draws one static realization per atom: a trap
position (normal in each axis), a laser-intensity factor per beam, and
Doppler plus magnetic detuning shifts.  The position enters through the
Gaussian-beam spatial form factor evaluated at the sampled offset; the
detuning widths follow sigma = sqrt(2)/T2 for the respective dephasing
time.  All draws for run k come from an independent generator spawned
from (seed, k), so ensembles are reproducible run by run regardless of
batching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .atom import AtomModel, AtomNoise, LaserBeam


def spatial_form_factor(x: float, y: float, z: float, beam: LaserBeam):
    """Gaussian-beam amplitude factor at offset (x, y, z) um from the focus.

    p = exp(-(x^2 + y^2) / (w^2 (1 + z^2/L^2))) / sqrt(1 + z^2/L^2)
    with w the waist and L the Rayleigh length.
    """
    if beam.waist_um <= 0 or beam.rayleigh_um <= 0:
        raise ValueError("beam geometry must be positive")
    spread = 1.0 + (np.asarray(z) / beam.rayleigh_um) ** 2
    radial = (np.asarray(x) ** 2 + np.asarray(y) ** 2) / (beam.waist_um**2 * spread)
    return np.exp(-radial) / np.sqrt(spread)


def detuning_sigmas(model: AtomModel) -> tuple[float, float]:
    """(sigma_doppler, sigma_magnetic) in rad/us: sqrt(2)/T2 each."""
    return math.sqrt(2.0) / model.t2_doppler, math.sqrt(2.0) / model.t2_magnetic


def sample_noise(model: AtomModel, rng: np.random.Generator) -> AtomNoise:
    """One static noise realization for a single atom.

    Draw order is fixed (position, intensity factors per laser, Doppler,
    magnetic) so a given generator state always yields the same
    realization.  The intensity factor sqrt(1 + N(0, sigma_i^2)) is
    redrawn in the vanishingly rare case of a negative radicand.
    """
    sx, sy, sz = model.sigma_position
    x = rng.normal(0.0, sx)
    y = rng.normal(0.0, sy)
    z = rng.normal(0.0, sz)
    spatial = tuple(float(spatial_form_factor(x, y, z, beam)) for beam in model.lasers)
    intensity = []
    for beam in model.lasers:
        radicand = 1.0 + rng.normal(0.0, beam.sigma_intensity)
        while radicand < 0.0:
            radicand = 1.0 + rng.normal(0.0, beam.sigma_intensity)
        intensity.append(math.sqrt(radicand))
    sigma_d, sigma_m = detuning_sigmas(model)
    delta_d = rng.normal(0.0, sigma_d)
    delta_m = rng.normal(0.0, sigma_m)
    return AtomNoise(
        spatial=spatial,
        intensity=tuple(intensity),
        delta_doppler=delta_d,
        delta_magnetic=delta_m,
        position_um=(x, y, z),
    )


def run_generator(seed: int, run_index: int) -> np.random.Generator:
    """Independent generator for one Monte-Carlo run."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(run_index,)))


def sample_run_pairs(
    model: AtomModel, seed: int, n_runs: int
) -> list[tuple[AtomNoise, AtomNoise]]:
    """Noise realizations for ``n_runs`` runs, two independent atoms each."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    pairs = []
    for k in range(n_runs):
        rng = run_generator(seed, k)
        pairs.append((sample_noise(model, rng), sample_noise(model, rng)))
    return pairs


@dataclass(frozen=True)
class McSummary:
    """Fidelity statistics over a Monte-Carlo ensemble."""

    n_runs: int
    fidelities: NDArray[np.float64]
    mean_f: float
    std_error: float

    @staticmethod
    def from_fidelities(fidelities) -> "McSummary":
        f = np.asarray(fidelities, dtype=float)
        if f.ndim != 1 or f.size == 0:
            raise ValueError("expected a non-empty 1-d fidelity array")
        n = f.size
        spread = float(np.std(f, ddof=1)) if n > 1 else 0.0
        return McSummary(
            n_runs=n,
            fidelities=f,
            mean_f=float(np.mean(f)),
            std_error=spread / math.sqrt(n),
        )
