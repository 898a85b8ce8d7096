"""Rydberg-blockade CZ gates for neutral atoms: synthesis, simulation, analysis.

The package models a pair of driven atoms with a strong Rydberg
blockade, synthesizes fast transitionless pulse sequences from adiabatic
pulse families, propagates the two-atom system with and without
dissipation and technical noise, and reports Bell-state preparation
fidelities together with resource-scaling analyses.
"""

from .atom import (
    AtomModel,
    AtomNoise,
    DecayChannel,
    DipoleDrive,
    ExcitationKind,
    LaserBeam,
    QuadrupoleDrive,
    default_model,
)
from .bell import BETA_00, BETA_01, BellTarget, GateReport
from .config import (
    ConfigError,
    ExperimentConfig,
    NoiseToggles,
    load_config,
    mask_noise,
    mask_pairs,
    parse_config,
)
from .dynamics import IntegrationError, IntegratorConfig
from .noise import McSummary, sample_noise, sample_run_pairs
from .optimize import (
    DeConfig,
    DeResult,
    FitError,
    FitResult,
    PhaseSearchResult,
    SearchDomain,
    UnreachableTargetError,
    differential_evolution,
    feasible,
    find_phase_shifts,
    fit_logistic,
    fit_power_law,
    min_omega_search,
    min_time_search,
    pulse_area,
    resource_scan,
    sequence_fidelity,
    speedup_scan,
)
from .pipeline import (
    evaluate_gate,
    run_lindblad_gate,
    run_monte_carlo,
    run_unitary_gate,
)
from .pulses import (
    LcgParams,
    PulseSchedule,
    ZchgParams,
    build_sequence,
    double_sequence,
    min_pulse_duration,
    tqd_dipole,
    tqd_quadrupole,
    waveform_table,
)

__version__ = "0.1.0"

__all__ = [
    "AtomModel",
    "AtomNoise",
    "BETA_00",
    "BETA_01",
    "BellTarget",
    "ConfigError",
    "DeConfig",
    "DeResult",
    "DecayChannel",
    "DipoleDrive",
    "ExcitationKind",
    "ExperimentConfig",
    "FitError",
    "FitResult",
    "GateReport",
    "IntegrationError",
    "IntegratorConfig",
    "LaserBeam",
    "LcgParams",
    "McSummary",
    "NoiseToggles",
    "PhaseSearchResult",
    "PulseSchedule",
    "QuadrupoleDrive",
    "SearchDomain",
    "UnreachableTargetError",
    "ZchgParams",
    "build_sequence",
    "default_model",
    "differential_evolution",
    "double_sequence",
    "evaluate_gate",
    "feasible",
    "find_phase_shifts",
    "fit_logistic",
    "fit_power_law",
    "load_config",
    "mask_noise",
    "mask_pairs",
    "min_omega_search",
    "min_pulse_duration",
    "min_time_search",
    "parse_config",
    "pulse_area",
    "resource_scan",
    "run_lindblad_gate",
    "run_monte_carlo",
    "run_unitary_gate",
    "sample_noise",
    "sample_run_pairs",
    "sequence_fidelity",
    "speedup_scan",
    "tqd_dipole",
    "tqd_quadrupole",
    "waveform_table",
]
