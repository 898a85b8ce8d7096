"""Five-level cesium atom model and two-atom blockade Hamiltonians.

Level ordering is fixed: index 0 = |0>, 1 = |1>, 2 = |g>, 3 = |p>,
4 = |r>.  |0>, |1> are the clock qubit states, |g> collects all other
ground sublevels populated by spontaneous decay, |p> is the 7P_1/2
intermediate used by the quadrupole (two-color) excitation, |r> the
Rydberg level.  The direct dipole (single-color) scheme never drives
|p> but keeps the level so that both excitation schemes share one
25-dimensional two-atom space.

Units: time in us, angular frequencies in rad/us.  All "per 2pi MHz"
figures from configuration files are converted before they get here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import ComplexMatrix, kron

TWO_PI = 2.0 * math.pi

DIM_1 = 5
DIM_2 = DIM_1 * DIM_1

LEVEL_0, LEVEL_1, LEVEL_G, LEVEL_P, LEVEL_R = range(DIM_1)
LEVEL_NAMES = ("0", "1", "g", "p", "r")

#: index of |rr> in the kron-ordered two-atom basis
INDEX_RR = LEVEL_R * DIM_1 + LEVEL_R


def pair_index(a: int, b: int) -> int:
    """Two-atom basis index of |a, b> (atom 1 most significant)."""
    return a * DIM_1 + b


class ExcitationKind(str, enum.Enum):
    """Rydberg excitation scheme: one-photon dipole or two-photon quadrupole."""

    DIPOLE = "dipole"
    QUADRUPOLE = "quadrupole"


@dataclass(frozen=True)
class DecayChannel:
    """One spontaneous-emission channel |source> -> |target>.

    ``gamma`` is the total decay rate of the source level, ``branching``
    the fraction going to ``target``; the channel rate is their product.
    """

    source: int
    target: int
    gamma: float
    branching: float

    @property
    def rate(self) -> float:
        return self.gamma * self.branching


@dataclass(frozen=True)
class LaserBeam:
    """Gaussian beam geometry and intensity-noise level for one laser."""

    name: str
    waist_um: float
    rayleigh_um: float
    sigma_intensity: float


@dataclass(frozen=True)
class AtomModel:
    """Static physical parameters for one excitation scheme."""

    kind: ExcitationKind
    blockade: float                # rad/us
    decay: tuple[DecayChannel, ...]
    lasers: tuple[LaserBeam, ...]
    k_eff: float                   # 1/um, effective excitation wavevector
    t2_doppler: float              # us
    t2_magnetic: float             # us
    sigma_position: tuple[float, float, float] = (0.24, 0.24, 0.92)  # um

    def __post_init__(self) -> None:
        totals: dict[int, float] = {}
        for ch in self.decay:
            totals[ch.source] = totals.get(ch.source, 0.0) + ch.branching
        for source, total in totals.items():
            if abs(total - 1.0) > 1e-12:
                raise ValueError(
                    f"branching ratios from level {LEVEL_NAMES[source]} sum to {total}, not 1"
                )

    def laser(self, name: str) -> LaserBeam:
        for beam in self.lasers:
            if beam.name == name:
                return beam
        raise KeyError(name)


def default_model(kind: ExcitationKind) -> AtomModel:
    """Reference cesium parameters for the requested excitation scheme.

    Decay rates are the inverse level lifetimes, gamma = 1/tau in 1/us
    (no 2pi factor; lifetimes enter as plain exponential rates).
    """
    if kind is ExcitationKind.DIPOLE:
        gamma_r = 1.0 / 593.0
        return AtomModel(
            kind=kind,
            blockade=TWO_PI * 3000.0,
            decay=(
                DecayChannel(LEVEL_R, LEVEL_0, gamma_r, 1.0 / 16.0),
                DecayChannel(LEVEL_R, LEVEL_1, gamma_r, 1.0 / 16.0),
                DecayChannel(LEVEL_R, LEVEL_G, gamma_r, 7.0 / 8.0),
            ),
            lasers=(LaserBeam("uv", 2.5, 61.5, 0.05),),
            k_eff=19.7,
            t2_doppler=4.0,
            t2_magnetic=50.0,
        )
    if kind is ExcitationKind.QUADRUPOLE:
        gamma_r = 1.0 / 367.0
        gamma_p = 1.0 / 0.155
        return AtomModel(
            kind=kind,
            # d-state pair potential: attractive, so the shift is negative.
            blockade=-TWO_PI * 2000.0,
            decay=(
                DecayChannel(LEVEL_R, LEVEL_0, gamma_r, 1.0 / 32.0),
                DecayChannel(LEVEL_R, LEVEL_1, gamma_r, 1.0 / 32.0),
                DecayChannel(LEVEL_R, LEVEL_G, gamma_r, 7.0 / 16.0),
                DecayChannel(LEVEL_R, LEVEL_P, gamma_r, 1.0 / 2.0),
                DecayChannel(LEVEL_P, LEVEL_0, gamma_p, 1.0 / 16.0),
                DecayChannel(LEVEL_P, LEVEL_1, gamma_p, 1.0 / 16.0),
                DecayChannel(LEVEL_P, LEVEL_G, gamma_p, 7.0 / 8.0),
            ),
            lasers=(
                LaserBeam("blue", 3.0, 61.6, 0.01),
                LaserBeam("red", 3.0, 27.2, 0.01),
            ),
            k_eff=7.63,
            t2_doppler=10.5,
            t2_magnetic=34.0,
        )
    raise ValueError(f"unknown excitation kind {kind!r}")


@dataclass(frozen=True)
class AtomNoise:
    """Multiplicative and additive noise factors for one atom, one run.

    ``spatial`` and ``intensity`` are aligned with ``AtomModel.lasers``.
    The identity value (no noise) is all-ones factors and zero shifts.
    """

    spatial: tuple[float, ...] = (1.0, 1.0)
    intensity: tuple[float, ...] = (1.0, 1.0)
    delta_doppler: float = 0.0
    delta_magnetic: float = 0.0
    position_um: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @property
    def detuning_shift(self) -> float:
        return self.delta_doppler + self.delta_magnetic

    def rabi_factor(self, laser_index: int) -> float:
        return self.spatial[laser_index] * self.intensity[laser_index]


NO_NOISE = AtomNoise()


@dataclass(frozen=True)
class DipoleDrive:
    """Instantaneous dipole drive: complex Rabi coupling and detuning."""

    omega: complex      # includes any pulse phase factor
    delta: float


@dataclass(frozen=True)
class QuadrupoleDrive:
    """Instantaneous two-color drive; ``delta_br`` stays 0 in this scheme."""

    omega_blue: complex
    omega_red: complex
    delta_blue: float
    delta_br: float = 0.0


def single_atom_hamiltonian(
    kind: ExcitationKind,
    drive: DipoleDrive | QuadrupoleDrive,
    noise: AtomNoise = NO_NOISE,
) -> ComplexMatrix:
    """5x5 single-atom Hamiltonian for the given drive sample.

    Dipole: (1/2) p f Omega |1><r| + h.c. + (Delta + shift)/2 (|r><r| - |1><1|).
    Quadrupole: (1/2) p_B f_B Omega_B |p><1| + (1/2) p_R f_R Omega_R |r><p|
    + h.c. + Delta_B |p><p| + (Delta_BR + shift) |r><r|.
    """
    h = np.zeros((DIM_1, DIM_1), dtype=np.complex128)
    if kind is ExcitationKind.DIPOLE:
        if not isinstance(drive, DipoleDrive):
            raise TypeError("dipole scheme requires a DipoleDrive")
        z = 0.5 * noise.rabi_factor(0) * drive.omega
        h[LEVEL_1, LEVEL_R] = z
        h[LEVEL_R, LEVEL_1] = np.conj(z)
        half = 0.5 * (drive.delta + noise.detuning_shift)
        h[LEVEL_R, LEVEL_R] = half
        h[LEVEL_1, LEVEL_1] = -half
        return h
    if kind is ExcitationKind.QUADRUPOLE:
        if not isinstance(drive, QuadrupoleDrive):
            raise TypeError("quadrupole scheme requires a QuadrupoleDrive")
        zb = 0.5 * noise.rabi_factor(0) * drive.omega_blue
        zr = 0.5 * noise.rabi_factor(1) * drive.omega_red
        h[LEVEL_P, LEVEL_1] = zb
        h[LEVEL_1, LEVEL_P] = np.conj(zb)
        h[LEVEL_R, LEVEL_P] = zr
        h[LEVEL_P, LEVEL_R] = np.conj(zr)
        h[LEVEL_P, LEVEL_P] = drive.delta_blue
        h[LEVEL_R, LEVEL_R] = drive.delta_br + noise.detuning_shift
        return h
    raise ValueError(f"unknown excitation kind {kind!r}")


_EYE = np.eye(DIM_1, dtype=np.complex128)


def two_atom_hamiltonian(
    model: AtomModel, h_atom1: ComplexMatrix, h_atom2: ComplexMatrix
) -> ComplexMatrix:
    """25x25 Hamiltonian H1 x 1 + 1 x H2 + B |rr><rr|."""
    h = kron(h_atom1, _EYE) + kron(_EYE, h_atom2)
    h[INDEX_RR, INDEX_RR] += model.blockade
    return h


def collapse_operators(model: AtomModel) -> list[ComplexMatrix]:
    """GKSL collapse operators sqrt(b gamma) |k><j| lifted to both atoms.

    One pair (atom 1, atom 2) per decay channel, in model channel order:
    6 operators for the dipole scheme, 14 for the quadrupole scheme.
    """
    ops: list[ComplexMatrix] = []
    for ch in model.decay:
        c = np.zeros((DIM_1, DIM_1), dtype=np.complex128)
        c[ch.target, ch.source] = math.sqrt(ch.rate)
        ops.append(kron(c, _EYE))
        ops.append(kron(_EYE, c))
    return ops
