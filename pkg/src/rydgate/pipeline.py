"""End-to-end gate simulation flows.

Builds time-dependent Hamiltonian systems from an atom model and a pulse
schedule, runs them through the integrators, and reduces the outcome to
gate-level quantities.

Noiseless unitary runs exploit the exact symmetry sectors of the
blockaded two-atom Hamiltonian: with identical drives the dynamics of
|01> and |11> close on 2-to-6-dimensional invariant subspaces, so
intrinsic fidelities and gate phases come from propagating tiny systems
instead of the full 625-entry density matrix.  Open-system runs
(spontaneous emission, technical noise) propagate the full 25-dim
Lindblad equation, batched over Monte-Carlo realizations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from . import bell
from .atom import (
    DIM_1,
    DIM_2,
    LEVEL_1,
    LEVEL_P,
    LEVEL_R,
    AtomModel,
    AtomNoise,
    ExcitationKind,
    INDEX_RR,
    NO_NOISE,
    collapse_operators,
    pair_index,
)
from .dynamics import (
    Dissipator,
    DriveTerm,
    HamiltonianModel,
    IntegratorConfig,
    SegmentGrid,
    accumulated_phase,
    adiabatic_min_overlap,
    propagate_lindblad,
    propagate_magnus,
    segment_nodes,
)
from .noise import McSummary, sample_run_pairs
from .pulses import PulseSchedule, ZchgParams

_EYE = np.eye(DIM_1, dtype=complex)

#: single-atom structure matrices
_DIPOLE_COUPLING = np.zeros((DIM_1, DIM_1), dtype=complex)
_DIPOLE_COUPLING[LEVEL_1, LEVEL_R] = 1.0  # coefficient (1/2) Omega rides on the grid
_DIPOLE_DETUNING = np.zeros((DIM_1, DIM_1), dtype=complex)
_DIPOLE_DETUNING[LEVEL_R, LEVEL_R] = 0.5
_DIPOLE_DETUNING[LEVEL_1, LEVEL_1] = -0.5
_BLUE_COUPLING = np.zeros((DIM_1, DIM_1), dtype=complex)
_BLUE_COUPLING[LEVEL_P, LEVEL_1] = 1.0
_RED_COUPLING = np.zeros((DIM_1, DIM_1), dtype=complex)
_RED_COUPLING[LEVEL_R, LEVEL_P] = 1.0
_P_PROJ = np.zeros((DIM_1, DIM_1), dtype=complex)
_P_PROJ[LEVEL_P, LEVEL_P] = 1.0
_R_SHIFT = np.zeros((DIM_1, DIM_1), dtype=complex)
_R_SHIFT[LEVEL_R, LEVEL_R] = 1.0


def _on_atoms(m5: NDArray, f1: float = 1.0, f2: float = 1.0) -> NDArray:
    return f1 * np.kron(m5, _EYE) + f2 * np.kron(_EYE, m5)


def swap_operator() -> NDArray[np.complex128]:
    """Exchange of the two atoms in the kron-ordered product basis."""
    s = np.zeros((DIM_2, DIM_2), dtype=complex)
    for a in range(DIM_1):
        for b in range(DIM_1):
            s[pair_index(b, a), pair_index(a, b)] = 1.0
    return s


# ---------------------------------------------------------------------------
# symmetry sectors

def _sym_pair(a: int, b: int) -> NDArray[np.complex128]:
    v = np.zeros(DIM_2, dtype=complex)
    if a == b:
        v[pair_index(a, a)] = 1.0
    else:
        v[pair_index(a, b)] = v[pair_index(b, a)] = 1.0 / math.sqrt(2.0)
    return v


def _single(a: int, b: int) -> NDArray[np.complex128]:
    v = np.zeros(DIM_2, dtype=complex)
    v[pair_index(a, b)] = 1.0
    return v


@dataclass(frozen=True)
class Sector:
    """Invariant subspace of the noiseless symmetric drive.

    ``isometry`` holds the basis columns (25 x d); ``phase_weights`` nu_j
    are such that shifting the drive phase by phi conjugates the sector
    propagator with diag(exp(i phi nu)).
    """

    name: str
    isometry: NDArray[np.complex128]
    phase_weights: NDArray[np.float64]

    @property
    def dim(self) -> int:
        return self.isometry.shape[1]

    def project(self, m25: NDArray) -> NDArray[np.complex128]:
        return self.isometry.conj().T @ m25 @ self.isometry


def _phase_weight(kind: ExcitationKind, levels: tuple[int, ...]) -> float:
    if kind is ExcitationKind.DIPOLE:
        return -float(sum(1 for lv in levels if lv == LEVEL_R))
    return float(sum(1 for lv in levels if lv in (LEVEL_P, LEVEL_R)))


def gate_sectors(kind: ExcitationKind) -> tuple[Sector, Sector]:
    """(01-sector, 11-sector) for the excitation scheme.

    The 01-sector tracks a single driven atom (the other parked in |0>);
    the 11-sector tracks the symmetric combinations of two driven atoms.
    The first basis column is always the computational state itself.
    """
    if kind is ExcitationKind.DIPOLE:
        cols01 = [(0, LEVEL_1), (0, LEVEL_R)]
        basis01 = [_single(a, b) for a, b in cols01]
        cols11 = [(LEVEL_1, LEVEL_1), (LEVEL_1, LEVEL_R), (LEVEL_R, LEVEL_R)]
        basis11 = [_sym_pair(a, b) for a, b in cols11]
    else:
        cols01 = [(0, LEVEL_1), (0, LEVEL_P), (0, LEVEL_R)]
        basis01 = [_single(a, b) for a, b in cols01]
        cols11 = [
            (LEVEL_1, LEVEL_1),
            (LEVEL_1, LEVEL_P),
            (LEVEL_1, LEVEL_R),
            (LEVEL_P, LEVEL_P),
            (LEVEL_P, LEVEL_R),
            (LEVEL_R, LEVEL_R),
        ]
        basis11 = [_sym_pair(a, b) for a, b in cols11]
    sec01 = Sector(
        name="01",
        isometry=np.column_stack(basis01),
        phase_weights=np.array([_phase_weight(kind, c) for c in cols01]),
    )
    sec11 = Sector(
        name="11",
        isometry=np.column_stack(basis11),
        phase_weights=np.array([_phase_weight(kind, c) for c in cols11]),
    )
    return sec01, sec11


# ---------------------------------------------------------------------------
# system assembly

def _laser_factors(model: AtomModel, pairs: list[tuple[AtomNoise, AtomNoise]] | None):
    """Per-run Rabi factors (n_lasers, B, 2) and detuning shifts (B, 2)."""
    if pairs is None:
        pairs = [(NO_NOISE, NO_NOISE)]
    nb = len(pairs)
    nl = len(model.lasers)
    factors = np.ones((nl, nb, 2))
    shifts = np.zeros((nb, 2))
    for k, (n1, n2) in enumerate(pairs):
        for li in range(nl):
            factors[li, k, 0] = n1.rabi_factor(li)
            factors[li, k, 1] = n2.rabi_factor(li)
        shifts[k, 0] = n1.detuning_shift
        shifts[k, 1] = n2.detuning_shift
    return factors, shifts


def build_full_system(
    model: AtomModel,
    schedule: PulseSchedule,
    step: float,
    pairs: list[tuple[AtomNoise, AtomNoise]] | None = None,
) -> tuple[HamiltonianModel, list[SegmentGrid]]:
    """25-dim Hamiltonian system for a pulse schedule, optionally noise-batched.

    With ``pairs`` given, structure matrices gain a leading batch axis:
    per-run intensity and beam-pointing factors scale the coupling
    matrices, per-run Doppler/magnetic shifts enter the static part.  The
    shared coefficient grids carry the synthesized pulses and their
    segment phases.
    """
    factors, shifts = _laser_factors(model, pairs)
    batched = pairs is not None
    nb = factors.shape[1]

    blockade = np.zeros((DIM_2, DIM_2), dtype=complex)
    blockade[INDEX_RR, INDEX_RR] = model.blockade

    if model.kind is ExcitationKind.DIPOLE:
        shift_m5 = _DIPOLE_DETUNING
        couplings = [_DIPOLE_COUPLING]
        static_extra = np.zeros((DIM_2, DIM_2), dtype=complex)
    else:
        shift_m5 = _R_SHIFT
        couplings = [_BLUE_COUPLING, _RED_COUPLING]
        if not isinstance(schedule.base, ZchgParams):
            raise TypeError("quadrupole schedule requires a ZchgParams base")
        static_extra = schedule.base.delta_b * _on_atoms(_P_PROJ)

    if batched:
        static = np.broadcast_to(blockade + static_extra, (nb, DIM_2, DIM_2)).copy()
        m1 = np.kron(shift_m5, _EYE)
        m2 = np.kron(_EYE, shift_m5)
        static += shifts[:, 0, None, None] * m1 + shifts[:, 1, None, None] * m2
    else:
        static = blockade + static_extra

    terms = []
    for li, m5 in enumerate(couplings):
        if batched:
            mat = (
                factors[li, :, 0, None, None] * np.kron(m5, _EYE)
                + factors[li, :, 1, None, None] * np.kron(_EYE, m5)
            )
        else:
            mat = _on_atoms(m5)
        terms.append(DriveTerm.ladder(mat))
    if model.kind is ExcitationKind.DIPOLE:
        terms.append(DriveTerm.herm(_on_atoms(_DIPOLE_DETUNING)))

    sys_model = HamiltonianModel(static=static, terms=tuple(terms))
    grids = build_grids(schedule, step)
    return sys_model, grids


def build_grids(schedule: PulseSchedule, step: float) -> list[SegmentGrid]:
    """Coefficient grids per segment, ordered to match the system terms."""
    grids = []
    for k, seg in enumerate(schedule.segments):
        n, h, tloc = segment_nodes(seg.duration, step)
        d = schedule.drive_segment(k, tloc)
        if schedule.kind is ExcitationKind.DIPOLE:
            coeffs = (0.5 * d["omega"], d["delta"].astype(complex))
        else:
            coeffs = (0.5 * d["omega_blue"], 0.5 * d["omega_red"])
        grids.append(SegmentGrid(n_steps=n, h=h, coeffs=coeffs))
    return grids


def build_sector_system(
    model: AtomModel,
    schedule: PulseSchedule,
    sector: Sector,
    step: float,
) -> tuple[HamiltonianModel, list[SegmentGrid]]:
    """Noiseless Hamiltonian system restricted to one symmetry sector."""
    full, grids = build_full_system(model, schedule, step, pairs=None)
    static = sector.project(full.static)
    terms = []
    for term in full.terms:
        mat = sector.project(term.matrix)
        terms.append(DriveTerm.ladder(mat) if term.adjoint is not None else DriveTerm.herm(mat))
    return HamiltonianModel(static=static, terms=tuple(terms)), grids


def build_dissipator(model: AtomModel) -> Dissipator:
    return Dissipator.from_operators(collapse_operators(model), DIM_2)


# ---------------------------------------------------------------------------
# gate flows

@dataclass
class UnitaryGateRun:
    """Noiseless unitary gate outcome from the symmetry sectors."""

    c01: complex
    c11: complex
    phi_10: float
    phi_11: float
    final_state: NDArray[np.complex128]
    phase_flagged: bool
    times_01: NDArray[np.float64]
    amps_01: NDArray[np.complex128]
    times_11: NDArray[np.float64]
    amps_11: NDArray[np.complex128]


def _sector_amplitude_run(
    model: AtomModel,
    schedule: PulseSchedule,
    sector: Sector,
    config: IntegratorConfig,
) -> tuple[NDArray, NDArray, NDArray]:
    """(times, amplitude series of the computational state, final column)."""
    sys_model, grids = build_sector_system(model, schedule, sector, config.step)
    stride = config.sample_stride or 10
    cfg = IntegratorConfig(
        step=config.step,
        sample_stride=stride,
        norm_tol=config.norm_tol,
        positivity_floor=config.positivity_floor,
    )
    e0 = np.zeros(sector.dim, dtype=complex)
    e0[0] = 1.0
    res = propagate_magnus(sys_model, grids, e0, cfg)
    assert res.states is not None
    return res.times, res.states[:, 0], res.final


def run_unitary_gate(
    model: AtomModel,
    schedule: PulseSchedule,
    config: IntegratorConfig = IntegratorConfig(),
) -> UnitaryGateRun:
    """Propagate the symmetry sectors and assemble gate amplitudes and phases.

    ``c01`` and ``c11`` are the return amplitudes <01|U|01> and <11|U|11>;
    the gate phases are their branch-tracked arguments at the gate end.
    The assembled 25-dim final state corresponds to the Bell-circuit
    input (|00> is stationary, |10> mirrors |01| by exchange symmetry).
    """
    sec01, sec11 = gate_sectors(model.kind)
    t01, a01, u01 = _sector_amplitude_run(model, schedule, sec01, config)
    t11, a11, u11 = _sector_amplitude_run(model, schedule, sec11, config)

    phases01, flag01 = accumulated_phase(a01)
    phases11, flag11 = accumulated_phase(a11)

    swap = swap_operator()
    final = np.zeros(DIM_2, dtype=complex)
    final[pair_index(0, 0)] = 0.5
    evolved01 = sec01.isometry @ u01
    final -= 0.5 * evolved01
    final -= 0.5 * (swap @ evolved01)
    final += 0.5 * (sec11.isometry @ u11)

    return UnitaryGateRun(
        c01=complex(a01[-1]),
        c11=complex(a11[-1]),
        phi_10=float(phases01[-1]),
        phi_11=float(phases11[-1]),
        final_state=final,
        phase_flagged=bool(flag01 or flag11),
        times_01=t01,
        amps_01=a01,
        times_11=t11,
        amps_11=a11,
    )


def run_lindblad_gate(
    model: AtomModel,
    schedule: PulseSchedule,
    config: IntegratorConfig = IntegratorConfig(),
    pairs: list[tuple[AtomNoise, AtomNoise]] | None = None,
) -> NDArray[np.complex128]:
    """Final density matrix (batched if noise pairs are given) of a gate run."""
    sys_model, grids = build_full_system(model, schedule, config.step, pairs=pairs)
    rho0 = np.outer(bell.initial_state(), bell.initial_state().conj())
    res = propagate_lindblad(sys_model, grids, rho0, build_dissipator(model), config)
    return res.final


def gate_flavor(model: AtomModel, schedule: PulseSchedule) -> tuple[bell.BellTarget, bool]:
    """(Bell target, whether the frame correction R_phi is applied).

    A double adiabatic dipole sequence realizes CZ_pi (single-qubit phase
    pi by construction), scored against beta_00 with no frame correction;
    every other flavour is a CZ_phi scored against beta_01 after R_phi.
    """
    if model.kind is ExcitationKind.DIPOLE and schedule.synthesis == "adiabatic":
        return bell.BETA_00, False
    return bell.BETA_01, True


def evaluate_gate(
    model: AtomModel,
    schedule: PulseSchedule,
    config: IntegratorConfig = IntegratorConfig(),
    *,
    n_runs: int = 0,
    seed: int = 0,
    with_decay: bool = True,
    workers: int = 1,
    pairs: list[tuple[AtomNoise, AtomNoise]] | None = None,
) -> tuple[bell.GateReport, UnitaryGateRun, McSummary | None]:
    """Full gate evaluation: intrinsic, decay-only, and Monte-Carlo fidelities.

    The frame phase is calibrated once from the noiseless unitary run and
    reused for every open-system evaluation.  ``n_runs`` = 0 skips the
    Monte-Carlo ensemble; ``with_decay`` = False also skips the
    decay-only Lindblad run (intrinsic quantities only).  ``pairs``
    overrides the sampled noise realizations (``n_runs`` and ``seed``
    are ignored then); ``workers`` > 1 spreads the ensemble over
    processes.
    """
    run = run_unitary_gate(model, schedule, config)
    target, use_frame = gate_flavor(model, schedule)
    phi = bell.extract_phi(run.phi_10) if use_frame else 0.0
    f0 = bell.intrinsic_fidelity(run.final_state, phi, target)

    f_decay = None
    if with_decay:
        rho = run_lindblad_gate(model, schedule, config, pairs=None)
        f_decay = float(np.atleast_1d(bell.fidelity(bell.finalize_state(rho, phi), target))[0])

    if pairs is None and n_runs > 0:
        pairs = sample_run_pairs(model, seed, n_runs)
    summary = None
    if pairs:
        summary = _mc_ensemble(model, schedule, config, pairs, phi, target, workers)

    from .optimize import pulse_area  # local import to avoid a cycle

    report = bell.GateReport(
        kind=model.kind.value,
        synthesis=schedule.synthesis,
        t_gate=schedule.total_duration,
        f_intrinsic=f0,
        f_decay=f_decay,
        f_mean=summary.mean_f if summary else None,
        f_std_error=summary.std_error if summary else None,
        phi_10=run.phi_10,
        phi_11=run.phi_11,
        pulse_area_over_2pi=pulse_area(schedule),
        target=f"beta_{target.i}{target.j}",
    )
    return report, run, summary


def run_monte_carlo(
    model: AtomModel,
    schedule: PulseSchedule,
    n_runs: int,
    seed: int,
    config: IntegratorConfig = IntegratorConfig(),
    workers: int = 1,
) -> McSummary:
    """Monte-Carlo fidelity ensemble for one gate configuration.

    Runs are vectorized in chunks; ``workers`` > 1 splits the chunks over
    processes (each chunk reproducible from its run indices).
    """
    run = run_unitary_gate(model, schedule, config)
    target, use_frame = gate_flavor(model, schedule)
    phi = bell.extract_phi(run.phi_10) if use_frame else 0.0
    pairs = sample_run_pairs(model, seed, n_runs)
    return _mc_ensemble(model, schedule, config, pairs, phi, target, workers)


def _mc_ensemble(
    model: AtomModel,
    schedule: PulseSchedule,
    config: IntegratorConfig,
    pairs: list[tuple[AtomNoise, AtomNoise]],
    phi: float,
    target: bell.BellTarget,
    workers: int,
) -> McSummary:
    if workers <= 1:
        rho = run_lindblad_gate(model, schedule, config, pairs=pairs)
        fids = np.atleast_1d(bell.fidelity(bell.finalize_state(rho, phi), target))
        return McSummary.from_fidelities(fids)

    from concurrent.futures import ProcessPoolExecutor

    chunks = np.array_split(np.arange(len(pairs)), workers)
    args = [
        (model, schedule, config, [pairs[i] for i in chunk], phi, target)
        for chunk in chunks
        if len(chunk)
    ]
    fids = np.empty(len(pairs))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        pos = 0
        for part in pool.map(_mc_chunk, args):
            fids[pos : pos + len(part)] = part
            pos += len(part)
    return McSummary.from_fidelities(fids)


def _mc_chunk(packed) -> NDArray[np.float64]:
    model, schedule, config, pairs, phi, target = packed
    rho = run_lindblad_gate(model, schedule, config, pairs=pairs)
    return np.atleast_1d(bell.fidelity(bell.finalize_state(rho, phi), target))


# ---------------------------------------------------------------------------
# monitors

def population_series(
    model: AtomModel,
    schedule: PulseSchedule,
    sector: Sector,
    config: IntegratorConfig = IntegratorConfig(),
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """(times, populations (S, d)) of a sector run started in its first basis state."""
    sys_model, grids = build_sector_system(model, schedule, sector, config.step)
    stride = config.sample_stride or 10
    cfg = IntegratorConfig(step=config.step, sample_stride=stride, norm_tol=config.norm_tol)
    e0 = np.zeros(sector.dim, dtype=complex)
    e0[0] = 1.0
    res = propagate_magnus(sys_model, grids, e0, cfg)
    assert res.states is not None
    return res.times, np.abs(res.states) ** 2


def two_level_sectors(model: AtomModel, schedule: PulseSchedule) -> list[Sector]:
    """The 2-dim sectors used by the adiabaticity criterion (dipole scheme).

    For |01> the pair {|01>, |0r>} is exact; for |11> the pair
    {|11>, |+>} results from eliminating the blockade-shifted |rr>.
    """
    if model.kind is not ExcitationKind.QUADRUPOLE:
        sec01, _ = gate_sectors(model.kind)
        plus = _sym_pair(LEVEL_1, LEVEL_R)
        sec_eff = Sector(
            name="11eff",
            isometry=np.column_stack([_sym_pair(LEVEL_1, LEVEL_1), plus]),
            phase_weights=np.array([0.0, -1.0]),
        )
        return [sec01, sec_eff]
    raise NotImplementedError("adiabaticity monitoring is defined on the dipole sectors")


def sequence_adiabaticity(
    model: AtomModel,
    schedule: PulseSchedule,
    config: IntegratorConfig = IntegratorConfig(),
) -> float:
    """Minimum eigenstate-following overlap over the 2-dim sectors.

    Propagates each 2-dim sector segment by segment, sampling the
    instantaneous Hamiltonian alongside the state; the followed branch
    re-locks at segment boundaries where the drive phase jumps.
    """
    stride = config.sample_stride or 10
    cfg = IntegratorConfig(step=config.step, sample_stride=stride, norm_tol=config.norm_tol)
    worst = 1.0
    for sector in two_level_sectors(model, schedule):
        sys_model, grids = build_sector_system(model, schedule, sector, config.step)
        psi = np.zeros(sector.dim, dtype=complex)
        psi[0] = 1.0
        states: list[NDArray] = []
        hams: list[NDArray] = []
        reselect: list[int] = []
        for grid in grids:
            reselect.append(len(states))
            res = propagate_magnus(sys_model, [grid], psi, cfg)
            assert res.states is not None
            nodes = np.rint(2.0 * res.times / grid.h).astype(int)
            for state, node in zip(res.states, nodes):
                states.append(state)
                hams.append(sys_model.assemble(tuple(c[node] for c in grid.coeffs)))
            psi = res.final
        overlap = adiabatic_min_overlap(np.stack(states), np.stack(hams), reselect)
        worst = min(worst, overlap)
    return worst
