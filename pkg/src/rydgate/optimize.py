"""Pulse-parameter search, phase-shift search, resource scans and fits.

The expensive part of every search here is the intrinsic gate fidelity.
All sequences are built from copies of one base pulse, so a single
segment propagator per symmetry sector is enough: segment phase shifts
act by conjugation with a diagonal phase operator, and the closed-form
Bell fidelity follows from the two return amplitudes <01|U|01> and
<11|U|11>.  A 200 x 200 phase grid therefore costs one or two small
propagations plus broadcast matrix products.

Units follow the rest of the package (rad/us, us) except where a name
carries an explicit ``_mhz`` suffix or a domain mirrors published
parameter ranges (plain MHz for frequencies over 2 pi).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import simpson
from scipy.optimize import OptimizeWarning, curve_fit, minimize

from .atom import AtomModel, ExcitationKind, default_model
from .dynamics import IntegratorConfig, propagate_magnus
from .pipeline import Sector, build_sector_system, gate_flavor, gate_sectors
from .pulses import (
    LcgParams,
    PulseSchedule,
    ZchgParams,
    build_sequence,
    double_sequence,
    tqd_dipole,
)

TWO_PI = 2.0 * math.pi
_INV_SQRT2 = 1.0 / math.sqrt(2.0)

#: strict intrinsic-fidelity thresholds gating a parameter tuple
FEASIBILITY_THRESHOLD = {
    ExcitationKind.DIPOLE: 0.9989,
    ExcitationKind.QUADRUPOLE: 0.989,
}

#: convention recorded next to exported pulse areas
AREA_CONVENTION = (
    "time integral of sqrt(omega_eff^2 + delta_eff^2) / 2pi, summed over "
    "segments, with the single-atom effective two-level pair"
)


class UnreachableTargetError(RuntimeError):
    """A bounded search found no point meeting the fidelity target."""


class FitError(RuntimeError):
    """Nonlinear fit failed to converge; carries the last residuals."""

    def __init__(self, message: str, residuals: NDArray | None = None):
        super().__init__(message)
        self.residuals = residuals


def feasible(f0: float, kind: ExcitationKind) -> bool:
    """Strict feasibility gate on the intrinsic fidelity."""
    if not 0.0 <= f0 <= 1.0 + 1e-12:
        raise ValueError(f"fidelity {f0} outside [0, 1]")
    return f0 > FEASIBILITY_THRESHOLD[kind]


# ---------------------------------------------------------------------------
# pulse area

def generalized_area(omega, delta, t) -> float:
    """Integral of the generalized Rabi frequency sqrt(omega^2 + delta^2)."""
    omega = np.asarray(omega, dtype=float)
    delta = np.asarray(delta, dtype=float)
    return float(simpson(np.hypot(omega, delta), x=np.asarray(t, dtype=float)))


def _segment_pair(schedule: PulseSchedule, k: int, t_local):
    d = schedule.drive_segment(k, t_local)
    if schedule.kind is ExcitationKind.DIPOLE:
        return np.abs(d["omega"]), np.real(d["delta"])
    omega_b = np.abs(d["omega_blue"])
    omega_r = np.abs(d["omega_red"])
    delta_b = np.real(d["delta_blue"])
    return (
        omega_b * omega_r / (2.0 * delta_b),
        (omega_b**2 - omega_r**2) / (4.0 * delta_b),
    )


def pulse_area(schedule: PulseSchedule, points_per_segment: int = 2001) -> float:
    """Sequence pulse area in units of 2 pi.

    Each segment contributes the generalized Rabi area of its effective
    single-atom two-level pair; see ``AREA_CONVENTION``.
    """
    if points_per_segment % 2 == 0:
        points_per_segment += 1
    total = 0.0
    for k, seg in enumerate(schedule.segments):
        t_local = np.linspace(0.0, seg.duration, points_per_segment)
        omega, delta = _segment_pair(schedule, k, t_local)
        total += generalized_area(omega, delta, t_local)
    return total / TWO_PI


# ---------------------------------------------------------------------------
# fast sequence fidelity from per-sector segment propagators

def fidelity_from_returns(c01, c11, *, cz_pi: bool = False):
    """Bell fidelity of the noiseless gate from its return amplitudes.

    ``c01`` and ``c11`` are <01|U|01> and <11|U|11> for the full
    sequence.  With ``cz_pi`` the state is scored against beta_00 with no
    frame correction, otherwise against beta_01 after the single-qubit
    frame rotation by arg(c01).  Inputs broadcast.
    """
    c01 = np.asarray(c01, dtype=complex)
    c11 = np.asarray(c11, dtype=complex)
    if cz_pi:
        b_a = (0.5 - 0.5 * c01) * _INV_SQRT2
        b_b = (-0.5 * c01 - 0.5 * c11) * _INV_SQRT2
    else:
        r = np.abs(c01)
        w = c11 * np.exp(-2j * np.angle(c01))
        b_a = np.asarray((0.5 + 0.5 * r) * _INV_SQRT2, dtype=complex)
        b_b = (-0.5 * r + 0.5 * w) * _INV_SQRT2
    aa = np.abs(b_a) ** 2
    bb = np.abs(b_b) ** 2
    return 0.5 * (aa + bb) + np.sqrt(aa * bb)


def _zero_phase(schedule: PulseSchedule) -> PulseSchedule:
    segs = tuple(dataclasses.replace(s, phase=0.0) for s in schedule.segments)
    return dataclasses.replace(schedule, segments=segs)


@dataclass(frozen=True)
class SequenceOperators:
    """Per-sector segment propagators of a sequence, phases factored out.

    ``mats`` maps the segment orientation (mirrored or not) to the
    phase-zero propagator of one segment; identical segments share one
    propagation.  ``amplitudes`` composes the full sequence for arbitrary
    segment phases using the sector phase weights.
    """

    sectors: tuple[Sector, Sector]
    mats: tuple[dict[bool, NDArray[np.complex128]], ...]
    mirrored: tuple[bool, ...]

    def amplitudes(self, phases) -> tuple[NDArray, NDArray]:
        """(c01, c11) for per-segment phases (scalars or broadcastable arrays)."""
        if len(phases) != len(self.mirrored):
            raise ValueError("one phase per segment required")
        out = []
        for sector, mats in zip(self.sectors, self.mats):
            w = sector.phase_weights
            wdiff = w[:, None] - w[None, :]
            total = None
            for k, flag in enumerate(self.mirrored):
                ph = np.asarray(phases[k], dtype=float)
                fac = np.exp(1j * ph[..., None, None] * wdiff)
                u = mats[flag] * fac
                total = u if total is None else u @ total
            out.append(total[..., 0, 0])
        return out[0], out[1]


def sequence_operators(
    model: AtomModel,
    schedule: PulseSchedule,
    config: IntegratorConfig = IntegratorConfig(),
) -> SequenceOperators:
    """Propagate each distinct segment once per symmetry sector."""
    cfg = IntegratorConfig(
        step=config.step,
        sample_stride=0,
        norm_tol=config.norm_tol,
        positivity_floor=config.positivity_floor,
    )
    zero = _zero_phase(schedule)
    sectors = gate_sectors(model.kind)
    mats = []
    for sector in sectors:
        sys_model, grids = build_sector_system(model, zero, sector, cfg.step)
        eye = np.eye(sector.dim, dtype=complex)
        per_flag: dict[bool, NDArray] = {}
        for k, seg in enumerate(schedule.segments):
            if seg.mirrored not in per_flag:
                res = propagate_magnus(sys_model, [grids[k]], eye, cfg)
                per_flag[seg.mirrored] = res.final
        mats.append(per_flag)
    return SequenceOperators(
        sectors=sectors,
        mats=tuple(mats),
        mirrored=tuple(s.mirrored for s in schedule.segments),
    )


def sequence_fidelity(
    model: AtomModel,
    schedule: PulseSchedule,
    config: IntegratorConfig = IntegratorConfig(),
) -> float:
    """Intrinsic Bell fidelity of a sequence via the sector shortcut."""
    ops = sequence_operators(model, schedule, config)
    c01, c11 = ops.amplitudes([s.phase for s in schedule.segments])
    _, use_frame = gate_flavor(model, schedule)
    return float(fidelity_from_returns(c01, c11, cz_pi=not use_frame))


# ---------------------------------------------------------------------------
# phase-shift search

@dataclass(frozen=True)
class PhaseSearchResult:
    phi_r: float
    phi_big: float
    fidelity: float
    flat: bool
    grid: NDArray[np.float64] | None = None
    axis: NDArray[np.float64] | None = None


def find_phase_shifts(
    model: AtomModel,
    base: LcgParams | ZchgParams,
    *,
    synthesis: str = "tqd",
    mirror_second: bool = False,
    resolution: float = math.pi / 100,
    refine: bool = True,
    flat_tol: float = 1e-9,
    config: IntegratorConfig = IntegratorConfig(),
    keep_grid: bool = False,
) -> PhaseSearchResult:
    """Grid-search the segment phase shifts (phi_r, phi_big) on [0, 2pi)^2.

    The four-segment sequence carries phases (0, phi_r, phi_big,
    phi_r + phi_big).  The landscape is evaluated on a square grid of the
    given resolution and the best point is optionally refined by a local
    simplex search.  A landscape with no structure (degenerate drive)
    returns the first grid point, flagged ``flat``.
    """
    schedule = build_sequence(
        model.kind, base, 0.0, 0.0, synthesis=synthesis, mirror_second=mirror_second
    )
    ops = sequence_operators(model, schedule, config)
    _, use_frame = gate_flavor(model, schedule)
    cz_pi = not use_frame

    n = max(2, int(round(TWO_PI / resolution)))
    axis = np.arange(n) * (TWO_PI / n)
    pr = axis[:, None]
    pb = axis[None, :]
    c01, c11 = ops.amplitudes([0.0, pr, pb, pr + pb])
    f_grid = fidelity_from_returns(c01, c11, cz_pi=cz_pi)

    f_max = float(f_grid.max())
    f_min = float(f_grid.min())
    if f_max - f_min <= flat_tol:
        return PhaseSearchResult(
            phi_r=float(axis[0]),
            phi_big=float(axis[0]),
            fidelity=f_max,
            flat=True,
            grid=f_grid if keep_grid else None,
            axis=axis if keep_grid else None,
        )

    i, j = np.unravel_index(int(np.argmax(f_grid)), f_grid.shape)
    best = np.array([axis[i], axis[j]])
    best_f = f_max
    if refine:

        def neg(x):
            c0, c1 = ops.amplitudes([0.0, x[0], x[1], x[0] + x[1]])
            return -float(fidelity_from_returns(c0, c1, cz_pi=cz_pi))

        res = minimize(
            neg,
            best,
            method="Nelder-Mead",
            options={"xatol": 1e-5, "fatol": 1e-12, "maxiter": 400},
        )
        if -res.fun > best_f:
            best = np.mod(res.x, TWO_PI)
            best_f = -float(res.fun)

    return PhaseSearchResult(
        phi_r=float(best[0]),
        phi_big=float(best[1]),
        fidelity=best_f,
        flat=False,
        grid=f_grid if keep_grid else None,
        axis=axis if keep_grid else None,
    )


# ---------------------------------------------------------------------------
# differential evolution

@dataclass(frozen=True)
class SearchDomain:
    """Box bounds for a parameter search, one (lower, upper) pair per name."""

    names: tuple[str, ...]
    bounds: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.names) != len(self.bounds):
            raise ValueError("one bound pair per parameter name required")
        for name, (lo, hi) in zip(self.names, self.bounds):
            if not lo < hi:
                raise ValueError(f"bound for {name!r} must satisfy lower < upper")

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @property
    def lower(self) -> NDArray[np.float64]:
        return np.array([b[0] for b in self.bounds])

    @property
    def upper(self) -> NDArray[np.float64]:
        return np.array([b[1] for b in self.bounds])

    def clip(self, x: NDArray) -> NDArray:
        return np.clip(x, self.lower, self.upper)

    def sample(self, rng: np.random.Generator, n: int) -> NDArray[np.float64]:
        lo, hi = self.lower, self.upper
        return lo + rng.random((n, self.dim)) * (hi - lo)


#: pulse-parameter domains in (us, MHz, MHz, fraction-of-duration) units
LCG_DOMAIN = SearchDomain(
    names=("duration_us", "omega0_mhz", "delta0_mhz", "tau_frac"),
    bounds=((0.1, 0.25), (10.0, 25.0), (20.0, 50.0), (0.2, 0.3)),
)

ZCHG_DOMAIN = SearchDomain(
    names=(
        "duration_us",
        "omega_b0_mhz",
        "omega_r0_mhz",
        "delta_b_mhz",
        "tau_b_frac",
        "tau_r_frac",
    ),
    bounds=(
        (0.1, 5.0),
        (50.0, 300.0),
        (50.0, 300.0),
        (100.0, 3000.0),
        (0.25, 0.35),
        (0.25, 0.35),
    ),
)


def params_to_lcg(x) -> LcgParams:
    """LCG_DOMAIN vector -> pulse parameters in internal units."""
    duration, omega0_mhz, delta0_mhz, tau_frac = (float(v) for v in x)
    return LcgParams(
        duration=duration,
        omega0=TWO_PI * omega0_mhz,
        delta0=TWO_PI * delta0_mhz,
        tau=tau_frac * duration,
    )


def params_to_zchg(x) -> ZchgParams:
    """ZCHG_DOMAIN vector -> pulse parameters in internal units."""
    duration, ob_mhz, or_mhz, db_mhz, tb_frac, tr_frac = (float(v) for v in x)
    return ZchgParams(
        duration=duration,
        omega_b0=TWO_PI * ob_mhz,
        omega_r0=TWO_PI * or_mhz,
        delta_b=TWO_PI * db_mhz,
        tau_b=tb_frac * duration,
        tau_r=tr_frac * duration,
    )


@dataclass(frozen=True)
class DeConfig:
    """DE/rand/1/bin settings; population defaults to 15 x dimension."""

    population_size: int | None = None
    max_generations: int = 300
    differential_weight: float = 0.8
    crossover_rate: float = 0.9
    seed: int = 0

    def __post_init__(self) -> None:
        if self.population_size is not None and self.population_size < 4:
            raise ValueError("population_size must be at least 4")
        if not 0.0 < self.differential_weight < 2.0:
            raise ValueError("differential_weight must lie in (0, 2)")
        if not 0.0 < self.crossover_rate < 1.0:
            raise ValueError("crossover_rate must lie in (0, 1)")
        if self.max_generations < 1:
            raise ValueError("max_generations must be positive")


@dataclass
class DeResult:
    x: NDArray[np.float64]
    value: float
    n_generations: int
    n_evaluations: int
    stopped_early: bool
    history: NDArray[np.float64]


def _pick_three(rng: np.random.Generator, n: int, i: int) -> list[int]:
    out: list[int] = []
    while len(out) < 3:
        j = int(rng.integers(n))
        if j != i and j not in out:
            out.append(j)
    return out


def _evaluate(objective, xs: NDArray, workers: int) -> NDArray[np.float64]:
    if workers <= 1:
        return np.array([float(objective(x)) for x in xs])
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return np.array(list(pool.map(objective, xs)))


def differential_evolution(
    objective,
    domain: SearchDomain,
    config: DeConfig = DeConfig(),
    *,
    early_stop=None,
    workers: int = 1,
) -> DeResult:
    """Minimize ``objective`` over ``domain`` with DE/rand/1/bin.

    Mutation v = a + F (b - c) against three distinct partners, binomial
    crossover with one forced component, greedy selection.  Trials are
    clipped to the box, so no candidate ever leaves the domain.  The run
    is deterministic under ``config.seed`` regardless of ``workers``.
    ``early_stop`` receives the best value after each generation and may
    end the search; the best point found so far is always returned.
    """
    rng = np.random.default_rng(config.seed)
    dim = domain.dim
    pop_n = config.population_size or 15 * dim
    fw = config.differential_weight
    cr = config.crossover_rate

    pop = domain.sample(rng, pop_n)
    vals = _evaluate(objective, pop, workers)
    n_eval = pop_n
    history = [float(vals.min())]
    stopped = False
    if early_stop is not None and early_stop(history[-1]):
        stopped = True

    gen = 0
    while gen < config.max_generations and not stopped:
        gen += 1
        trials = np.empty_like(pop)
        for i in range(pop_n):
            a, b, c = _pick_three(rng, pop_n, i)
            v = domain.clip(pop[a] + fw * (pop[b] - pop[c]))
            mask = rng.random(dim) < cr
            mask[int(rng.integers(dim))] = True
            trials[i] = np.where(mask, v, pop[i])
        tvals = _evaluate(objective, trials, workers)
        n_eval += pop_n
        better = tvals < vals
        pop[better] = trials[better]
        vals[better] = tvals[better]
        history.append(float(vals.min()))
        if early_stop is not None and early_stop(history[-1]):
            stopped = True

    k = int(np.argmin(vals))
    return DeResult(
        x=pop[k].copy(),
        value=float(vals[k]),
        n_generations=gen,
        n_evaluations=n_eval,
        stopped_early=stopped,
        history=np.asarray(history),
    )


@dataclass(frozen=True)
class AdiabaticGateObjective:
    """Negative intrinsic fidelity of the double-pulse adiabatic gate.

    Callable on a domain vector (LCG for dipole models, ZCHG for
    quadrupole); picklable, so DE can fan evaluations over processes.
    """

    model: AtomModel
    step: float = 1e-5

    def __call__(self, x) -> float:
        if self.model.kind is ExcitationKind.DIPOLE:
            base = params_to_lcg(x)
        else:
            base = params_to_zchg(x)
        schedule = double_sequence(self.model.kind, base, synthesis="adiabatic")
        cfg = IntegratorConfig(step=self.step)
        return -sequence_fidelity(self.model, schedule, cfg)


def search_adiabatic_parameters(
    kind: ExcitationKind,
    config: DeConfig = DeConfig(),
    *,
    model: AtomModel | None = None,
    step: float = 1e-5,
    workers: int = 1,
    stop_when_feasible: bool = True,
) -> DeResult:
    """DE search for a feasible adiabatic double-pulse gate."""
    model = model or default_model(kind)
    domain = LCG_DOMAIN if kind is ExcitationKind.DIPOLE else ZCHG_DOMAIN
    objective = AdiabaticGateObjective(model=model, step=step)
    early = (lambda v: feasible(-v, kind)) if stop_when_feasible else None
    return differential_evolution(
        objective, domain, config, early_stop=early, workers=workers
    )


# ---------------------------------------------------------------------------
# iso-fidelity resource searches

def _measured_omega_max(base: LcgParams, samples: int = 2001) -> float:
    t = np.linspace(0.0, base.duration, samples)
    omega, _ = tqd_dipole(base, t)
    return float(np.max(omega))


@dataclass(frozen=True)
class OmegaSearchResult:
    t_gate: float
    synthesis: str
    omega_max: float
    omega0: float
    fidelity: float
    phi_r: float | None = None
    phi_big: float | None = None


def _gate_point(
    model: AtomModel,
    t_gate: float,
    omega0: float,
    synthesis: str,
    delta0: float,
    tau_frac: float,
    phase_resolution: float,
    config: IntegratorConfig,
) -> OmegaSearchResult:
    """Evaluate one (T_g, Omega_0) point of the dipole gate family."""
    if synthesis == "adiabatic":
        duration = t_gate / 2.0
        base = LcgParams(duration, omega0, delta0, tau_frac * duration)
        schedule = double_sequence(ExcitationKind.DIPOLE, base, synthesis="adiabatic")
        f0 = sequence_fidelity(model, schedule, config)
        return OmegaSearchResult(t_gate, synthesis, omega0, omega0, f0)
    duration = t_gate / 4.0
    base = LcgParams(duration, omega0, delta0, tau_frac * duration)
    ps = find_phase_shifts(
        model, base, synthesis="tqd", resolution=phase_resolution, config=config
    )
    return OmegaSearchResult(
        t_gate,
        synthesis,
        _measured_omega_max(base),
        omega0,
        ps.fidelity,
        phi_r=ps.phi_r,
        phi_big=ps.phi_big,
    )


def min_omega_search(
    t_gate: float,
    target_f0: float,
    *,
    synthesis: str = "tqd",
    model: AtomModel | None = None,
    delta0: float = TWO_PI * 49.55,
    tau_frac: float = 0.266,
    omega_bounds: tuple[float, float] = (TWO_PI * 1.0, TWO_PI * 120.0),
    coarse: int = 16,
    tol: float = TWO_PI * 0.05,
    phase_resolution: float = math.pi / 50,
    config: IntegratorConfig = IntegratorConfig(),
) -> OmegaSearchResult:
    """Minimum peak Rabi frequency reaching ``target_f0`` at fixed gate time.

    Other pulse parameters stay fixed; the amplitude is bracketed on a
    geometric grid and bisected.  For the adiabatic gate the reported
    peak equals the pulse amplitude; for the synthesized gate it is the
    measured maximum of the transformed waveform, with the phase shifts
    re-searched at every amplitude.  Raises ``UnreachableTargetError``
    when no amplitude within bounds meets the target.
    """
    model = model or default_model(ExcitationKind.DIPOLE)
    if model.kind is not ExcitationKind.DIPOLE:
        raise ValueError("resource searches are defined for the dipole scheme")
    if synthesis not in ("adiabatic", "tqd"):
        raise ValueError(f"unknown synthesis {synthesis!r}")

    def point(omega0: float) -> OmegaSearchResult:
        return _gate_point(
            model, t_gate, omega0, synthesis, delta0, tau_frac, phase_resolution, config
        )

    grid = np.geomspace(omega_bounds[0], omega_bounds[1], coarse)
    first_ok: OmegaSearchResult | None = None
    k_ok = -1
    for k, omega0 in enumerate(grid):
        res = point(float(omega0))
        if res.fidelity > target_f0:
            first_ok = res
            k_ok = k
            break
    if first_ok is None:
        raise UnreachableTargetError(
            f"no amplitude in [{omega_bounds[0] / TWO_PI:.2f}, "
            f"{omega_bounds[1] / TWO_PI:.2f}] MHz reaches F0 > {target_f0} "
            f"at T_g = {t_gate} us"
        )
    if k_ok == 0:
        return first_ok

    lo = float(grid[k_ok - 1])
    hi = float(grid[k_ok])
    best = first_ok
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        res = point(mid)
        if res.fidelity > target_f0:
            hi = mid
            best = res
        else:
            lo = mid
    return best


def _resource_point(packed) -> OmegaSearchResult | None:
    t_gate, target_f0, kwargs = packed
    try:
        return min_omega_search(t_gate, target_f0, **kwargs)
    except UnreachableTargetError:
        return None


def resource_scan(
    t_gates,
    *,
    synthesis: str,
    target_f0: float | None = None,
    workers: int = 1,
    **kwargs,
) -> list[OmegaSearchResult | None]:
    """Minimum-amplitude scan over gate times; unreachable points yield None.

    The default targets keep the published asymmetry: the synthesized
    gate is held to the dipole feasibility threshold, the adiabatic gate
    to the quadrupole one.
    """
    if target_f0 is None:
        target_f0 = 0.9989 if synthesis == "tqd" else 0.989
    packs = [(float(t), target_f0, dict(kwargs, synthesis=synthesis)) for t in t_gates]
    if workers <= 1:
        return [_resource_point(p) for p in packs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_resource_point, packs))


def _solve_tqd_amplitude(
    t_seg: float,
    omega_budget: float,
    delta0: float,
    tau_frac: float,
    s_bounds: tuple[float, float],
    grid_n: int = 41,
    rel_tol: float = 1e-3,
) -> float | None:
    """Largest amplitude whose synthesized waveform peaks within budget.

    The measured peak versus amplitude is high at both ends (the
    counterdiabatic term dominates weak pulses), so the right branch
    above the minimum is bisected.  None when even the minimum exceeds
    the budget.
    """

    def measured(s: float) -> float:
        return _measured_omega_max(LcgParams(t_seg, s, delta0, tau_frac * t_seg), 801)

    grid = np.geomspace(s_bounds[0], s_bounds[1], grid_n)
    peaks = np.array([measured(float(s)) for s in grid])
    k_min = int(np.argmin(peaks))
    if peaks[k_min] > omega_budget:
        return None
    under = np.nonzero(peaks[k_min:] <= omega_budget)[0] + k_min
    j = int(under[-1])
    if j == grid_n - 1:
        return float(grid[-1])
    lo, hi = float(grid[j]), float(grid[j + 1])
    while hi - lo > rel_tol * lo:
        mid = 0.5 * (lo + hi)
        if measured(mid) <= omega_budget:
            lo = mid
        else:
            hi = mid
    return lo


def min_time_search(
    omega_budget: float,
    target_f0: float = 0.99,
    *,
    synthesis: str = "tqd",
    model: AtomModel | None = None,
    delta0: float = TWO_PI * 49.55,
    tau_frac: float = 0.266,
    t_bounds: tuple[float, float] = (0.04, 3.0),
    coarse: int = 12,
    rel_tol: float = 0.01,
    phase_resolution: float = math.pi / 50,
    config: IntegratorConfig = IntegratorConfig(),
) -> tuple[float, OmegaSearchResult]:
    """Shortest gate time reaching ``target_f0`` under a peak-Rabi budget.

    For the adiabatic gate the pulse amplitude is pinned at the budget;
    for the synthesized gate the amplitude is solved so the transformed
    waveform peaks at the budget.  Raises ``UnreachableTargetError`` when
    no time within bounds meets the target.
    """
    model = model or default_model(ExcitationKind.DIPOLE)
    if model.kind is not ExcitationKind.DIPOLE:
        raise ValueError("resource searches are defined for the dipole scheme")

    def point(t_gate: float) -> OmegaSearchResult | None:
        if synthesis == "adiabatic":
            return _gate_point(
                model, t_gate, omega_budget, synthesis, delta0, tau_frac,
                phase_resolution, config,
            )
        t_seg = t_gate / 4.0
        s = _solve_tqd_amplitude(
            t_seg, omega_budget, delta0, tau_frac, (TWO_PI * 0.5, TWO_PI * 400.0)
        )
        if s is None:
            return None
        return _gate_point(
            model, t_gate, s, synthesis, delta0, tau_frac, phase_resolution, config
        )

    grid = np.geomspace(t_bounds[0], t_bounds[1], coarse)
    first_ok: OmegaSearchResult | None = None
    k_ok = -1
    for k, t in enumerate(grid):
        res = point(float(t))
        if res is not None and res.fidelity > target_f0:
            first_ok = res
            k_ok = k
            break
    if first_ok is None:
        raise UnreachableTargetError(
            f"no gate time in [{t_bounds[0]}, {t_bounds[1]}] us reaches "
            f"F0 > {target_f0} with peak Rabi {omega_budget / TWO_PI:.2f} MHz"
        )
    if k_ok == 0:
        return float(grid[0]), first_ok

    lo = float(grid[k_ok - 1])
    hi = float(grid[k_ok])
    best = first_ok
    while hi - lo > rel_tol * lo:
        mid = 0.5 * (lo + hi)
        res = point(mid)
        if res is not None and res.fidelity > target_f0:
            hi = mid
            best = res
        else:
            lo = mid
    return hi, best


@dataclass(frozen=True)
class SpeedupPoint:
    omega_budget: float
    t_adiabatic: float
    t_tqd: float

    @property
    def speedup(self) -> float:
        return self.t_adiabatic / self.t_tqd


def _speedup_point(packed) -> SpeedupPoint | None:
    omega_budget, target_f0, kwargs = packed
    try:
        t_arp, _ = min_time_search(
            omega_budget, target_f0, synthesis="adiabatic", **kwargs
        )
        t_tqd, _ = min_time_search(omega_budget, target_f0, synthesis="tqd", **kwargs)
    except UnreachableTargetError:
        return None
    return SpeedupPoint(omega_budget, t_arp, t_tqd)


def speedup_scan(
    omega_budgets,
    target_f0: float = 0.99,
    *,
    workers: int = 1,
    **kwargs,
) -> list[SpeedupPoint | None]:
    """Gate-time speedup of the synthesized gate over the adiabatic one.

    Both gates are held to the same fidelity target while the peak Rabi
    budget varies; each point reports the two minimum times.
    """
    packs = [(float(w), target_f0, dict(kwargs)) for w in omega_budgets]
    if workers <= 1:
        return [_speedup_point(p) for p in packs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_speedup_point, packs))


# ---------------------------------------------------------------------------
# curve fits

@dataclass(frozen=True)
class FitResult:
    """Fitted parameters with one-sigma uncertainties and an R^2 score."""

    names: tuple[str, ...]
    values: NDArray[np.float64]
    sigmas: NDArray[np.float64]
    r_squared: float

    def __post_init__(self) -> None:
        if len(self.names) != len(self.values) or len(self.names) != len(self.sigmas):
            raise ValueError("names, values and sigmas must align")
        if self.r_squared > 1.0 + 1e-9:
            raise ValueError("r_squared cannot exceed 1")

    def as_dict(self) -> dict[str, tuple[float, float]]:
        return {
            n: (float(v), float(s))
            for n, v, s in zip(self.names, self.values, self.sigmas)
        }


def r_squared(y, y_fit) -> float:
    """Coefficient of determination 1 - SS_res / SS_tot."""
    y = np.asarray(y, dtype=float)
    y_fit = np.asarray(y_fit, dtype=float)
    ss_res = float(np.sum((y - y_fit) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else -math.inf
    return 1.0 - ss_res / ss_tot


def _finite_xy(x, y) -> tuple[NDArray, NDArray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("x and y must have equal length")
    mask = np.isfinite(x) & np.isfinite(y)
    return x[mask], y[mask]


def _power_model(t, nu1, nu2, p):
    return nu1 * t ** (-p) + nu2


def _power_jac(t, nu1, nu2, p):
    tp = t ** (-p)
    return np.stack([tp, np.ones_like(t), -nu1 * tp * np.log(t)], axis=-1)


def fit_power_law(t_gates, omega_maxes) -> FitResult:
    """Fit omega_max = nu1 * t^(-p) + nu2 to a resource scan.

    Initial values come from a log-log line through the offset-corrected
    data; the fit itself is damped least squares with an analytic
    Jacobian.  Non-convergence raises ``FitError`` carrying the
    residuals at the initial guess.
    """
    t, y = _finite_xy(t_gates, omega_maxes)
    if len(t) < 4:
        raise ValueError("power-law fit needs at least 4 points")
    span = float(y.max() - y.min())
    nu2_0 = float(y.min()) - 0.05 * (span + 1e-12)
    yy = y - nu2_0
    slope, intercept = np.polyfit(np.log(t), np.log(yy), 1)
    p0 = [float(np.exp(intercept)), nu2_0, float(np.clip(-slope, 0.05, 10.0))]
    try:
        popt, pcov = curve_fit(
            _power_model, t, y, p0=p0, jac=_power_jac, method="lm", maxfev=20000
        )
    except RuntimeError as exc:
        raise FitError(str(exc), residuals=y - _power_model(t, *p0)) from exc
    sig = np.sqrt(np.clip(np.diag(pcov), 0.0, np.inf))
    r2 = min(r_squared(y, _power_model(t, *popt)), 1.0)
    return FitResult(("nu1", "nu2", "p"), np.asarray(popt), sig, r2)


def _logistic_model(x, a, b, c, d):
    return a / (1.0 + np.exp(-b * x + c)) + d


def _logistic_jac(x, a, b, c, d):
    s = 1.0 / (1.0 + np.exp(-b * x + c))
    asp = a * s * (1.0 - s)
    return np.stack([s, asp * x, -asp, np.ones_like(x)], axis=-1)


def fit_logistic(x_values, y_values) -> FitResult:
    """Fit y = a / (1 + exp(-b x + c)) + d to a speedup scan.

    The initial guess places the transition at the data midpoint with
    the step height spanning the data range.  Non-convergence raises
    ``FitError`` with the residuals at the initial guess.
    """
    x, y = _finite_xy(x_values, y_values)
    if len(x) < 5:
        raise ValueError("logistic fit needs at least 5 points")
    d0 = float(y.min())
    a0 = max(float(y.max() - y.min()), 1e-9)
    half = d0 + 0.5 * a0
    x_mid = float(np.interp(half, y, x)) if np.all(np.diff(y) >= 0) else float(
        x[np.argmin(np.abs(y - half))]
    )
    x_span = max(float(x.max() - x.min()), 1e-9)
    b0 = 8.0 / x_span
    p0 = [a0, b0, b0 * x_mid, d0]
    try:
        popt, pcov = curve_fit(
            _logistic_model, x, y, p0=p0, jac=_logistic_jac, method="lm", maxfev=20000
        )
    except (RuntimeError, OptimizeWarning) as exc:
        raise FitError(str(exc), residuals=y - _logistic_model(x, *p0)) from exc
    sig = np.sqrt(np.clip(np.diag(pcov), 0.0, np.inf))
    r2 = min(r_squared(y, _logistic_model(x, *popt)), 1.0)
    return FitResult(("a", "b", "c", "d"), np.asarray(popt), sig, r2)
