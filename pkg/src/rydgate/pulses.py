"""Adiabatic pulse families and transitionless (counterdiabatic) synthesis.

Two base families are implemented:

* LCG: Gaussian Rabi envelope with a linear detuning chirp, used for
  rapid adiabatic passage on the one-photon (dipole) transition.
* ZCHG: a delayed pair of fourth-order super-Gaussian envelopes at
  constant one-photon detuning, used for STIRAP-style passage on the
  two-photon (quadrupole) transition.

The transitionless transform maps a base pulse into the pulse that
drives the blockaded two-atom bright transition exactly, by absorbing
the counterdiabatic correction into a modified envelope and detuning.
For the quadrupole scheme the transform acts on the adiabatically
eliminated two-level pair and is then inverted back to the two physical
laser envelopes.

All angular frequencies are rad/us, times us.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

from .atom import ExcitationKind

SQRT2 = math.sqrt(2.0)

#: guard for vanishing denominators in the counterdiabatic terms
DENOM_FLOOR = 1e-12

#: finite-difference half-step (us) for the theta-dot correction
FD_STEP = 1e-5

FloatArray = NDArray[np.float64]


@dataclass(frozen=True)
class LcgParams:
    """Linearly chirped Gaussian: Omega0 exp(-(t-T/2)^2/tau^2), linear chirp +-Delta0."""

    duration: float
    omega0: float
    delta0: float
    tau: float

    def __post_init__(self) -> None:
        if self.duration <= 0 or self.tau <= 0:
            raise ValueError("duration and tau must be positive")
        if self.omega0 < 0:
            raise ValueError("omega0 must be non-negative")


@dataclass(frozen=True)
class ZchgParams:
    """Zero-chirp hyper-Gaussian pair at constant one-photon detuning.

    The red envelope peaks at T/3 and the blue at 2T/3 (counter-intuitive
    STIRAP ordering for a ladder starting in |1>).
    """

    duration: float
    omega_b0: float
    omega_r0: float
    delta_b: float
    tau_b: float
    tau_r: float

    def __post_init__(self) -> None:
        if self.duration <= 0 or self.tau_b <= 0 or self.tau_r <= 0:
            raise ValueError("duration and tau must be positive")
        if self.omega_b0 < 0 or self.omega_r0 < 0:
            raise ValueError("peak Rabi frequencies must be non-negative")
        if self.delta_b <= 0:
            raise ValueError("delta_b must be positive")

    def warn_if_weakly_eliminated(self) -> None:
        """Warn when Delta_B fails the >=5x margin over the peak couplings."""
        import warnings

        peak = max(self.omega_b0, self.omega_r0)
        if self.delta_b < 5.0 * peak:
            warnings.warn(
                f"delta_b = {self.delta_b:.3g} is below 5x the peak coupling "
                f"{peak:.3g}; adiabatic elimination is marginal",
                stacklevel=2,
            )


def _check_window(t: FloatArray, duration: float) -> None:
    if t.size and (t.min() < -1e-12 or t.max() > duration + 1e-12):
        raise ValueError(f"time sample outside [0, {duration}]")


def lcg_eval(p: LcgParams, t) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    """Evaluate Omega, Delta and their analytic time derivatives."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    _check_window(t, p.duration)
    u = t - 0.5 * p.duration
    omega = p.omega0 * np.exp(-(u * u) / (p.tau * p.tau))
    domega = omega * (-2.0 * u / (p.tau * p.tau))
    slope = 2.0 * p.delta0 / p.duration
    delta = slope * u
    ddelta = np.full_like(t, slope)
    return omega, delta, domega, ddelta


def zchg_eval(p: ZchgParams, t):
    """Evaluate Omega_B, Omega_R, Delta_B and the envelope derivatives."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    _check_window(t, p.duration)
    v = t - 2.0 * p.duration / 3.0
    w = t - p.duration / 3.0
    omega_b = p.omega_b0 * np.exp(-(v ** 4) / p.tau_b ** 4)
    omega_r = p.omega_r0 * np.exp(-(w ** 4) / p.tau_r ** 4)
    domega_b = omega_b * (-4.0 * v ** 3 / p.tau_b ** 4)
    domega_r = omega_r * (-4.0 * w ** 3 / p.tau_r ** 4)
    delta_b = np.full_like(t, p.delta_b)
    return omega_b, omega_r, delta_b, domega_b, domega_r


def _effective_lcg(p: LcgParams, t):
    """Bright-transition two-level pair (sqrt(2) Omega, Delta) and derivatives."""
    omega, delta, domega, ddelta = lcg_eval(p, t)
    return SQRT2 * omega, delta, SQRT2 * domega, ddelta


def _effective_zchg(p: ZchgParams, t):
    """Eliminated two-photon pair for the bright transition.

    Omega_eff = -sqrt(2) Omega_B Omega_R / (2 Delta_B),
    Delta_eff = (Omega_B^2 - Omega_R^2) / (4 Delta_B); the sqrt(2) is the
    two-atom collective enhancement.
    """
    omega_b, omega_r, _, domega_b, domega_r = zchg_eval(p, t)
    inv = 1.0 / (2.0 * p.delta_b)
    omega_eff = -SQRT2 * omega_b * omega_r * inv
    domega_eff = -SQRT2 * (domega_b * omega_r + omega_b * domega_r) * inv
    delta_eff = (omega_b ** 2 - omega_r ** 2) * (0.5 * inv)
    ddelta_eff = (omega_b * domega_b - omega_r * domega_r) * inv
    return omega_eff, delta_eff, domega_eff, ddelta_eff


def _counterdiabatic(omega_eff, delta_eff, domega_eff, ddelta_eff):
    """Omega_c = (Omega_eff dDelta_eff - Delta_eff dOmega_eff) / (Delta_eff^2 + Omega_eff^2)."""
    denom = np.maximum(delta_eff ** 2 + omega_eff ** 2, DENOM_FLOOR)
    return (omega_eff * ddelta_eff - delta_eff * domega_eff) / denom


def _tqd_effective(eval_eff, duration: float, t: FloatArray):
    """Transitionless two-level pair (Omega_eff~, Delta_eff~) at times t.

    The dressing angle rate theta-dot is evaluated through its rational
    closed form; the counterdiabatic derivative uses a central finite
    difference with the stencil clamped inside the pulse window, which
    degrades to one-sided at the segment endpoints.
    """
    omega_eff, delta_eff, domega_eff, ddelta_eff = eval_eff(t)
    omega_c = _counterdiabatic(omega_eff, delta_eff, domega_eff, ddelta_eff)

    t_hi = np.minimum(t + FD_STEP, duration)
    t_lo = np.maximum(t - FD_STEP, 0.0)
    omega_c_hi = _counterdiabatic(*eval_eff(t_hi))
    omega_c_lo = _counterdiabatic(*eval_eff(t_lo))
    domega_c = (omega_c_hi - omega_c_lo) / (t_hi - t_lo)

    denom = np.maximum(omega_eff ** 2 + omega_c ** 2, DENOM_FLOOR)
    dtheta = (omega_eff * domega_c - omega_c * domega_eff) / denom

    omega_eff_t = np.sqrt(omega_eff ** 2 + omega_c ** 2)
    delta_eff_t = delta_eff + dtheta
    return omega_eff_t, delta_eff_t


def tqd_dipole(p: LcgParams, t) -> tuple[FloatArray, FloatArray]:
    """Transitionless dipole pulse (Omega~, Delta~) from an LCG base.

    Omega~ = sqrt(Omega^2 + ((Omega dDelta - Delta dOmega)/(Delta^2 + 2 Omega^2))^2)
    and Delta~ = Delta + theta-dot of the bright-transition dressing angle.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    omega_eff_t, delta_eff_t = _tqd_effective(lambda x: _effective_lcg(p, x), p.duration, t)
    return omega_eff_t / SQRT2, delta_eff_t


def tqd_quadrupole_effective(p: ZchgParams, t) -> tuple[FloatArray, FloatArray]:
    """Transitionless two-level pair for the quadrupole scheme (pre-inversion)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return _tqd_effective(lambda x: _effective_zchg(p, x), p.duration, t)


def invert_quadrupole(omega_eff_t, delta_eff_t, delta_b: float):
    """Physical envelopes realizing a target eliminated pair at fixed Delta_B.

    Omega_B~ = sqrt(2 Delta_B (s + Delta_eff~)), Omega_R~ with -Delta_eff~,
    where s = sqrt(Delta_eff~^2 + Omega_eff~^2 / 2).  The radicands are
    non-negative by construction for Delta_B > 0; a negative value beyond
    rounding signals an invalid (non-positive) Delta_B.
    """
    s = np.sqrt(delta_eff_t ** 2 + 0.5 * omega_eff_t ** 2)
    rad_b = 2.0 * delta_b * (s + delta_eff_t)
    rad_r = 2.0 * delta_b * (s - delta_eff_t)
    if np.any(rad_b < -1e-9) or np.any(rad_r < -1e-9):
        raise ValueError("negative radicand in envelope inversion; delta_b must be positive")
    return np.sqrt(np.maximum(rad_b, 0.0)), np.sqrt(np.maximum(rad_r, 0.0))


def tqd_quadrupole(p: ZchgParams, t) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Transitionless quadrupole envelopes (Omega_B~, Omega_R~, Delta_B)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    omega_eff_t, delta_eff_t = tqd_quadrupole_effective(p, t)
    omega_b, omega_r = invert_quadrupole(omega_eff_t, delta_eff_t, p.delta_b)
    return omega_b, omega_r, np.full_like(omega_b, p.delta_b)


@dataclass(frozen=True)
class Segment:
    """One pulse slot of a sequence: placement, phase and orientation."""

    start: float
    duration: float
    phase: float = 0.0
    mirrored: bool = False


@dataclass(frozen=True)
class PulseSchedule:
    """A contiguous sequence of (possibly phase-shifted) copies of one base pulse.

    ``synthesis`` selects the raw adiabatic envelopes ("adiabatic") or the
    transitionless transform ("tqd").  ``drive_segment`` evaluates the drive
    of segment ``k`` at segment-local times; the phase factor multiplies the
    complex Rabi coupling (blue laser only in the quadrupole scheme).
    """

    kind: ExcitationKind
    synthesis: str
    base: LcgParams | ZchgParams
    segments: tuple[Segment, ...]

    def __post_init__(self) -> None:
        if self.synthesis not in ("adiabatic", "tqd"):
            raise ValueError(f"unknown synthesis {self.synthesis!r}")
        t = 0.0
        for seg in self.segments:
            if abs(seg.start - t) > 1e-12:
                raise ValueError("segments must tile [0, total_duration] contiguously")
            t += seg.duration

    @property
    def total_duration(self) -> float:
        return self.segments[-1].start + self.segments[-1].duration

    @property
    def boundaries(self) -> FloatArray:
        edges = [s.start for s in self.segments] + [self.total_duration]
        return np.asarray(edges)

    def drive_segment(self, k: int, t_local) -> dict[str, np.ndarray]:
        seg = self.segments[k]
        t_local = np.atleast_1d(np.asarray(t_local, dtype=float))
        t_eval = seg.duration - t_local if seg.mirrored else t_local
        phase = np.exp(1j * seg.phase)
        if self.kind is ExcitationKind.DIPOLE:
            assert isinstance(self.base, LcgParams)
            if self.synthesis == "tqd":
                omega, delta = tqd_dipole(self.base, t_eval)
            else:
                omega, delta, _, _ = lcg_eval(self.base, t_eval)
            return {"omega": omega * phase, "delta": delta}
        assert isinstance(self.base, ZchgParams)
        if self.synthesis == "tqd":
            omega_b, omega_r, delta_b = tqd_quadrupole(self.base, t_eval)
        else:
            omega_b, omega_r, delta_b, _, _ = zchg_eval(self.base, t_eval)
        return {"omega_blue": omega_b * phase, "omega_red": omega_r + 0j, "delta_blue": delta_b}

    def drive(self, t) -> dict[str, np.ndarray]:
        """Evaluate the drive at absolute times; boundaries bind rightward."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        edges = self.boundaries
        idx = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, len(self.segments) - 1)
        out: dict[str, np.ndarray] = {}
        for k in range(len(self.segments)):
            mask = idx == k
            if not mask.any():
                continue
            part = self.drive_segment(k, t[mask] - self.segments[k].start)
            for key, val in part.items():
                if key not in out:
                    out[key] = np.zeros(t.shape, dtype=val.dtype)
                out[key][mask] = val
        return out

    def effective_pair(self, t) -> tuple[FloatArray, FloatArray]:
        """Single-atom generalized two-level coefficients (for pulse areas).

        Dipole: (Omega~, Delta~).  Quadrupole: the one-atom two-photon pair
        (Omega_B Omega_R / 2 Delta_B, (Omega_B^2 - Omega_R^2) / 4 Delta_B).
        """
        d = self.drive(t)
        if self.kind is ExcitationKind.DIPOLE:
            return np.abs(d["omega"]), np.real(d["delta"])
        omega_b = np.abs(d["omega_blue"])
        omega_r = np.abs(d["omega_red"])
        delta_b = np.real(d["delta_blue"])
        return (
            omega_b * omega_r / (2.0 * delta_b),
            (omega_b ** 2 - omega_r ** 2) / (4.0 * delta_b),
        )


def build_sequence(
    kind: ExcitationKind,
    base: LcgParams | ZchgParams,
    phi_r: float,
    phi_big: float,
    *,
    synthesis: str = "tqd",
    mirror_second: bool = False,
) -> PulseSchedule:
    """Four-segment gate sequence from one base pulse (total 4T).

    Segment phases are (0, phi_r, phi_big, phi_r + phi_big): phi_r between
    the pulses of each pair, phi_big between the two pairs.  With
    ``mirror_second`` the second pulse of each pair runs time-reversed.
    """
    T = base.duration
    segs = (
        Segment(0.0, T, 0.0, False),
        Segment(T, T, phi_r, mirror_second),
        Segment(2 * T, T, phi_big, False),
        Segment(3 * T, T, phi_r + phi_big, mirror_second),
    )
    return PulseSchedule(kind=kind, synthesis=synthesis, base=base, segments=segs)


def double_sequence(
    kind: ExcitationKind,
    base: LcgParams | ZchgParams,
    *,
    synthesis: str = "adiabatic",
) -> PulseSchedule:
    """Two identical back-to-back pulses (total 2T), the adiabatic gate layout."""
    T = base.duration
    segs = (Segment(0.0, T, 0.0, False), Segment(T, T, 0.0, False))
    return PulseSchedule(kind=kind, synthesis=synthesis, base=base, segments=segs)


def _transfer_final_population(omega: FloatArray, delta: FloatArray, h: float) -> float:
    """Final upper-level population of an exact-resonance two-level sweep.

    RK4 on i dpsi/dt = H(t) psi with H = [[-Delta/2, Omega/2], [Omega/2, Delta/2]]
    sampled on a uniform grid of step h (omega/delta sampled at half-steps too:
    arrays must hold 2n+1 nodes for n steps).
    """
    psi = np.array([1.0 + 0j, 0.0 + 0j])
    n = (len(omega) - 1) // 2

    def deriv(c0: complex, c1: complex, k: int) -> tuple[complex, complex]:
        om, de = omega[k], delta[k]
        return (
            -1j * (-0.5 * de * c0 + 0.5 * om * c1),
            -1j * (0.5 * om * c0 + 0.5 * de * c1),
        )

    for i in range(n):
        k0, k1, k2 = 2 * i, 2 * i + 1, 2 * i + 2
        a = deriv(psi[0], psi[1], k0)
        b = deriv(psi[0] + 0.5 * h * a[0], psi[1] + 0.5 * h * a[1], k1)
        c = deriv(psi[0] + 0.5 * h * b[0], psi[1] + 0.5 * h * b[1], k1)
        d = deriv(psi[0] + h * c[0], psi[1] + h * c[1], k2)
        psi = psi + (h / 6.0) * np.array(
            [a[0] + 2 * b[0] + 2 * c[0] + d[0], a[1] + 2 * b[1] + 2 * c[1] + d[1]]
        )
    psi = psi / np.linalg.norm(psi)
    return float(abs(psi[1]) ** 2)


def min_pulse_duration(
    omega0: float,
    delta0: float,
    tau_fraction: float,
    *,
    pop_threshold: float = 0.99,
    amp_ratio: float = 1.1,
    t_lo: float = 1e-3,
    t_hi: float = 0.5,
    tol: float = 1e-4,
    step: float = 1e-4,
) -> float:
    """Shortest LCG base duration whose transitionless pulse stays practical.

    A duration T is admissible when (a) the two-level transition the
    transform targets (coupling sqrt(2) Omega~, detuning Delta~) ends with
    upper-level population above ``pop_threshold`` and (b) the synthesized
    peak obeys max Omega~ <= amp_ratio * max Omega.  Bisection on T; the
    admissible set is treated as an up-set in T.
    """

    def admissible(T: float) -> bool:
        p = LcgParams(duration=T, omega0=omega0, delta0=delta0, tau=tau_fraction * T)
        n = max(200, int(math.ceil(T / step)))
        grid = np.linspace(0.0, T, 2 * n + 1)
        omega_t, delta_t = tqd_dipole(p, grid)
        if omega_t.max() > amp_ratio * omega0:
            return False
        pop = _transfer_final_population(SQRT2 * omega_t, delta_t, T / n)
        return pop > pop_threshold

    if admissible(t_lo):
        return t_lo
    if not admissible(t_hi):
        raise ValueError(f"no admissible duration in [{t_lo}, {t_hi}]")
    lo, hi = t_lo, t_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def scale_amplitude(base: LcgParams | ZchgParams, factor: float):
    """Base pulse with all Rabi amplitudes scaled by ``factor``."""
    if isinstance(base, LcgParams):
        return replace(base, omega0=base.omega0 * factor)
    return replace(base, omega_b0=base.omega_b0 * factor, omega_r0=base.omega_r0 * factor)


def waveform_table(schedule: PulseSchedule, points_per_segment: int = 400):
    """Tabulate the synthesized drive for export: (column names, 2-d array).

    Times are sampled uniformly inside each segment (endpoints included),
    frequencies reported as value / 2pi in MHz, phase in radians.
    """
    two_pi = 2.0 * math.pi
    rows = []
    for k, seg in enumerate(schedule.segments):
        tloc = np.linspace(0.0, seg.duration, points_per_segment)
        d = schedule.drive_segment(k, tloc)
        t_abs = seg.start + tloc
        if schedule.kind is ExcitationKind.DIPOLE:
            block = np.column_stack(
                [t_abs, np.abs(d["omega"]) / two_pi, d["delta"] / two_pi,
                 np.full_like(t_abs, seg.phase)]
            )
        else:
            block = np.column_stack(
                [t_abs, np.abs(d["omega_blue"]) / two_pi, np.abs(d["omega_red"]) / two_pi,
                 np.real(d["delta_blue"]) / two_pi, np.full_like(t_abs, seg.phase)]
            )
        rows.append(block)
    if schedule.kind is ExcitationKind.DIPOLE:
        names = ["t_us", "omega_mhz", "delta_mhz", "phase_rad"]
    else:
        names = ["t_us", "omega_blue_mhz", "omega_red_mhz", "delta_blue_mhz", "phase_rad"]
    return names, np.vstack(rows)
