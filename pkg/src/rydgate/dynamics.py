"""Fixed-step propagation of driven states and open-system density matrices.

A time-dependent Hamiltonian is expressed as a static part plus drive
terms, each the product of a scalar coefficient sampled on the time grid
and a constant structure matrix:

* ``herm`` terms contribute ``c(t) * M`` with real coefficients and
  Hermitian ``M`` (detunings);
* ``ladder`` terms contribute ``c(t) * M + conj(c(t)) * M^dag`` with
  complex coefficients (laser couplings, where the phase rides on c).

Structure matrices may carry leading batch axes so that an ensemble of
noise realizations propagates in one vectorized pass; the coefficient
grids are shared across the batch.

The classic fourth-order Runge-Kutta rule with a fixed step is used for
both the Schroedinger and the Lindblad equation.  Coefficients must be
supplied on a grid of 2n+1 nodes per segment (step endpoints plus
midpoints).  Conservation checks (norm / trace drift, positivity) guard
against an insufficient step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .linalg import ComplexMatrix, is_hermitian

__all__ = [
    "IntegrationError",
    "IntegratorConfig",
    "DriveTerm",
    "HamiltonianModel",
    "SegmentGrid",
    "segment_nodes",
    "Dissipator",
    "UnitaryResult",
    "LindbladResult",
    "propagate_unitary",
    "propagate_lindblad",
]


class IntegrationError(RuntimeError):
    """A conservation check failed during propagation."""


@dataclass(frozen=True)
class IntegratorConfig:
    """step: RK4 step (us); sample_stride: record every k-th step (0 = endpoints only)."""

    step: float = 1e-5
    sample_stride: int = 0
    norm_tol: float = 1e-5
    positivity_floor: float = -1e-6

    def __post_init__(self) -> None:
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.sample_stride < 0:
            raise ValueError("sample_stride must be >= 0")


@dataclass(frozen=True)
class DriveTerm:
    """One drive structure matrix; ``adjoint`` present marks a ladder term."""

    matrix: ComplexMatrix
    adjoint: ComplexMatrix | None = None

    @staticmethod
    def herm(matrix) -> "DriveTerm":
        matrix = np.asarray(matrix, dtype=complex)
        ref = matrix if matrix.ndim == 2 else matrix[(0,) * (matrix.ndim - 2)]
        if not is_hermitian(ref):
            raise ValueError("herm drive term requires a Hermitian matrix")
        return DriveTerm(matrix=matrix)

    @staticmethod
    def ladder(matrix) -> "DriveTerm":
        matrix = np.asarray(matrix, dtype=complex)
        return DriveTerm(matrix=matrix, adjoint=matrix.conj().swapaxes(-1, -2))


@dataclass(frozen=True)
class HamiltonianModel:
    """H(t) = static + sum_k coeff_k(t) * term_k (+ h.c. for ladder terms)."""

    static: ComplexMatrix
    terms: tuple[DriveTerm, ...] = ()

    def __post_init__(self) -> None:
        static = np.asarray(self.static)
        ref = static if static.ndim == 2 else static[(0,) * (static.ndim - 2)]
        if not is_hermitian(ref):
            raise ValueError("static part must be Hermitian")

    @property
    def dim(self) -> int:
        return self.static.shape[-1]

    def batch_shape(self) -> tuple[int, ...]:
        shape = self.static.shape
        for term in self.terms:
            shape = np.broadcast_shapes(shape, term.matrix.shape)
        return shape

    def assemble(self, coeffs) -> ComplexMatrix:
        """Dense H for one coefficient tuple (reference implementation)."""
        h = np.zeros(self.batch_shape(), dtype=complex)
        h += self.static
        for term, c in zip(self.terms, coeffs, strict=True):
            if term.adjoint is None:
                h += np.real(c) * term.matrix
            else:
                h += c * term.matrix
                h += np.conj(c) * term.adjoint
        return h


@dataclass(frozen=True)
class SegmentGrid:
    """Coefficient samples for one contiguous span: 2n+1 nodes, step h = duration/n."""

    n_steps: int
    h: float
    coeffs: tuple[NDArray, ...]

    def __post_init__(self) -> None:
        for c in self.coeffs:
            if c.shape != (2 * self.n_steps + 1,):
                raise ValueError("coefficient grids must have 2*n_steps + 1 nodes")


def segment_nodes(duration: float, step: float) -> tuple[int, float, NDArray[np.float64]]:
    """Node grid for one segment: (n_steps, h, times) with 2n+1 times in [0, duration]."""
    n = max(1, int(np.ceil(duration / step - 1e-9)))
    h = duration / n
    return n, h, np.linspace(0.0, duration, 2 * n + 1)


@dataclass(frozen=True)
class Dissipator:
    """Jump operators in scatter form for fast application of sum c rho c^dag.

    Each channel stores (rows, cols, weight) with weight[i, j] = v_i conj(v_j)
    for a jump operator sum_i v_i |rows_i><cols_i| having at most one entry
    per row and per column.  ``decay`` is the real diagonal of sum c^dag c.
    """

    channels: tuple[tuple[NDArray, NDArray, NDArray], ...]
    decay: NDArray[np.float64]

    @staticmethod
    def from_operators(ops, dim: int) -> "Dissipator":
        channels = []
        decay = np.zeros(dim)
        for op in ops:
            op = np.asarray(op, dtype=complex)
            rows, cols = np.nonzero(op)
            if len(set(rows.tolist())) != len(rows) or len(set(cols.tolist())) != len(cols):
                raise ValueError("jump operator must have at most one entry per row/column")
            vals = op[rows, cols]
            channels.append((rows, cols, np.outer(vals, vals.conj())))
            decay[cols] += np.abs(vals) ** 2
        return Dissipator(channels=tuple(channels), decay=decay)

    def apply_gain(self, rho, out) -> None:
        """out += sum_c c rho c^dag (batched)."""
        for rows, cols, weight in self.channels:
            out[..., rows[:, None], rows[None, :]] += weight * rho[..., cols[:, None], cols[None, :]]


@dataclass
class UnitaryResult:
    times: NDArray[np.float64]
    states: NDArray[np.complex128] | None
    final: NDArray[np.complex128]
    norm_drift: float


@dataclass
class LindbladResult:
    times: NDArray[np.float64]
    rhos: NDArray[np.complex128] | None
    final: NDArray[np.complex128]
    trace_drift: float
    min_eigenvalue: float = field(default=float("nan"))


def _assemble_into(out, static, terms, coeffs, k: int) -> None:
    np.copyto(out, static)
    for term, grid in zip(terms, coeffs):
        c = grid[k]
        if term.adjoint is None:
            out += c.real * term.matrix
        else:
            out += c * term.matrix
            out += np.conj(c) * term.adjoint


def _canonical_state(y0, dim: int) -> tuple[NDArray[np.complex128], bool]:
    y = np.asarray(y0, dtype=complex)
    if y.shape[-1] == dim and (y.ndim == 1 or y.shape[-2] != dim):
        return y[..., :, None], True
    if y.shape[-2] != dim:
        raise ValueError(f"state shape {y.shape} incompatible with dimension {dim}")
    return y, False


def propagate_unitary(
    model: HamiltonianModel,
    grids: list[SegmentGrid] | tuple[SegmentGrid, ...],
    y0,
    config: IntegratorConfig = IntegratorConfig(),
) -> UnitaryResult:
    """Integrate i dpsi/dt = H(t) psi across consecutive segments.

    ``y0`` is a state vector (..., D) or a matrix of column states
    (..., D, M); to obtain segment propagators pass an identity.  Column
    norms are checked against their initial values at segment boundaries.
    """
    dim = model.dim
    psi, was_vector = _canonical_state(y0, dim)
    batch = np.broadcast_shapes(model.batch_shape()[:-2], psi.shape[:-2])
    psi = np.array(np.broadcast_to(psi, batch + psi.shape[-2:]), dtype=complex)
    norms0 = np.linalg.norm(psi, axis=-2)

    hbuf = np.zeros(batch + (dim, dim), dtype=complex)
    sampled_times: list[float] = []
    sampled_states: list[NDArray] = []
    stride = config.sample_stride
    if stride:
        sampled_times.append(0.0)
        sampled_states.append(psi.copy())

    t_offset = 0.0
    global_step = 0
    for grid in grids:
        h = grid.h
        for i in range(grid.n_steps):
            k0 = 2 * i
            _assemble_into(hbuf, model.static, model.terms, grid.coeffs, k0)
            d1 = -1j * (hbuf @ psi)
            _assemble_into(hbuf, model.static, model.terms, grid.coeffs, k0 + 1)
            d2 = -1j * (hbuf @ (psi + (0.5 * h) * d1))
            d3 = -1j * (hbuf @ (psi + (0.5 * h) * d2))
            _assemble_into(hbuf, model.static, model.terms, grid.coeffs, k0 + 2)
            d4 = -1j * (hbuf @ (psi + h * d3))
            psi += (h / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4)
            global_step += 1
            if stride and global_step % stride == 0:
                sampled_times.append(t_offset + (i + 1) * h)
                sampled_states.append(psi.copy())
        t_offset += grid.n_steps * h
        drift = float(np.max(np.abs(np.linalg.norm(psi, axis=-2) - norms0)))
        if drift > config.norm_tol:
            raise IntegrationError(
                f"norm drift {drift:.3e} exceeds {config.norm_tol:.1e}; reduce the step"
            )

    if stride and sampled_times[-1] != t_offset:
        sampled_times.append(t_offset)
        sampled_states.append(psi.copy())
    final = psi[..., 0] if was_vector else psi
    states = None
    if stride:
        stacked = np.stack(sampled_states)
        states = stacked[..., 0] if was_vector else stacked
    drift = float(np.max(np.abs(np.linalg.norm(psi, axis=-2) - norms0)))
    return UnitaryResult(
        times=np.asarray(sampled_times), states=states, final=final, norm_drift=drift
    )


def propagate_magnus(
    model: HamiltonianModel,
    grids: list[SegmentGrid] | tuple[SegmentGrid, ...],
    y0,
    config: IntegratorConfig = IntegratorConfig(),
) -> UnitaryResult:
    """Piecewise fourth-order Magnus integration of i dpsi/dt = H(t) psi.

    Each step exponentiates the Simpson average of H over the step plus
    one commutator correction; the step map is exactly unitary, so fast
    static phases (a strong blockade shift, a large intermediate
    detuning) are integrated without stability constraints on the step.
    Intended for small systems where the matrix exponential is cheap;
    accepts the same state shapes as ``propagate_unitary``.
    """
    dim = model.dim
    psi, was_vector = _canonical_state(y0, dim)
    batch = np.broadcast_shapes(model.batch_shape()[:-2], psi.shape[:-2])
    psi = np.array(np.broadcast_to(psi, batch + psi.shape[-2:]), dtype=complex)
    norms0 = np.linalg.norm(psi, axis=-2)

    h1 = np.zeros(batch + (dim, dim), dtype=complex)
    h2 = np.zeros_like(h1)
    h3 = np.zeros_like(h1)
    sampled_times: list[float] = []
    sampled_states: list[NDArray] = []
    stride = config.sample_stride
    if stride:
        sampled_times.append(0.0)
        sampled_states.append(psi.copy())

    t_offset = 0.0
    global_step = 0
    for grid in grids:
        h = grid.h
        for i in range(grid.n_steps):
            k0 = 2 * i
            _assemble_into(h1, model.static, model.terms, grid.coeffs, k0)
            _assemble_into(h2, model.static, model.terms, grid.coeffs, k0 + 1)
            _assemble_into(h3, model.static, model.terms, grid.coeffs, k0 + 2)
            kern = (h / 6.0) * (h1 + 4.0 * h2 + h3)
            kern += (-1j * h * h / 12.0) * (h3 @ h1 - h1 @ h3)
            w, v = np.linalg.eigh(kern)
            phase = np.exp(-1j * w)
            u = (v * phase[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)
            psi = u @ psi
            global_step += 1
            if stride and global_step % stride == 0:
                sampled_times.append(t_offset + (i + 1) * h)
                sampled_states.append(psi.copy())
        t_offset += grid.n_steps * h
        drift = float(np.max(np.abs(np.linalg.norm(psi, axis=-2) - norms0)))
        if drift > config.norm_tol:
            raise IntegrationError(
                f"norm drift {drift:.3e} exceeds {config.norm_tol:.1e}; reduce the step"
            )

    if stride and sampled_times[-1] != t_offset:
        sampled_times.append(t_offset)
        sampled_states.append(psi.copy())
    final = psi[..., 0] if was_vector else psi
    states = None
    if stride:
        stacked = np.stack(sampled_states)
        states = stacked[..., 0] if was_vector else stacked
    drift = float(np.max(np.abs(np.linalg.norm(psi, axis=-2) - norms0)))
    return UnitaryResult(
        times=np.asarray(sampled_times), states=states, final=final, norm_drift=drift
    )


def propagate_lindblad(
    model: HamiltonianModel,
    grids: list[SegmentGrid] | tuple[SegmentGrid, ...],
    rho0,
    dissipator: Dissipator,
    config: IntegratorConfig = IntegratorConfig(),
) -> LindbladResult:
    """Integrate drho/dt = i[rho, H] + sum_c (c rho c^dag - {c^dag c, rho}/2).

    ``rho0`` may carry leading batch axes matching (or broadcast against)
    the model's structure matrices.  The state is re-Hermitized every step;
    trace drift is checked at segment boundaries and the spectrum of the
    final state must stay above the positivity floor.
    """
    dim = model.dim
    rho = np.asarray(rho0, dtype=complex)
    if rho.shape[-2:] != (dim, dim):
        raise ValueError(f"rho shape {rho.shape} incompatible with dimension {dim}")
    batch = np.broadcast_shapes(model.batch_shape()[:-2], rho.shape[:-2])
    rho = np.array(np.broadcast_to(rho, batch + (dim, dim)), dtype=complex)
    traces0 = np.real(np.trace(rho, axis1=-2, axis2=-1))

    loss = 0.5 * (dissipator.decay[:, None] + dissipator.decay[None, :])
    hbuf = np.zeros(batch + (dim, dim), dtype=complex)

    def rhs(state: NDArray) -> NDArray:
        a = state @ hbuf
        out = 1j * (a - a.conj().swapaxes(-1, -2))
        out -= loss * state
        dissipator.apply_gain(state, out)
        return out

    sampled_times: list[float] = []
    sampled_rhos: list[NDArray] = []
    stride = config.sample_stride
    if stride:
        sampled_times.append(0.0)
        sampled_rhos.append(rho.copy())

    t_offset = 0.0
    global_step = 0
    for grid in grids:
        h = grid.h
        for i in range(grid.n_steps):
            k0 = 2 * i
            _assemble_into(hbuf, model.static, model.terms, grid.coeffs, k0)
            d1 = rhs(rho)
            _assemble_into(hbuf, model.static, model.terms, grid.coeffs, k0 + 1)
            d2 = rhs(rho + (0.5 * h) * d1)
            d3 = rhs(rho + (0.5 * h) * d2)
            _assemble_into(hbuf, model.static, model.terms, grid.coeffs, k0 + 2)
            d4 = rhs(rho + h * d3)
            rho += (h / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4)
            np.add(rho, rho.conj().swapaxes(-1, -2), out=rho)
            rho *= 0.5
            global_step += 1
            if stride and global_step % stride == 0:
                sampled_times.append(t_offset + (i + 1) * h)
                sampled_rhos.append(rho.copy())
        t_offset += grid.n_steps * h
        drift = float(np.max(np.abs(np.real(np.trace(rho, axis1=-2, axis2=-1)) - traces0)))
        if drift > config.norm_tol:
            raise IntegrationError(
                f"trace drift {drift:.3e} exceeds {config.norm_tol:.1e}; reduce the step"
            )

    if stride and sampled_times[-1] != t_offset:
        sampled_times.append(t_offset)
        sampled_rhos.append(rho.copy())
    min_eig = float(np.min(np.linalg.eigvalsh(rho)))
    if min_eig < config.positivity_floor:
        raise IntegrationError(
            f"final state eigenvalue {min_eig:.3e} below {config.positivity_floor:.1e}"
        )
    drift = float(np.max(np.abs(np.real(np.trace(rho, axis1=-2, axis2=-1)) - traces0)))
    return LindbladResult(
        times=np.asarray(sampled_times),
        rhos=np.stack(sampled_rhos) if stride else None,
        final=rho,
        trace_drift=drift,
        min_eigenvalue=min_eig,
    )


def accumulated_phase(amplitudes, amp_tol: float = 1e-6) -> tuple[NDArray[np.float64], bool]:
    """Branch-tracked phase series of a complex amplitude trajectory.

    Consecutive phases are continued onto the nearest branch (differences
    kept inside (-pi, pi]).  Samples whose magnitude falls below
    ``amp_tol`` carry the previous phase forward; the returned flag marks
    whether any sample was skipped that way.
    """
    amplitudes = np.asarray(amplitudes, dtype=complex)
    if amplitudes.ndim != 1 or amplitudes.size == 0:
        raise ValueError("expected a non-empty 1-d amplitude series")
    valid = np.abs(amplitudes) >= amp_tol
    if not valid[0]:
        raise ValueError("phase undefined: initial amplitude below tolerance")
    raw = np.angle(amplitudes)
    phases = np.empty_like(raw)
    phases[0] = raw[0]
    for k in range(1, len(raw)):
        if not valid[k]:
            phases[k] = phases[k - 1]
            continue
        jump = raw[k] - phases[k - 1]
        phases[k] = phases[k - 1] + np.mod(jump + np.pi, 2.0 * np.pi) - np.pi
    return phases, bool(np.any(~valid))


def adiabatic_min_overlap(states, hamiltonians, reselect_at=()) -> float:
    """min_t |<E(t)|I(t)>|^2 for a trajectory against a followed 2x2 eigenbranch.

    ``states`` is (S, 2) sampled dynamics, ``hamiltonians`` (S, 2, 2) the
    instantaneous Hamiltonians.  The branch starts at the eigenstate
    closest to the initial state and is continued by eigenvector overlap;
    at sample indices listed in ``reselect_at`` (segment boundaries,
    where the drive jumps) the branch re-locks to the current state.
    """
    from .linalg import eigensystem_2x2

    states = np.asarray(states, dtype=complex)
    hams = np.asarray(hamiltonians, dtype=complex)
    if states.shape[0] != hams.shape[0]:
        raise ValueError("states and hamiltonians must share the sample axis")
    reselect = set(int(i) for i in reselect_at)
    min_overlap = 1.0
    prev_vec = None
    for k in range(states.shape[0]):
        _, vecs = eigensystem_2x2(hams[k])
        psi = states[k]
        norm = np.linalg.norm(psi)
        if norm < 1e-12:
            raise ValueError("trajectory sample has vanishing norm")
        psi = psi / norm
        if prev_vec is None or k in reselect:
            branch = int(np.argmax(np.abs(vecs.conj().T @ psi)))
        else:
            branch = int(np.argmax(np.abs(vecs.conj().T @ prev_vec)))
        vec = vecs[:, branch]
        prev_vec = vec
        min_overlap = min(min_overlap, float(np.abs(np.vdot(vec, psi)) ** 2))
    return min_overlap
