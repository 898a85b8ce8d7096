"""Exact decomposition of the two-atom space around the blockaded transition.

The 25-dim product space splits as 9 + 16: tensor products of {|0>, |1>, |r>}
span the block that carries the controlled-phase dynamics, while states
involving |g> or |p> stay decoupled (exactly for dipole excitation,
after adiabatic elimination for quadrupole).  Inside the 9-dim block a
permutation and a rotation of {|1r>, |r1>} to {|+>, |->} isolate the
driven two-level pair {|11>, |+>}:

    9 = 1 + 2 + 2 + 4 -> span{|11>, |+>} + span{|->} + span{|rr>} + ...

The whole map is one real operator R = pi2 Q P2 pi1 P1; conjugation by R
(here called the conjugating channel) sends a blockaded two-atom
Hamiltonian to its effective 2x2 block padded with zeros.  The synthesis
code inverts pulse coefficients analytically; this module exists to
verify that algebra and to name subspace indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .atom import DIM_1, DIM_2, LEVEL_0, LEVEL_1, LEVEL_R, pair_index
from .linalg import ComplexMatrix

RealMatrix = NDArray[np.float64]

#: kron-ordered pair labels over {0, 1, r} spanning the 9-dim block
_CZ_PAIRS = [(a, b) for a in (LEVEL_0, LEVEL_1, LEVEL_R) for b in (LEVEL_0, LEVEL_1, LEVEL_R)]

#: reordering of the 9-dim block into sectors: 4-dim {11,1r,r1,rr} first,
#: then {01,0r}, {10,r0} and the dark singleton {00}
_SECTOR_ORDER = [
    (LEVEL_1, LEVEL_1), (LEVEL_1, LEVEL_R), (LEVEL_R, LEVEL_1), (LEVEL_R, LEVEL_R),
    (LEVEL_0, LEVEL_1), (LEVEL_0, LEVEL_R),
    (LEVEL_1, LEVEL_0), (LEVEL_R, LEVEL_0),
    (LEVEL_0, LEVEL_0),
]

#: labels of the transformed frame, in order
FRAME_LABELS = ("11", "+", "rr", "-", "01", "0r", "10", "r0", "00")


@dataclass(frozen=True)
class ReductionOperator:
    """R = pi2 Q P2 pi1 P1 with its factors; all real 25x25."""

    r: RealMatrix
    p1: RealMatrix
    pi1: RealMatrix
    p2: RealMatrix
    q: RealMatrix
    pi2: RealMatrix
    labels: dict[str, int]


def _permutation(order: list[int]) -> RealMatrix:
    p = np.zeros((DIM_2, DIM_2))
    for new, old in enumerate(order):
        p[new, old] = 1.0
    return p


def build_reduction() -> ReductionOperator:
    """Construct the reduction operator and its factors."""
    cz_indices = [pair_index(a, b) for a, b in _CZ_PAIRS]
    rest = [i for i in range(DIM_2) if i not in cz_indices]
    p1 = _permutation(cz_indices + rest)

    pi1 = np.zeros((DIM_2, DIM_2))
    pi1[:9, :9] = np.eye(9)

    order9 = [_CZ_PAIRS.index(pair) for pair in _SECTOR_ORDER]
    p2 = _permutation(order9 + list(range(9, DIM_2)))

    q = np.eye(DIM_2)
    s = 1.0 / np.sqrt(2.0)
    # rotate {|1r>, |r1>} (positions 1, 2 after p2) to {|+>, |->}; |rr> moves to slot 2
    q[1, 1], q[1, 2], q[1, 3] = s, s, 0.0
    q[2, 1], q[2, 2], q[2, 3] = 0.0, 0.0, 1.0
    q[3, 1], q[3, 2], q[3, 3] = s, -s, 0.0

    pi2 = np.zeros((DIM_2, DIM_2))
    pi2[0, 0] = pi2[1, 1] = 1.0

    r = pi2 @ q @ p2 @ pi1 @ p1
    labels = {lab: k for k, lab in enumerate(FRAME_LABELS)}
    return ReductionOperator(r=r, p1=p1, pi1=pi1, p2=p2, q=q, pi2=pi2, labels=labels)


def apply_channel(op: RealMatrix, h25: ComplexMatrix) -> ComplexMatrix:
    """Conjugating channel: op @ h25 @ op^T."""
    return op @ h25 @ op.T


def project_effective(red: ReductionOperator, h25: ComplexMatrix) -> ComplexMatrix:
    """Top-left 2x2 block of C_R(h25), acting on span{|11>, |+>}."""
    return apply_channel(red.r, h25)[:2, :2]


def lift_effective(red: ReductionOperator, h2: ComplexMatrix) -> ComplexMatrix:
    """Embed a 2x2 Hamiltonian on span{|11>, |+>} back into the 25-dim frame."""
    if h2.shape != (2, 2):
        raise ValueError("lift expects a 2x2 matrix")
    padded = np.zeros((DIM_2, DIM_2), dtype=complex)
    padded[:2, :2] = h2
    return red.r.T @ padded @ red.r


def frame_vector(red: ReductionOperator, label: str) -> NDArray[np.complex128]:
    """25-dim state vector for a transformed-frame label such as "+" or "11".

    The frame basis is (Q P2 pi1 P1)^T applied to unit vectors, so labels
    map to physical superpositions (|+> = (|1r> + |r1>)/sqrt(2)).
    """
    k = red.labels[label]
    e = np.zeros(DIM_2)
    e[k] = 1.0
    return (red.q @ red.p2 @ red.pi1 @ red.p1).T @ e.astype(complex)


def eliminate_intermediate(h5: ComplexMatrix, level: int, span: tuple[int, int]) -> ComplexMatrix:
    """Second-order (Schur) elimination of one far-detuned level.

    Returns the 2x2 effective Hamiltonian on ``span`` after removing
    ``level``: H_eff = H_PP - H_PQ H_QQ^{-1} H_QP evaluated at zero energy.
    Used to cross-check the closed-form two-photon coefficients.
    """
    p = list(span)
    h_pp = h5[np.ix_(p, p)]
    h_pq = h5[np.ix_(p, [level])]
    h_qq = h5[level, level]
    if abs(h_qq) < 1e-12:
        raise ValueError("eliminated level must be far detuned")
    return h_pp - (h_pq @ h_pq.conj().T) / h_qq
