"""Small dense complex linear algebra for two-atom state spaces.

Everything here operates on plain ``numpy.ndarray`` values (complex128).
State vectors are 1-d arrays, operators and density matrices are square
2-d arrays; the largest space used by the simulator is 25-dimensional
(two five-level atoms), so no sparse or structured representations are
needed.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

ComplexMatrix = NDArray[np.complex128]
StateVector = NDArray[np.complex128]
DensityMatrix = NDArray[np.complex128]

HERMITICITY_TOL = 1e-10


def as_complex(a) -> ComplexMatrix:
    """Return ``a`` as a C-contiguous complex128 array."""
    return np.ascontiguousarray(a, dtype=np.complex128)


def kron(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """Kronecker product with the left factor on the most-significant index.

    ``kron(A, B)[i*q + k, j*q + l] == A[i, j] * B[k, l]`` for B of size q.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("kron expects 2-d operands")
    return np.kron(a, b)


def dagger(a: ComplexMatrix) -> ComplexMatrix:
    return a.conj().T


def is_hermitian(a: ComplexMatrix, tol: float = HERMITICITY_TOL) -> bool:
    a = np.asarray(a)
    scale = max(1.0, float(np.abs(a).max()) if a.size else 1.0)
    return bool(np.abs(a - a.conj().T).max() <= tol * scale)


def eigensystem_2x2(h: ComplexMatrix) -> tuple[NDArray[np.float64], ComplexMatrix]:
    """Eigenvalues and eigenvectors of a 2x2 Hermitian matrix, closed form.

    Returns ``(w, v)`` with ``w`` ascending and ``v[:, k]`` the orthonormal
    eigenvector for ``w[k]`` satisfying ``h @ v[:, k] == w[k] * v[:, k]``
    to 1e-10 (relative to the matrix scale).

    Raises
    ------
    ValueError
        If ``h`` is not 2x2 or not Hermitian within tolerance.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {h.shape}")
    if not is_hermitian(h):
        raise ValueError("matrix is not Hermitian")

    a = h[0, 0].real
    b = h[1, 1].real
    c = h[0, 1]
    mean = 0.5 * (a + b)
    half_gap = 0.5 * (a - b)
    r = np.hypot(half_gap, abs(c))
    w = np.array([mean - r, mean + r])

    if r == 0.0:
        v = np.eye(2, dtype=np.complex128)
        return w, v

    # Eigenvector of the larger eigenvalue: (c, w_hi - a), with the stabler
    # branch picked when c ~ 0.
    if abs(c) > 1e-14 * max(1.0, r):
        v_hi = np.array([c, w[1] - a], dtype=np.complex128)
    elif a >= b:
        v_hi = np.array([1.0, 0.0], dtype=np.complex128)
    else:
        v_hi = np.array([0.0, 1.0], dtype=np.complex128)
    v_hi = v_hi / np.linalg.norm(v_hi)
    # Orthogonal partner for the smaller eigenvalue.
    v_lo = np.array([-np.conj(v_hi[1]), np.conj(v_hi[0])], dtype=np.complex128)
    v = np.column_stack([v_lo, v_hi])
    return w, v


def expectation(op: ComplexMatrix, rho: DensityMatrix) -> float:
    """Real part of tr(op @ rho) for a Hermitian observable."""
    return float(np.einsum("ij,ji->", op, rho).real)


def projector(psi: StateVector) -> DensityMatrix:
    psi = np.asarray(psi, dtype=np.complex128)
    return np.outer(psi, psi.conj())


def check_density(rho: DensityMatrix, *, trace_tol: float = 1e-7,
                  eig_floor: float = -1e-6) -> None:
    """Validate Hermiticity, unit trace, and approximate positivity.

    Raises ``ValueError`` naming the violated property.
    """
    rho = np.asarray(rho)
    if not is_hermitian(rho, tol=1e-8):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {tr} deviates from 1 by more than {trace_tol}")
    lo = float(np.linalg.eigvalsh(rho).min())
    if lo < eig_floor:
        raise ValueError(f"density matrix has eigenvalue {lo} below {eig_floor}")
