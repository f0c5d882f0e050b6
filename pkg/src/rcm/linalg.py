"""Small dense linear algebra helpers (symmetric eigensystems, PSD roots, SPD solves)."""

import numpy as np
import scipy.linalg

from .errors import InvalidMatrix, NotPSD, NotSPD

SYM_RTOL = 1e-12
PSD_CLAMP = 1e-10
SPD_MIN_EIG = 1e-12


def _as_symmetric(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidMatrix("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    if A.size and np.max(np.abs(A - A.T)) > SYM_RTOL * scale:
        raise InvalidMatrix("matrix is not symmetric")
    return 0.5 * (A + A.T)


def sym_eig(A):
    """Eigendecomposition ``A = V diag(lam) V^T`` with ascending eigenvalues."""
    A = _as_symmetric(A)
    lam, V = np.linalg.eigh(A)
    return lam, V


def psd_sqrt(A):
    """Symmetric PSD square root.

    Eigenvalues in ``[-1e-10, 0)`` are treated as round-off and clamped to zero;
    anything more negative raises :class:`NotPSD`.
    """
    lam, V = sym_eig(A)
    if lam.size and lam[0] < -PSD_CLAMP:
        raise NotPSD(f"smallest eigenvalue {lam[0]:.3e} is negative")
    root = np.sqrt(np.clip(lam, 0.0, None))
    S = (V * root) @ V.T
    return 0.5 * (S + S.T)


def solve_spd(A, b):
    """Solve ``A x = b`` for symmetric positive definite ``A``."""
    A = _as_symmetric(A)
    b = np.asarray(b, dtype=float)
    if b.shape[0] != A.shape[0]:
        raise InvalidMatrix(f"rhs length {b.shape[0]} does not match matrix size {A.shape[0]}")
    if np.linalg.eigvalsh(A)[0] <= SPD_MIN_EIG:
        raise NotSPD("matrix is singular or indefinite")
    try:
        factor = scipy.linalg.cho_factor(A)
    except np.linalg.LinAlgError as exc:
        raise NotSPD(str(exc)) from exc
    return scipy.linalg.cho_solve(factor, b)


def orthonormal_complement(u):
    """Columns spanning the orthogonal complement of the nonzero vector ``u``.

    Returns a ``(d, d-1)`` matrix ``N`` with ``N.T @ N = I`` and ``N.T @ u = 0``.
    """
    u = np.asarray(u, dtype=float)
    d = u.shape[0]
    if d == 1:
        return np.zeros((1, 0))
    # full QR of [u | I]: the trailing columns of Q span u's complement
    Q, _ = np.linalg.qr(np.column_stack([u, np.eye(d)]), mode="complete")
    return Q[:, 1:d]
