import numpy as np

from ..errors import DimensionError


def min_eig(M) -> float:
    """Smallest eigenvalue of the symmetric part of ``M``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"min_eig needs a square matrix, got shape {M.shape}")
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])


def max_eig(M) -> float:
    return -min_eig(-np.asarray(M, dtype=float))


def null_space_basis(A, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of ker(A) from the SVD.

    Singular values at or below ``tol * max(1, sigma_max)`` count as zero.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    rows, cols = A.shape
    if rows == 0 or cols == 0:
        return np.eye(cols)
    _, sv, vt = np.linalg.svd(A)
    cutoff = tol * max(1.0, sv[0] if sv.size else 0.0)
    rank = int(np.sum(sv > cutoff))
    return vt[rank:].T.copy()


def numerical_rank(A, rtol: float = 1e-8) -> tuple:
    """Rank with a threshold relative to the largest singular value.

    Returns ``(rank, singular_values)``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0, np.zeros(0)
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[0] == 0.0:
        return 0, sv
    return int(np.sum(sv > rtol * sv[0])), sv


def sym(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    return 0.5 * (M + M.T)
