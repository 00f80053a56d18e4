"""Dense complex linear algebra used by every other module.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``.
The helpers here validate shapes and finiteness once, return read-only
arrays, and attach the accuracy rules (rank tolerance, singularity test)
that the rest of the package relies on.
"""
from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .errors import MatrixOverflow, Singular

EPS = np.finfo(np.float64).eps


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def as_matrix(data, name: str = "matrix") -> np.ndarray:
    """Return `data` as a read-only 2-D complex128 array.

    Scalars become 1x1 and 1-D input becomes a single row. Raises
    ``ValueError`` on NaN/Inf entries.
    """
    arr = np.array(data, dtype=np.complex128, copy=True)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    elif arr.ndim != 2:
        raise ValueError(f"{name}: expected a 2-D array, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name}: entries must be finite")
    return _freeze(arr)


def as_vector(data, name: str = "vector") -> np.ndarray:
    arr = np.array(data, dtype=np.complex128, copy=True).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name}: entries must be finite")
    return _freeze(arr)


def default_rank_tol(matrix: np.ndarray, sigma_max: float) -> float:
    """Absolute cut-off ``max(rows, cols) * eps * sigma_max``."""
    return max(matrix.shape) * EPS * sigma_max


def solve_linear(matrix, rhs) -> np.ndarray:
    """Solve ``matrix @ x = rhs`` by LU with partial pivoting.

    `rhs` may be a vector or a matrix of right-hand sides. Raises
    :class:`Singular` when a pivot falls below ``n * eps * max|U|``.
    """
    a = np.asarray(matrix, dtype=np.complex128)
    b = np.asarray(rhs, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"solve_linear: matrix must be square, got {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ValueError(
            f"solve_linear: rhs has {b.shape[0]} rows, matrix has {a.shape[0]}"
        )
    n = a.shape[0]
    if n == 0:
        return np.zeros_like(b)
    with warnings.catch_warnings():
        # exact zero pivots are reported below as Singular
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    scale = np.max(np.abs(lu))
    if scale == 0.0 or pivots.min() <= n * EPS * scale:
        raise Singular(f"matrix of order {n} is singular to working precision")
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def pseudo_inverse(matrix, rank_tol: float = 0.0) -> np.ndarray:
    """Moore-Penrose pseudoinverse via the SVD.

    Singular values below ``rank_tol * sigma_max`` are discarded. With
    ``rank_tol == 0`` the default cut-off of :func:`default_rank_tol` is
    used instead.
    """
    if rank_tol < 0:
        raise ValueError("rank_tol must be nonnegative")
    a = np.asarray(matrix, dtype=np.complex128)
    rows, cols = a.shape
    if a.size == 0:
        return np.zeros((cols, rows), dtype=np.complex128)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((cols, rows), dtype=np.complex128)
    cutoff = rank_tol * s[0] if rank_tol > 0 else default_rank_tol(a, s[0])
    keep = s > cutoff
    inv_s = np.zeros_like(s)
    inv_s[keep] = 1.0 / s[keep]
    return (vh.conj().T * inv_s) @ u.conj().T


def matrix_exponential(matrix, t: float = 1.0) -> np.ndarray:
    """``expm(matrix * t)`` (scaling and squaring with a Pade core)."""
    a = np.asarray(matrix, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix_exponential: matrix must be square, got {a.shape}")
    with np.errstate(over="ignore", invalid="ignore"):
        out = scipy.linalg.expm(a * t)
    if not np.all(np.isfinite(out)):
        raise MatrixOverflow("matrix exponential overflowed")
    return out


def min_singular_value(matrix) -> float:
    a = np.asarray(matrix, dtype=np.complex128)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def orth_range(matrix) -> np.ndarray:
    """Orthonormal basis (as columns) for the range of `matrix`."""
    a = np.asarray(matrix, dtype=np.complex128)
    u, s, _ = np.linalg.svd(a, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[0], 0), dtype=np.complex128)
    rank = int(np.sum(s > default_rank_tol(a, s[0])))
    return u[:, :rank]


def orth_null(matrix) -> np.ndarray:
    """Orthonormal basis (as columns) for the kernel of `matrix`."""
    a = np.asarray(matrix, dtype=np.complex128)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    rank = 0
    if s.size and s[0] > 0.0:
        rank = int(np.sum(s > default_rank_tol(a, s[0])))
    return vh[rank:].conj().T


def op_norm(matrix) -> float:
    a = np.asarray(matrix)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))
