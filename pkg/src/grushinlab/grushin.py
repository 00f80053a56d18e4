"""Grushin problems: bordered block matrices and their inverses.

A Grushin problem for an ``n x n`` operator ``P`` borders it with a column
coupling ``R_-`` (``n x m``), a row coupling ``R_+`` (``m' x n``) and a
corner block (``m' x m``)::

    [[P,   R_-   ],
     [R_+, corner]]

When this matrix is invertible its inverse is split into the blocks
``E, E_+, E_-, E_-+``. The lower-right block ``E_-+`` is the effective
Hamiltonian: ``P`` is invertible exactly when ``E_-+`` is, and then
``P^{-1} = E - E_+ E_-+^{-1} E_-``.

The inverse is always obtained from one dense solve of the assembled
matrix, never from the Schur-complement formulas, so those formulas can be
checked against it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import as_matrix, default_rank_tol, solve_linear
from .errors import DimensionMismatch, EffectiveHamiltonianSingular, IllPosed, Singular

__all__ = [
    "GrushinProblem",
    "GrushinInverse",
    "assemble",
    "invert_grushin",
    "effective_hamiltonian",
    "recover_inverse",
]


@dataclass(frozen=True)
class GrushinProblem:
    p: np.ndarray
    r_minus: np.ndarray
    r_plus: np.ndarray
    corner: np.ndarray
    matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.p.shape[0]
        if self.p.shape != (n, n):
            raise DimensionMismatch(f"P must be square, got {self.p.shape}")
        if self.r_minus.shape[0] != n:
            raise DimensionMismatch(
                f"R_- has {self.r_minus.shape[0]} rows, expected {n}"
            )
        if self.r_plus.shape[1] != n:
            raise DimensionMismatch(
                f"R_+ has {self.r_plus.shape[1]} columns, expected {n}"
            )
        expected = (self.r_plus.shape[0], self.r_minus.shape[1])
        if self.corner.shape != expected:
            raise DimensionMismatch(
                f"corner has shape {self.corner.shape}, expected {expected}"
            )
        block = np.block([[self.p, self.r_minus], [self.r_plus, self.corner]])
        block.flags.writeable = False
        object.__setattr__(self, "matrix", block)

    @property
    def n(self) -> int:
        return self.p.shape[0]

    @property
    def m(self) -> int:
        """Dimension of the auxiliary input space (columns of R_-)."""
        return self.r_minus.shape[1]

    @property
    def m_prime(self) -> int:
        """Dimension of the auxiliary output space (rows of R_+)."""
        return self.r_plus.shape[0]

    @property
    def index(self) -> int:
        return self.m - self.m_prime


@dataclass(frozen=True)
class GrushinInverse:
    e: np.ndarray
    e_plus: np.ndarray
    e_minus: np.ndarray
    e_minus_plus: np.ndarray

    def as_matrix(self) -> np.ndarray:
        return np.block([[self.e, self.e_plus], [self.e_minus, self.e_minus_plus]])


def assemble(p, r_minus, r_plus, corner=None) -> GrushinProblem:
    """Build a :class:`GrushinProblem`; `corner` defaults to zero."""
    p = as_matrix(p, "p")
    r_minus = as_matrix(r_minus, "r_minus")
    r_plus = as_matrix(r_plus, "r_plus")
    if corner is None:
        corner = np.zeros((r_plus.shape[0], r_minus.shape[1]))
    corner = as_matrix(corner, "corner")
    return GrushinProblem(p, r_minus, r_plus, corner)


def invert_grushin(problem: GrushinProblem) -> GrushinInverse:
    """Invert the assembled matrix and split the inverse into blocks.

    Only index-zero problems (``m == m'``) are inverted. Raises
    :class:`IllPosed` when the smallest singular value of the assembled
    matrix is below ``(n + m) * eps * sigma_max``.
    """
    if problem.m != problem.m_prime:
        raise DimensionMismatch(
            f"only square Grushin problems can be inverted (m={problem.m}, "
            f"m'={problem.m_prime})"
        )
    a = problem.matrix
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0 or s[-1] <= default_rank_tol(a, s[0]):
        raise IllPosed(
            f"Grushin matrix is singular (sigma_min={s[-1]:.3e}, sigma_max={s[0]:.3e})"
        )
    try:
        inv = solve_linear(a, np.eye(a.shape[0]))
    except Singular as exc:
        raise IllPosed(str(exc)) from exc
    n = problem.n
    return GrushinInverse(
        e=inv[:n, :n],
        e_plus=inv[:n, n:],
        e_minus=inv[n:, :n],
        e_minus_plus=inv[n:, n:],
    )


def effective_hamiltonian(problem: GrushinProblem) -> np.ndarray:
    return invert_grushin(problem).e_minus_plus


def recover_inverse(inverse: GrushinInverse) -> np.ndarray:
    """Return ``E - E_+ E_-+^{-1} E_-``, which equals ``P^{-1}``."""
    try:
        x = solve_linear(inverse.e_minus_plus, inverse.e_minus)
    except Singular as exc:
        raise EffectiveHamiltonianSingular(
            "effective Hamiltonian is singular; the spectral parameter is an "
            "eigenvalue of the generator"
        ) from exc
    return inverse.e - inverse.e_plus @ x
