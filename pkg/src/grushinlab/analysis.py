"""Observability and controllability quantified.

* :func:`gramian` computes finite-horizon Gramians with Van Loan's
  augmented exponential.
* :func:`hautus_margin` sweeps ``sigma_min([i w I - A; C])**2`` over a
  frequency grid.
* :func:`certified_bound` turns the projection / right-inverse argument for
  ``[[lam - A, B], [B*, 0]]`` into an explicit lower bound on
  ``sigma_min**2`` of that matrix.
* :func:`weighted_hautus` repeats the sweep with a modally reweighted state
  norm.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    default_rank_tol,
    matrix_exponential,
    min_singular_value,
    op_norm,
    orth_null,
    orth_range,
    pseudo_inverse,
)
from .errors import EmptyGrid, HypothesisViolated, NonDiagonalizable
from .lti import StateSpaceSystem

__all__ = [
    "HautusReport",
    "CertifiedBound",
    "gramian",
    "hautus_margin",
    "weighted_hautus",
    "certified_bound",
    "default_observation_time",
]


@dataclass(frozen=True)
class HautusReport:
    grid: np.ndarray
    per_freq_margin: np.ndarray
    margin: float
    argmin_freq: float
    near_eigenfrequency: bool | None = None


@dataclass(frozen=True)
class CertifiedBound:
    certified_constant: float
    true_constant: float
    right_inverse_norm: float
    restricted_norm: float
    hypothesis_ok: bool
    complement_norm: float = 0.0
    compression_lower: float = np.inf

    @property
    def gap(self) -> float:
        return self.true_constant - self.certified_constant


def gramian(system: StateSpaceSystem, kind: str, t_end: float) -> np.ndarray:
    """Finite-horizon Gramian on ``[0, t_end]``.

    ``kind="controllability"``: ``int e^{At} B B* e^{A*t} dt``.
    ``kind="observability"``: ``int e^{A*t} C* C e^{At} dt``.

    With ``M = [[-F, Q], [0, F*]]`` and ``expm(M T) = [[., X], [0, Y]]`` the
    integral ``int e^{Ft} Q e^{F*t} dt`` equals ``Y* X``.
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if kind == "controllability":
        f, q = system.a, system.b @ system.b.conj().T
    elif kind == "observability":
        f, q = system.a.conj().T, system.c.conj().T @ system.c
    else:
        raise ValueError(f"unknown Gramian kind {kind!r}")
    n = f.shape[0]
    aug = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    aug[:n, :n] = -f
    aug[:n, n:] = q
    aug[n:, n:] = f.conj().T
    big = matrix_exponential(aug, t_end)
    w = big[n:, n:].conj().T @ big[:n, n:]
    return 0.5 * (w + w.conj().T)


def default_observation_time(system: StateSpaceSystem) -> float:
    """``2 pi / gap``, with ``gap`` the smallest distance between eigenvalues.

    Falls back to ``2 pi`` for a single (or fully repeated) eigenvalue.
    """
    eig = np.linalg.eigvals(system.a)
    if eig.size < 2:
        return 2 * np.pi
    dist = np.abs(eig[:, None] - eig[None, :])
    dist = dist[~np.eye(eig.size, dtype=bool)]
    dist = dist[dist > 1e-12]
    return 2 * np.pi / dist.min() if dist.size else 2 * np.pi


def _frequency_grid(system: StateSpaceSystem, omega_grid, refine: bool) -> np.ndarray:
    grid = np.asarray(omega_grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise EmptyGrid("frequency grid is empty")
    if refine:
        freqs = np.linalg.eigvals(system.a).imag
        inside = freqs[(freqs >= grid.min()) & (freqs <= grid.max())]
        grid = np.concatenate([grid, inside])
    return np.unique(grid)


def _sweep(a: np.ndarray, c: np.ndarray, grid: np.ndarray, right=None) -> np.ndarray:
    n = a.shape[0]
    stacked = np.empty((grid.size, n + c.shape[0], n), dtype=np.complex128)
    eye = np.eye(n)
    for j, w in enumerate(grid):
        stacked[j, :n] = 1j * w * eye - a
        stacked[j, n:] = c
    if right is not None:
        stacked = stacked @ right
    s = np.linalg.svd(stacked, compute_uv=False)
    return s[:, -1] ** 2


def _report(system: StateSpaceSystem, grid: np.ndarray, values: np.ndarray) -> HautusReport:
    j = int(np.argmin(values))
    near = None
    if system.skew_adjoint:
        freqs = np.linalg.eigvals(system.a).imag
        step = np.max(np.diff(grid)) if grid.size > 1 else 0.0
        near = bool(np.min(np.abs(freqs - grid[j])) <= step)
    return HautusReport(
        grid=grid,
        per_freq_margin=values,
        margin=float(values[j]),
        argmin_freq=float(grid[j]),
        near_eigenfrequency=near,
    )


def hautus_margin(system: StateSpaceSystem, omega_grid, refine: bool = True) -> HautusReport:
    """Frequency sweep of ``sigma_min([i w I - A; C])**2``.

    With ``refine`` the imaginary parts of the eigenvalues of ``A`` that
    fall inside the grid's range are added to it, since that is where the
    minima of a skew-adjoint generator sit.
    """
    grid = _frequency_grid(system, omega_grid, refine)
    return _report(system, grid, _sweep(system.a, system.c, grid))


def weighted_hautus(
    system: StateSpaceSystem, weights, omega_grid, refine: bool = True
) -> HautusReport:
    """Hautus sweep with the state norm ``||V diag(w)^{-1/2} V^{-1} z||``.

    ``V`` holds the eigenvectors of ``A`` (columns), so for normal ``A``
    this is ``sum |a_n|^2 / w_n`` over the modal coefficients ``a_n``.
    Writing ``z = T b`` with ``T = V diag(sqrt w) V^{-1}`` the margin is
    ``sigma_min([(i w - A) T; C T])**2``; unit weights give back
    :func:`hautus_margin` exactly.
    """
    w = np.asarray(weights, dtype=float).reshape(-1)
    n = system.n_states
    if w.size != n:
        raise ValueError(f"need {n} weights, got {w.size}")
    if np.any(~np.isfinite(w)) or np.any(w <= 0):
        raise ValueError("weights must be strictly positive")
    grid = _frequency_grid(system, omega_grid, refine)
    if np.all(w == 1.0):
        return _report(system, grid, _sweep(system.a, system.c, grid))
    eig, vecs = np.linalg.eig(system.a)
    cond = np.linalg.cond(vecs)
    if not np.isfinite(cond) or cond > 1e8:
        raise NonDiagonalizable(f"eigenvector matrix has condition number {cond:.3e}")
    t = (vecs * np.sqrt(w)) @ np.linalg.inv(vecs)
    return _report(system, grid, _sweep(system.a, system.c, grid, right=t))


def certified_bound(system: StateSpaceSystem, lam: complex) -> CertifiedBound:
    """Explicit lower bound for ``sigma_min([[lam - A, B], [B*, 0]])**2``.

    Write ``P = lam - A``, let ``Pi`` project onto ``Im B`` and
    ``P_+ = pinv(B*)``. For ``(P u + B u_-, B* u) = (v, v_+)``:

    * ``Pi u = P_+ v_+``, so ``||Pi u|| <= p ||v_+||`` with ``p = ||P_+||``;
    * ``(I - Pi) v = (I - Pi) P (I - Pi) u + (I - Pi) P Pi u``, so
      ``||(I - Pi) u|| <= (||v|| + r p ||v_+||) / g`` where ``r = ||P Pi||``
      and ``g`` is the smallest singular value of ``P`` compressed to
      ``ker B*``;
    * ``u_- = pinv(B) (v - P Pi u - P (I - Pi) u)``, so
      ``||u_-|| <= p (||v|| + r p ||v_+|| + s ||(I - Pi) u||)`` with
      ``s = ||P (I - Pi)||``.

    Stacking the three estimates as ``M @ (||v||, ||v_+||)`` gives
    ``||u||^2 + ||u_-||^2 <= ||M||^2 (||v||^2 + ||v_+||^2)`` and the
    certified constant is ``1 / ||M||^2``.
    """
    b = system.b
    if not system.is_collocated(tol=1e-12 * max(op_norm(b), 1.0)):
        raise ValueError("certified_bound requires C = B*")
    n, m = b.shape
    b_star = b.conj().T
    s = np.linalg.svd(b_star, compute_uv=False)
    surjective = bool(s.size and s[0] > 0 and s[-1] > default_rank_tol(b_star, s[0]) and m <= n)
    if not surjective:
        raise HypothesisViolated("B* is not surjective; it has no bounded right inverse")

    p_op = lam * np.eye(n) - system.a
    right_inv = pseudo_inverse(b_star)
    p = op_norm(right_inv)
    range_b = orth_range(b)
    proj = range_b @ range_b.conj().T
    r = op_norm(p_op @ proj)
    kernel = orth_null(b_star)
    if kernel.shape[1]:
        compl = np.eye(n) - proj
        s_norm = op_norm(p_op @ compl)
        g = min_singular_value(kernel.conj().T @ p_op @ kernel)
    else:
        s_norm, g = 0.0, np.inf

    grushin = np.block([[p_op, b], [b_star, np.zeros((m, m))]])
    true_constant = min_singular_value(grushin) ** 2

    if g == 0.0:
        certified = 0.0
    else:
        inv_g = 0.0 if np.isinf(g) else 1.0 / g
        row_pi = [0.0, p]
        row_perp = [inv_g, r * p * inv_g]
        factor = p * (1.0 + s_norm * inv_g)
        row_minus = [factor, factor * r * p]
        coeffs = np.array([row_pi, row_perp, row_minus])
        certified = 1.0 / op_norm(coeffs) ** 2

    return CertifiedBound(
        certified_constant=float(certified),
        true_constant=float(true_constant),
        right_inverse_norm=float(p),
        restricted_norm=float(r),
        hypothesis_ok=True,
        complement_norm=float(s_norm),
        compression_lower=float(g),
    )
