"""Reachable states of a diagonalizable system via exponential moment families.

Eigenvalues follow the convention ``A phi_n = -lam_n phi_n``; the
biorthogonal vectors satisfy ``<phi_m, psi_n> = delta_mn``. The moment family
is ``E_n(t) = exp(-conj(lam_n) t) B* psi_n`` and its Gram matrix in
``L^2(0, T; U)`` is available in closed form.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMode, NonDiagonalizable
from .lti import StateSpaceSystem

__all__ = [
    "ModalSystem",
    "ReachableDescription",
    "modal_from_system",
    "exp_integral",
    "moment_gram",
    "reachable_weights",
]

_SERIES_CUTOFF = 1e-6


@dataclass(frozen=True)
class ModalSystem:
    eigenvalues: np.ndarray
    basis: np.ndarray
    biorthogonal: np.ndarray
    b_star_psi: np.ndarray  # row n holds B* psi_n

    def __post_init__(self):
        gram = self.biorthogonal.conj().T @ self.basis
        if not np.allclose(gram, np.eye(gram.shape[0]), atol=1e-10, rtol=0):
            raise ValueError("basis and biorthogonal family are not biorthogonal")

    @property
    def size(self) -> int:
        return self.eigenvalues.size


@dataclass(frozen=True)
class ReachableDescription:
    weights: np.ndarray
    frame_lower: float
    frame_upper: float
    time_horizon: float


def modal_from_system(system: StateSpaceSystem, max_cond: float = 1e8) -> ModalSystem:
    """Diagonalize ``A`` and flip eigenvalue signs to ``A phi = -lam phi``."""
    eig, vecs = np.linalg.eig(system.a)
    cond = np.linalg.cond(vecs)
    if not np.isfinite(cond) or cond > max_cond:
        raise NonDiagonalizable(f"eigenvector matrix has condition number {cond:.3e}")
    psi = np.linalg.inv(vecs).conj().T
    return ModalSystem(
        eigenvalues=-eig,
        basis=vecs,
        biorthogonal=psi,
        b_star_psi=(system.b.conj().T @ psi).T,
    )


def exp_integral(s, t_end: float):
    """``int_0^T exp(-s t) dt = (1 - exp(-s T)) / s``, with ``T`` at ``s = 0``."""
    s = np.asarray(s, dtype=np.complex128)
    x = s * t_end
    small = np.abs(x) < _SERIES_CUTOFF
    out = np.empty_like(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        out[~small] = -np.expm1(-x[~small]) / s[~small]
    xs = x[small]
    out[small] = t_end * (1 - xs / 2 + xs**2 / 6)
    return out


def moment_gram(modal: ModalSystem, t_end: float) -> np.ndarray:
    """``G[m, n] = <E_n, E_m>`` in ``L^2(0, T; U)``.

    ``G[m, n] = <B* psi_n, B* psi_m> * I(conj(lam_n) + lam_m, T)``.
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    lam = modal.eigenvalues
    v = modal.b_star_psi
    inner = v.conj() @ v.T  # [m, n] = <v_n, v_m>
    s = lam[:, None] + lam.conj()[None, :]
    gram = inner * exp_integral(s, t_end)
    return 0.5 * (gram + gram.conj().T)


def reachable_weights(modal: ModalSystem, t_end: float) -> ReachableDescription:
    """Weights ``||E_n||^2`` and frame bounds of the normalized family."""
    gram = moment_gram(modal, t_end)
    weights = gram.diagonal().real.copy()
    scale = max(weights.max(initial=0.0), 1e-300)
    dead = np.flatnonzero(weights <= 1e-14 * scale)
    if dead.size or scale <= 1e-300:
        raise DegenerateMode(f"modes {dead.tolist()} are unreachable (B* psi_n = 0)")
    d = 1.0 / np.sqrt(weights)
    normalized = d[:, None] * gram * d[None, :]
    ev = np.linalg.eigvalsh(normalized)
    return ReachableDescription(
        weights=weights,
        frame_lower=float(ev[0]),
        frame_upper=float(ev[-1]),
        time_horizon=float(t_end),
    )
