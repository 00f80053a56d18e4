"""Damped wave equation ``u_tt - u_xx + G u_t = 0`` on ``(0, pi)``, ``G = (-d2/dx2)^{-1}``.

Dirichlet modes ``sin(k x)`` have Laplacian eigenvalues ``k**2``, so the
truncation to ``N`` modes decouples into ``2 x 2`` blocks. States are
ordered mode by mode, ``(u_1, v_1, u_2, v_2, ...)``, which makes the
generator block diagonal. Per mode::

    A_k = [[0, 1], [-k**2, -1/k**2]],   B_k = [[0], [1/k]],   C_k = B_k*

i.e. ``A = A_0 - B B*``. ``anti_damped=True`` flips to ``A_0 + B B*``.
``energy_coordinates=True`` rescales ``u_k`` by ``k`` so that the
Euclidean norm is the wave energy; the spectrum does not change.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .analysis import HautusReport
from .errors import EmptyGrid
from .lti import StateSpaceSystem

__all__ = [
    "WaveConfig",
    "ModeDecay",
    "build_wave_system",
    "wave_margin_scan",
    "decay_report",
    "spectral_abscissa",
]


@dataclass(frozen=True)
class WaveConfig:
    n_modes: int

    def __post_init__(self):
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise ValueError("n_modes must be a positive integer")

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(1, self.n_modes + 1, dtype=float)


@dataclass(frozen=True)
class ModeDecay:
    k: int
    eigenvalues: np.ndarray
    spectral_abscissa: float


def _mode_block(k: float, sign: float, energy: bool) -> np.ndarray:
    if energy:
        return np.array([[0.0, k], [-k, sign / k**2]])
    return np.array([[0.0, 1.0], [-k**2, sign / k**2]])


def build_wave_system(
    config: WaveConfig, anti_damped: bool = False, energy_coordinates: bool = False
) -> StateSpaceSystem:
    sign = 1.0 if anti_damped else -1.0
    blocks = [_mode_block(k, sign, energy_coordinates) for k in config.wavenumbers]
    a = scipy.linalg.block_diag(*blocks)
    n = config.n_modes
    b = np.zeros((2 * n, n))
    b[1::2, :] = np.diag(1.0 / config.wavenumbers)
    return StateSpaceSystem(a=a, b=b)


def wave_margin_scan(config: WaveConfig, omega_grid, refine: bool = True) -> HautusReport:
    """Sweep ``min_k ((w**2 - k**2)**2 + w**2 / k**2) / w**2``.

    This is the smallest value of
    ``(||(w**2 - A_0) z||**2 + ||w G^{1/2} z||**2) / ||w z||**2`` over
    modal truncations, computed per mode because everything is diagonal.
    ``w = 0`` is skipped. With ``refine`` the resonant frequencies
    ``w = k`` inside the grid range are added.
    """
    grid = np.abs(np.asarray(omega_grid, dtype=float).reshape(-1))
    grid = grid[grid > 0]
    if grid.size == 0:
        raise EmptyGrid("frequency grid has no nonzero samples")
    k = config.wavenumbers
    if refine:
        grid = np.concatenate([grid, k[(k >= grid.min()) & (k <= grid.max())]])
    grid = np.unique(grid)
    w2 = grid[:, None] ** 2
    per_mode = ((w2 - k**2) ** 2 + w2 / k**2) / w2
    values = per_mode.min(axis=1)
    j = int(np.argmin(values))
    return HautusReport(
        grid=grid,
        per_freq_margin=values,
        margin=float(values[j]),
        argmin_freq=float(grid[j]),
    )


def decay_report(config: WaveConfig, anti_damped: bool = False) -> list[ModeDecay]:
    sign = 1.0 if anti_damped else -1.0
    records = []
    for k in config.wavenumbers:
        eig = np.linalg.eigvals(_mode_block(k, sign, False))
        eig = eig[np.argsort(eig.imag)]
        records.append(ModeDecay(k=int(k), eigenvalues=eig, spectral_abscissa=float(eig.real.max())))
    return records


def spectral_abscissa(config: WaveConfig, anti_damped: bool = False) -> float:
    return max(r.spectral_abscissa for r in decay_report(config, anti_damped))
