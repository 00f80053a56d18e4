"""Contour integrals of the resolvent and of the transfer function.

All integrals run over circles with the periodic trapezoidal rule, which
converges geometrically for integrands analytic near the circle. Sums are
accumulated in node order so results are reproducible bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import solve_linear
from .errors import ContourThroughSpectrum, Singular, TransferSingularOnContour
from .lti import StateSpaceSystem

__all__ = [
    "ContourSpec",
    "TraceCountReport",
    "spectral_projection",
    "trace_counts",
]

# trapezoidal error for a pole at radius ratio rho behaves like rho**nodes
_MAX_PREDICTED_ERROR = 1e-3


@dataclass(frozen=True)
class ContourSpec:
    center: complex = 0.0
    radius: float = 1.0
    nodes: int = 256

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("contour radius must be positive")
        if self.nodes < 16:
            raise ValueError("contour needs at least 16 nodes")

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """Quadrature nodes and the matching weights for ``dlam / (2 pi i)``."""
        theta = 2 * np.pi * np.arange(self.nodes) / self.nodes
        offset = self.radius * np.exp(1j * theta)
        return self.center + offset, offset / self.nodes

    def inside(self, values) -> np.ndarray:
        return np.abs(np.asarray(values) - self.center) < self.radius

    def predicted_error(self, values) -> float:
        """Largest ``min(rho, 1/rho)**nodes`` over the given singularities."""
        values = np.asarray(values).reshape(-1)
        if values.size == 0:
            return 0.0
        rho = np.abs(values - self.center) / self.radius
        with np.errstate(divide="ignore"):
            q = np.minimum(rho, 1.0 / rho)
        return float(np.max(q) ** self.nodes)


@dataclass(frozen=True)
class TraceCountReport:
    lhs_count: complex
    rhs_count: complex
    eig_inside: int
    eh_poles_inside: int
    eh_winding: complex = 0j

    @property
    def identity_holds(self) -> bool:
        return self.eh_poles_inside == 0 and abs(self.lhs_count - self.rhs_count) < 0.01


def _check_spectrum(a: np.ndarray, contour: ContourSpec) -> np.ndarray:
    eig = np.linalg.eigvals(a)
    if contour.predicted_error(eig) > _MAX_PREDICTED_ERROR:
        raise ContourThroughSpectrum(
            f"an eigenvalue of A lies too close to the circle "
            f"|lam - {contour.center}| = {contour.radius}"
        )
    return eig


def _resolvent_at(a: np.ndarray, lam: complex) -> np.ndarray:
    n = a.shape[0]
    try:
        return solve_linear(lam * np.eye(n) - a, np.eye(n))
    except Singular as exc:
        raise ContourThroughSpectrum(f"resolvent is singular at node {lam}") from exc


def spectral_projection(system: StateSpaceSystem, contour: ContourSpec) -> np.ndarray:
    """Riesz projector ``(1/2 pi i) oint (lam I - A)^{-1} dlam``."""
    a = system.a
    _check_spectrum(a, contour)
    nodes, weights = contour.points()
    out = np.zeros_like(a)
    for lam, w in zip(nodes, weights):
        out += w * _resolvent_at(a, lam)
    return out


def trace_counts(system: StateSpaceSystem, contour: ContourSpec, g=(1.0,)) -> TraceCountReport:
    """Both sides of the resolvent / transfer-function trace formula.

    ``g`` is a polynomial given by its coefficients, lowest degree first.

    * ``lhs = (1/2 pi i) oint tr (lam - A)^{-1} g dlam`` sums ``g`` over the
      enclosed eigenvalues of ``A``.
    * ``rhs = (1/2 pi i) oint tr [d(H^{-1})/dlam H] g dlam`` with
      ``H' = -B* (lam - A)^{-2} B`` in closed form, so the integrand is
      ``tr(H^{-1} B* R^2 B) g``.
    * ``eh_poles_inside`` counts the zeros of ``det [[lam - A, B], [B*, 0]]``
      inside the circle (poles of ``E_-+ = -H^{-1}``) as the winding number
      ``(1/2 pi i) oint tr E(lam) dlam``.

    With ``g = 1`` the three integrals obey ``rhs = lhs - eh_poles_inside``.
    """
    if not system.is_collocated(tol=0.0) or np.any(system.d != 0):
        raise ValueError("trace_counts requires C = B* and D = 0")
    a, b = system.a, system.b
    n, m = b.shape
    eig = _check_spectrum(a, contour)
    coeffs = np.asarray(g, dtype=np.complex128).reshape(-1)
    nodes, weights = contour.points()
    g_vals = np.polynomial.polynomial.polyval(nodes, coeffs)

    lhs = 0j
    rhs = 0j
    wind = 0j
    b_star = b.conj().T
    zero = np.zeros((m, m))
    for lam, w, gv in zip(nodes, weights, g_vals):
        res = _resolvent_at(a, lam)
        rb = res @ b
        h = b_star @ rb
        try:
            h_inv_dh = solve_linear(h, b_star @ (res @ rb))
        except Singular as exc:
            raise TransferSingularOnContour(f"H(lam) is singular at node {lam}") from exc
        try:
            big_inv = solve_linear(np.block([[lam * np.eye(n) - a, b], [b_star, zero]]),
                                   np.vstack([np.eye(n), np.zeros((m, n))]))
        except Singular as exc:
            raise TransferSingularOnContour(
                f"Grushin matrix is singular at node {lam}"
            ) from exc
        lhs += w * gv * np.trace(res)
        rhs += w * gv * np.trace(h_inv_dh)
        wind += w * np.trace(big_inv[:n])

    return TraceCountReport(
        lhs_count=complex(lhs),
        rhs_count=complex(rhs),
        eig_inside=int(np.sum(contour.inside(eig))),
        eh_poles_inside=int(np.rint(wind.real)),
        eh_winding=complex(wind),
    )
