"""Finite-dimensional state-space systems ``z' = Az + Bu, y = Cz + Du``.

The observation operator defaults to ``B*`` and the feedthrough to zero.
Time-domain maps (:func:`controllability_map`, :func:`observation_map`)
use a uniform grid with inputs held constant on each step. Passing
``scaled=True`` multiplies them by ``sqrt(dt)`` so that Euclidean norms of
sample vectors approximate ``L^2(0, T)`` norms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import as_matrix, as_vector, matrix_exponential, op_norm, solve_linear
from .errors import DimensionMismatch, InvalidGrid
from .grushin import GrushinInverse, assemble, invert_grushin

__all__ = [
    "StateSpaceSystem",
    "Trajectory",
    "resolvent",
    "transfer_function",
    "grushin_at",
    "simulate",
    "controllability_map",
    "observation_map",
    "dual_system",
    "adjoint_factorization_check",
    "regularity_limit",
    "DEFAULT_LAMBDA_GRID",
]

DEFAULT_LAMBDA_GRID = np.logspace(1, 6, 11)


@dataclass(frozen=True, eq=False)
class StateSpaceSystem:
    """The quadruple ``(A, B, C, D)``.

    ``c`` defaults to the conjugate transpose of ``b`` and ``d`` to zeros.
    Setting ``skew_adjoint`` asserts ``A* = -A``; it is checked on
    construction to a relative tolerance of 1e-12.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray | None = None
    d: np.ndarray | None = None
    skew_adjoint: bool = False

    def __post_init__(self):
        a = as_matrix(self.a, "a")
        b = as_matrix(self.b, "b")
        n = a.shape[0]
        if a.shape != (n, n):
            raise DimensionMismatch(f"A must be square, got {a.shape}")
        if b.shape[0] != n:
            raise DimensionMismatch(f"B has {b.shape[0]} rows, expected {n}")
        c = b.conj().T if self.c is None else self.c
        c = as_matrix(c, "c")
        if c.shape[1] != n:
            raise DimensionMismatch(f"C has {c.shape[1]} columns, expected {n}")
        d = np.zeros((c.shape[0], b.shape[1])) if self.d is None else self.d
        d = as_matrix(d, "d")
        if d.shape != (c.shape[0], b.shape[1]):
            raise DimensionMismatch(
                f"D has shape {d.shape}, expected {(c.shape[0], b.shape[1])}"
            )
        if self.skew_adjoint:
            defect = op_norm(a.conj().T + a)
            if defect > 1e-12 * max(op_norm(a), 1e-300):
                raise ValueError(f"A is not skew-adjoint (||A* + A|| = {defect:.3e})")
        for name, value in (("a", a), ("b", b), ("c", c), ("d", d)):
            object.__setattr__(self, name, value)

    @property
    def n_states(self) -> int:
        return self.a.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.b.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.c.shape[0]

    def is_collocated(self, tol: float = 0.0) -> bool:
        """True when ``C == B*`` (to `tol`, exact by default)."""
        return self.c.shape == self.b.T.shape and bool(
            np.max(np.abs(self.c - self.b.conj().T), initial=0.0) <= tol
        )

    def replace(self, **changes) -> "StateSpaceSystem":
        fields = dict(a=self.a, b=self.b, c=self.c, d=self.d, skew_adjoint=self.skew_adjoint)
        fields.update(changes)
        return StateSpaceSystem(**fields)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    outputs: np.ndarray


def resolvent(system: StateSpaceSystem, lam: complex) -> np.ndarray:
    """``(lam I - A)^{-1}``; raises :class:`Singular` on the spectrum."""
    n = system.n_states
    return solve_linear(lam * np.eye(n) - system.a, np.eye(n))


def transfer_function(system: StateSpaceSystem, lam: complex) -> np.ndarray:
    n = system.n_states
    x = solve_linear(lam * np.eye(n) - system.a, system.b)
    return system.d + system.c @ x


def grushin_at(system: StateSpaceSystem, lam: complex) -> GrushinInverse:
    """Invert ``[[lam I - A, B], [C, D]]``.

    For ``D = 0`` the effective Hamiltonian satisfies
    ``E_-+^{-1} = -H(lam)``; for general ``D`` it is the Schur complement
    ``E_-+^{-1} = D - C (lam I - A)^{-1} B``.
    """
    if system.n_inputs != system.n_outputs:
        raise DimensionMismatch(
            f"Grushin problem needs as many inputs as outputs "
            f"({system.n_inputs} != {system.n_outputs})"
        )
    n = system.n_states
    problem = assemble(lam * np.eye(n) - system.a, system.b, system.c, system.d)
    return invert_grushin(problem)


def _grid(t_end: float, dt: float) -> tuple[int, float]:
    if not (dt > 0 and math.isfinite(dt)) or not math.isfinite(t_end):
        raise InvalidGrid(f"invalid step dt={dt!r}")
    if t_end < dt * (1 - 1e-12):
        raise InvalidGrid(f"t_end={t_end!r} is shorter than one step dt={dt!r}")
    steps = max(1, int(round(t_end / dt)))
    # uniform grid that lands exactly on t_end
    return steps, t_end / steps


def _step_operators(system: StateSpaceSystem, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact zero-order-hold propagators from the augmented exponential."""
    n, m = system.n_states, system.n_inputs
    aug = np.zeros((n + m, n + m), dtype=np.complex128)
    aug[:n, :n] = system.a
    aug[:n, n:] = system.b
    big = matrix_exponential(aug, dt)
    return big[:n, :n], big[:n, n:]


def _input_samples(u, steps: int, m: int) -> np.ndarray:
    if u is None:
        return np.zeros((steps + 1, m), dtype=np.complex128)
    arr = np.asarray(u, dtype=np.complex128)
    if arr.ndim == 0:
        return np.full((steps + 1, m), arr, dtype=np.complex128)
    if arr.ndim == 1:
        if arr.shape[0] == m and arr.shape[0] not in (steps, steps + 1):
            return np.tile(arr, (steps + 1, 1))
        if m != 1:
            raise InvalidGrid(f"1-D input is ambiguous for a system with {m} inputs")
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[1] != m:
        raise InvalidGrid(f"input samples must have shape (K, {m}), got {arr.shape}")
    if arr.shape[0] == steps:
        arr = np.vstack([arr, arr[-1:]])
    if arr.shape[0] != steps + 1:
        raise InvalidGrid(
            f"input has {arr.shape[0]} samples, grid needs {steps} or {steps + 1}"
        )
    return arr


def simulate(
    system: StateSpaceSystem,
    z0,
    u=None,
    t_end: float = 1.0,
    dt: float = 1e-2,
) -> Trajectory:
    """Propagate the state on a uniform grid with piecewise-constant input.

    `u` may be ``None`` (zero input), a constant of shape ``(m,)`` or a
    scalar, or samples of shape ``(K, m)`` / ``(K + 1, m)`` where
    ``K = round(t_end / dt)``. Sample ``k`` is held on ``[t_k, t_{k+1})``.
    The step is adjusted to ``t_end / K`` so the last instant is ``t_end``.
    """
    steps, h = _grid(t_end, dt)
    n, m = system.n_states, system.n_inputs
    z0 = as_vector(z0, "z0")
    if z0.shape[0] != n:
        raise DimensionMismatch(f"z0 has dimension {z0.shape[0]}, expected {n}")
    samples = _input_samples(u, steps, m)
    phi, gamma = _step_operators(system, h)
    states = np.empty((steps + 1, n), dtype=np.complex128)
    states[0] = z0
    for k in range(steps):
        states[k + 1] = phi @ states[k] + gamma @ samples[k]
    outputs = states @ system.c.T + samples @ system.d.T
    times = h * np.arange(steps + 1)
    return Trajectory(times=times, states=states, outputs=outputs)


def controllability_map(
    system: StateSpaceSystem, t_end: float, dt: float, scaled: bool = False
) -> np.ndarray:
    """Matrix sending stacked input samples ``(u_0, ..., u_{K-1})`` to ``z(T)``.

    Block column ``j`` (``m`` columns) is ``Phi^{K-1-j} Gamma``, the exact
    response to a unit input held on step ``j``. With ``scaled=True`` the
    columns are divided by ``sqrt(dt)``, so the map acts on ``L^2``
    coefficients and ``L L*`` approximates the controllability Gramian.
    """
    steps, h = _grid(t_end, dt)
    n, m = system.n_states, system.n_inputs
    phi, gamma = _step_operators(system, h)
    out = np.empty((n, m * steps), dtype=np.complex128)
    block = gamma
    for j in range(steps - 1, -1, -1):
        out[:, j * m:(j + 1) * m] = block
        block = phi @ block
    if scaled:
        out /= math.sqrt(h)
    return out


def observation_map(
    system: StateSpaceSystem, t_end: float, dt: float, scaled: bool = False
) -> np.ndarray:
    """Matrix sending ``z0`` to stacked outputs ``C e^{A t_k} z0``.

    Samples are taken at the left endpoints ``t_k = k dt``, ``k < K``; block
    row ``k`` has ``p`` rows. ``scaled=True`` multiplies by ``sqrt(dt)``.
    """
    steps, h = _grid(t_end, dt)
    n, p = system.n_states, system.n_outputs
    phi = matrix_exponential(system.a, h)
    out = np.empty((p * steps, n), dtype=np.complex128)
    row = system.c.astype(np.complex128)
    for k in range(steps):
        out[k * p:(k + 1) * p] = row
        row = row @ phi
    if scaled:
        out *= math.sqrt(h)
    return out


def dual_system(system: StateSpaceSystem) -> StateSpaceSystem:
    """The system ``(A*, C*, B*, D*)``.

    For a skew-adjoint generator ``-A`` is used directly.
    """
    a_dual = -system.a if system.skew_adjoint else system.a.conj().T
    return StateSpaceSystem(
        a=a_dual,
        b=system.c.conj().T,
        c=system.b.conj().T,
        d=system.d.conj().T,
        skew_adjoint=system.skew_adjoint,
    )


def adjoint_factorization_check(system: StateSpaceSystem, t_end: float, dt: float) -> float:
    """Relative gap between ``c(T)*`` and the time-reflected dual output map.

    Both sides are the ``sqrt(dt)``-scaled discrete maps. Reflection sends
    input slot ``j`` to output sample ``K-1-j``. The gap is ``O(dt)``.
    """
    steps, _ = _grid(t_end, dt)
    m = system.n_inputs
    lhs = controllability_map(system, t_end, dt, scaled=True).conj().T
    psi_dual = observation_map(dual_system(system), t_end, dt, scaled=True)
    reflected = psi_dual.reshape(steps, m, -1)[::-1].reshape(steps * m, -1)
    scale = np.linalg.norm(lhs)
    if scale == 0.0:
        return float(np.linalg.norm(reflected))
    return float(np.linalg.norm(lhs - reflected) / scale)


def regularity_limit(system: StateSpaceSystem, lambda_grid=None) -> np.ndarray:
    """Estimate ``lim H(lam)`` as ``lam -> +inf`` along the real axis.

    Uses two-term Richardson extrapolation in ``1/lam`` on the two largest
    grid points, which removes the ``C B / lam`` term of the expansion
    ``H(lam) = D + C B / lam + O(lam^-2)``.
    """
    grid = DEFAULT_LAMBDA_GRID if lambda_grid is None else np.asarray(lambda_grid, float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("lambda_grid needs at least two points")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("lambda_grid must be strictly increasing")
    values = [transfer_function(system, lam) for lam in grid]
    lo, hi = grid[-2], grid[-1]
    return values[-1] + (lo / (hi - lo)) * (values[-1] - values[-2])
