"""One level of Grushin iteration.

Given the base problem ``[[lam - A, B], [B*, 0]]`` with inverse blocks
``E, E_+, E_-, E_-+`` and couplings ``N_-`` (``m x q``), ``N_+``
(``r x m``), the secondary problem ``[[E_-+, N_-], [N_+, 0]]`` has inverse
blocks ``F, F_+, F_-, F_-+``. The composed problem
``[[lam - A, B N_-], [N_+ B*, 0]]`` is then inverted by::

    [[E - E_+ F E_-,  E_+ F_+],
     [F_- E_-,       -F_-+   ]]

and corresponds to the system ``(A, B N_-, N_+ B*, N_+ D N_-)`` with
transfer function ``N_+ H N_-``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_matrix
from .errors import DimensionMismatch
from .grushin import GrushinInverse, assemble, invert_grushin
from .lti import StateSpaceSystem, grushin_at

__all__ = ["IterationSpec", "iterate_system", "iterated_inverse_blocks", "direct_iterated_inverse"]


@dataclass(frozen=True)
class IterationSpec:
    n_minus: np.ndarray
    n_plus: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "n_minus", as_matrix(self.n_minus, "n_minus"))
        object.__setattr__(self, "n_plus", as_matrix(self.n_plus, "n_plus"))


def _check(system: StateSpaceSystem, spec: IterationSpec) -> None:
    if spec.n_minus.shape[0] != system.n_inputs:
        raise DimensionMismatch(
            f"N_- has {spec.n_minus.shape[0]} rows, system has {system.n_inputs} inputs"
        )
    if spec.n_plus.shape[1] != system.n_outputs:
        raise DimensionMismatch(
            f"N_+ has {spec.n_plus.shape[1]} columns, system has {system.n_outputs} outputs"
        )


def iterate_system(system: StateSpaceSystem, spec: IterationSpec) -> StateSpaceSystem:
    _check(system, spec)
    return StateSpaceSystem(
        a=system.a,
        b=system.b @ spec.n_minus,
        c=spec.n_plus @ system.c,
        d=spec.n_plus @ system.d @ spec.n_minus,
    )


def iterated_inverse_blocks(
    system: StateSpaceSystem, spec: IterationSpec, lam: complex
) -> GrushinInverse:
    """Inverse of the composed problem assembled from the two stages.

    Raises :class:`~grushinlab.errors.IllPosed` if either stage is not
    invertible at `lam`.
    """
    _check(system, spec)
    base = grushin_at(system, lam)
    second = invert_grushin(assemble(base.e_minus_plus, spec.n_minus, spec.n_plus))
    return GrushinInverse(
        e=base.e - base.e_plus @ second.e @ base.e_minus,
        e_plus=base.e_plus @ second.e_plus,
        e_minus=second.e_minus @ base.e_minus,
        e_minus_plus=-second.e_minus_plus,
    )


def direct_iterated_inverse(
    system: StateSpaceSystem, spec: IterationSpec, lam: complex
) -> GrushinInverse:
    """Invert ``[[lam - A, B N_-], [N_+ C, N_+ D N_-]]`` in one dense solve."""
    composed = iterate_system(system, spec)
    n = system.n_states
    return invert_grushin(
        assemble(lam * np.eye(n) - composed.a, composed.b, composed.c, composed.d)
    )
