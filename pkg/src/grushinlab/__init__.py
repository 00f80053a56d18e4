"""Grushin-problem tools for finite-dimensional linear control systems."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ContourThroughSpectrum,
    DegenerateMode,
    DimensionMismatch,
    DomainError,
    EffectiveHamiltonianSingular,
    EmptyGrid,
    HypothesisViolated,
    IllPosed,
    InvalidGrid,
    MatrixOverflow,
    NonDiagonalizable,
    Singular,
    TransferSingularOnContour,
)
from .grushin import (  # noqa: E402
    GrushinInverse,
    GrushinProblem,
    assemble,
    effective_hamiltonian,
    invert_grushin,
    recover_inverse,
)
from .lti import (  # noqa: E402
    StateSpaceSystem,
    Trajectory,
    adjoint_factorization_check,
    controllability_map,
    grushin_at,
    observation_map,
    regularity_limit,
    resolvent,
    simulate,
    transfer_function,
)
