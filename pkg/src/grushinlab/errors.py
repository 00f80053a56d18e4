"""Exception types raised by grushinlab.

Everything numerical derives from :class:`DomainError`; the CLI maps those
to exit status 2 and everything else to exit status 1.
"""


class DomainError(ValueError):
    """A well-formed request that has no answer for the given data."""


class DimensionMismatch(DomainError):
    pass


class Singular(DomainError):
    """A matrix that had to be inverted is (numerically) singular."""


class IllPosed(DomainError):
    """The assembled Grushin matrix is not invertible."""


class EffectiveHamiltonianSingular(Singular):
    """E_-+ is singular, i.e. the spectral parameter lies in the spectrum."""


class HypothesisViolated(DomainError):
    pass


class InvalidGrid(DomainError):
    pass


class EmptyGrid(DomainError):
    pass


class NonDiagonalizable(DomainError):
    pass


class ContourThroughSpectrum(DomainError):
    pass


class TransferSingularOnContour(DomainError):
    pass


class DegenerateMode(DomainError):
    pass


class MatrixOverflow(DomainError, OverflowError):
    pass
