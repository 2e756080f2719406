"""Exception hierarchy shared by all modules."""


class RearrangementError(Exception):
    """Base class for library errors."""


class ContractError(RearrangementError, ValueError):
    """A documented precondition was violated (wrong space tag, bad parameter)."""


class GridMismatchError(ContractError):
    """Two objects were built on different grids."""


class FieldFormatError(RearrangementError):
    """An FRF1 file is malformed, truncated, or fails validation."""


class InternalConsistencyError(RearrangementError):
    """A numerical self-check failed (e.g. imaginary residual of a rearrangement)."""


class MajorantError(ContractError):
    """The pointwise majorant precondition |f^| <= g^ does not hold."""


class SearchFailure(RearrangementError):
    """A constructive search found no example with the requested property."""


class SolverError(RearrangementError):
    """Base class for iteration failures."""


class ZeroCollapseError(SolverError):
    """The iterate collapsed to zero (stabilizing factor degenerate)."""


class NumericalOverflowError(RearrangementError, OverflowError):
    """An intermediate quantity left the double-precision range."""
