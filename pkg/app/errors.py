class TomographyError(Exception):
    """Base class for every error raised by the reconstruction toolkit."""


class InvalidInputError(TomographyError, ValueError):
    """Bad dimensions, a window that does not fit, or cells out of range."""


class GridShapeError(InvalidInputError):
    pass


class MatrixFormatError(InvalidInputError):
    pass


class PreconditionError(TomographyError, ValueError):
    """An operation was called outside its stated precondition."""


class NonSmoothScanError(TomographyError):
    """The residual of a decomposition does not have constant columns."""


class UnrealizableError(TomographyError):
    pass


class SizeGuardError(TomographyError):
    """The exhaustive oracle refuses instances above its cell guard."""


class ConsistencyError(TomographyError, RuntimeError):
    """An internal invariant of the reconstruction broke; never an input problem."""
