"""Exception types raised across mfstab."""


class InvalidArgument(ValueError):
    """Malformed or out-of-range input (shape mismatch, bad count, ...)."""


class RankDeficiencyError(ArithmeticError):
    """A least-squares subproblem or basis does not have the required rank.

    ``axis`` is ``"row"`` or ``"column"`` when the failure can be pinned to a
    single index of the data matrix, and ``index`` names that index.
    """

    def __init__(self, message, *, axis=None, index=None, rank=None):
        super().__init__(message)
        self.axis = axis
        self.index = index
        self.rank = rank


class DegenerateMaskError(ArithmeticError):
    """The row restriction of a basis is numerically zero."""


class ParseError(ValueError):
    """Malformed CSV or config input; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
