"""Exception types shared across the package."""


class NotSymmetricError(ValueError):
    """Matrix is not symmetric within tolerance."""


class NotPsdError(ValueError):
    """Symmetric matrix has an eigenvalue below the PSD tolerance."""


class DimensionMismatchError(ValueError):
    """Operands have incompatible shapes."""


class RankOutOfRangeError(ValueError):
    """Requested rank is outside the valid range for the operand."""


class InvalidPError(ValueError):
    """Schatten order must satisfy p >= 1."""


class DomainError(ValueError):
    """Scalar function evaluated outside its domain, or used with the
    wrong property flags for the operation at hand."""


class PropertyViolationError(ValueError):
    """A property a function was flagged with failed a numerical check."""

    def __init__(self, function, clause, witness, margin):
        self.function = function
        self.clause = clause
        self.witness = witness
        self.margin = margin
        super().__init__(
            f"{function}: clause {clause!r} violated at {witness} "
            f"(margin {margin:.3e})"
        )


class MismatchWithPaperError(AssertionError):
    """A recomputed quantity contradicts a published value beyond the
    last-printed-digit tolerance."""


class MatrixFileError(ValueError):
    """Matrix file could not be parsed or fails validation."""
