"""Exception hierarchy. Everything raised on purpose derives from FactorGroupError."""


class FactorGroupError(Exception):
    """Base class for computation errors (CLI exit code 2)."""


class DimensionMismatch(FactorGroupError, ValueError):
    pass


class NonFiniteEntry(FactorGroupError, ValueError):
    def __init__(self, index):
        self.index = tuple(int(i) for i in index)
        super().__init__(f"non-finite entry at index {self.index}")


class EmptyAssignment(FactorGroupError, ValueError):
    pass


class LengthMismatch(FactorGroupError, ValueError):
    pass


class RankDeficient(FactorGroupError):
    def __init__(self, message, eigenvalues=()):
        self.eigenvalues = list(eigenvalues)
        super().__init__(f"{message}; eigenvalues={self.eigenvalues}")


class EigenFailure(FactorGroupError):
    pass


class IdentificationError(FactorGroupError, ValueError):
    """Scores violate F'F/T = I."""


class DegenerateGroup(FactorGroupError, ValueError):
    pass


class ZeroResidual(FactorGroupError):
    def __init__(self, k):
        self.k = k
        super().__init__(f"S(K) is zero at K={k}; log undefined")


class SingularLoadings(FactorGroupError):
    def __init__(self, cond):
        self.cond = cond
        super().__init__(f"B'B is numerically singular (condition number {cond:.3g})")


class InsufficientRows(FactorGroupError):
    pass


class IndivisibleGroups(FactorGroupError, ValueError):
    pass


class ParseError(FactorGroupError):
    def __init__(self, row, column, value):
        self.row, self.column, self.value = row, column, value
        super().__init__(f"cannot parse {value!r} at row {row}, column {column!r}")


class NoRowsRemaining(FactorGroupError):
    pass


class ZeroVariance(FactorGroupError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column!r} has zero sample variance")


class EmptyMonth(FactorGroupError):
    pass
