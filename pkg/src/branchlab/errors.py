"""Exception hierarchy shared by every branchlab module."""


class BranchLabError(Exception):
    """Base class for all library errors."""


class EmptyDistribution(BranchLabError, ValueError):
    pass


class NotNormalized(BranchLabError, ValueError):
    pass


class NegativeWeight(BranchLabError, ValueError):
    pass


class DimensionMismatch(BranchLabError, ValueError):
    pass


class CapExceeded(BranchLabError, RuntimeError):
    """Enumeration would exceed the configured size cap."""


class EmptyAssignment(BranchLabError, ValueError):
    pass


class SameDistribution(BranchLabError, ValueError):
    pass


class MalformedCertificate(BranchLabError, ValueError):
    pass


class UndefinedOnBasis(BranchLabError, KeyError):
    pass


class NonInjectiveRule(BranchLabError, ValueError):
    pass


class ExpectedCountTooSmall(BranchLabError, ValueError):
    pass


class IndexOutOfRange(BranchLabError, ValueError):
    pass


class ParseError(BranchLabError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.message = message
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class SchemaError(BranchLabError, ValueError):
    pass
