"""Exception hierarchy shared by all modules."""


class SymspaceError(Exception):
    """Base class for every error raised by the package."""


class NotSymmetric(SymspaceError):
    pass


class NoConvergence(SymspaceError):
    pass


class NotSPD(SymspaceError):
    pass


class Overflow(SymspaceError):
    pass


class BasisMismatch(SymspaceError):
    pass


class NotClosed(SymspaceError):
    pass


class NotTriangular(SymspaceError):
    pass


class NotInImage(SymspaceError):
    pass


class EigenvalueBelowOne(SymspaceError):
    pass


class NegativeDiscriminant(SymspaceError):
    pass


class NotUnimodular(SymspaceError):
    pass


class NotSymplectic(SymspaceError):
    pass


class NonIntegerEntry(SymspaceError):
    pass


class Exceeded(SymspaceError):
    pass


class SingularDenominator(SymspaceError):
    pass


class TooManyRows(SymspaceError):
    pass


class SingularMetric(SymspaceError):
    pass


class DegenerateSection(SymspaceError):
    pass


class SingularF(SymspaceError):
    pass


class ShapeMismatch(SymspaceError):
    pass


class UnknownSuite(SymspaceError):
    pass


class BadParams(SymspaceError):
    pass


class ParseError(SymspaceError):
    pass
