"""Exception hierarchy. Each class carries the exit code the CLI reports."""


class CvarError(Exception):
    exit_code = 1


class NotPositiveDefinite(CvarError):
    exit_code = 10


class DimensionMismatch(CvarError):
    exit_code = 11


class InsufficientData(CvarError):
    exit_code = 12


class ZeroVariance(CvarError):
    exit_code = 13


class MissingLags(CvarError):
    exit_code = 14


class NotTriangulated(CvarError):
    exit_code = 20

    def __init__(self, message, node=None, missing_edge=None):
        super().__init__(message)
        self.node = node
        self.missing_edge = missing_edge


class NotPerfectOrdering(CvarError):
    exit_code = 21


class DegenerateInput(CvarError):
    exit_code = 22


class NotDecomposable(CvarError):
    exit_code = 23


class CliqueTooLarge(CvarError):
    exit_code = 30


class SingularCliqueMoment(CvarError):
    exit_code = 31


class MaxIterationsExceeded(CvarError):
    exit_code = 32


class UnstableModel(CvarError):
    exit_code = 40


class DegenerateDenominator(CvarError):
    exit_code = 50


class ParseError(CvarError):
    exit_code = 60

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class RaggedRows(ParseError):
    exit_code = 61


class NonNumericCell(ParseError):
    exit_code = 62
