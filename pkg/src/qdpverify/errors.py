"""Exception hierarchy.

Every error carries a short ``code`` used by the command line front end
when it emits a machine-readable error record.
"""

from __future__ import annotations


class QdpError(Exception):
    code = "QdpError"


class InvalidInput(QdpError, ValueError):
    code = "InvalidInput"


class InvalidMatrix(InvalidInput):
    code = "InvalidMatrix"


class InvalidState(InvalidInput):
    code = "InvalidState"


class InvalidChannel(InvalidInput):
    code = "InvalidChannel"


class InvalidPovm(InvalidInput):
    code = "InvalidPovm"


class DimensionMismatch(InvalidInput):
    code = "DimensionMismatch"


class UnknownGate(InvalidInput):
    code = "UnknownGate"


class InvalidParams(InvalidInput):
    code = "InvalidParams"


class InvalidTarget(InvalidInput):
    code = "InvalidTarget"


class InvalidProbability(InvalidInput):
    code = "InvalidProbability"


class NotNeighbors(InvalidInput):
    code = "NotNeighbors"


class ResourceLimit(QdpError):
    code = "ResourceLimit"


class ConvergenceFailure(QdpError, ArithmeticError):
    code = "ConvergenceFailure"

    def __init__(self, message: str, best_residual: float = float("inf")):
        super().__init__(message)
        self.best_residual = best_residual


class ParseError(InvalidInput):
    code = "ParseError"
