"""Exception types raised across the package.

Everything derives from :class:`PropEncError`. The CLI maps
:class:`NotConverged` to exit code 3 and every other subclass to exit code 2.
"""

from __future__ import annotations


class PropEncError(Exception):
    """Base class for all package errors.

    ``graph_index`` is filled in when the failure happened while processing
    one graph of a dataset.
    """

    graph_index: int | None = None

    def __str__(self) -> str:
        msg = super().__str__()
        if self.graph_index is not None:
            return f"graph {self.graph_index}: {msg}"
        return msg


class IndexOutOfRange(PropEncError, IndexError):
    pass


class SelfLoop(PropEncError, ValueError):
    pass


class InvalidProbability(PropEncError, ValueError):
    pass


class InvalidParams(PropEncError, ValueError):
    pass


class NotConverged(PropEncError, ArithmeticError):
    """An iterative solver hit ``max_iter`` without reaching ``tol``."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class TooLarge(PropEncError, ValueError):
    pass


class EmptyInput(PropEncError, ValueError):
    pass


class NonFinite(PropEncError, ValueError):
    pass


class NonIntegral(PropEncError, ValueError):
    pass


class OutOfRange(PropEncError, ValueError):
    pass


class LengthMismatch(PropEncError, ValueError):
    pass


class WidthMismatch(PropEncError, ValueError):
    pass


class MalformedLine(PropEncError, ValueError):
    def __init__(self, path: str, line_number: int, text: str):
        super().__init__(f"{path}:{line_number}: cannot parse {text!r}")
        self.path = path
        self.line_number = line_number


class CrossGraphEdge(PropEncError, ValueError):
    pass


class InconsistentCounts(PropEncError, ValueError):
    pass


class UnsupportedFormat(PropEncError, ValueError):
    pass


class SingleClass(PropEncError, ValueError):
    pass


class TooFewSamples(PropEncError, ValueError):
    pass

