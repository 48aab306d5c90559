"""Exception types shared across the package.

Every error that callers are expected to handle carries enough context to
act on (offending index, line number, iteration count).  The command line
front end maps these onto exit codes: configuration problems exit 2, data
problems exit 3, numeric failures exit 4.
"""
from __future__ import annotations


class NeighselError(Exception):
    """Base class for all package-specific errors."""


class DomainError(NeighselError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class ConstantColumn(NeighselError, ValueError):
    """A data column has (numerically) zero variance and cannot be scaled."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"column {index} has zero variance")


class NotPositiveDefinite(NeighselError, ArithmeticError):
    """A Cholesky pivot fell below tolerance; the matrix is not PD."""

    def __init__(self, pivot: int):
        self.pivot = pivot
        super().__init__(f"pivot {pivot} is not positive")


class MaxIterations(NeighselError, ArithmeticError):
    """An iterative solver hit its iteration cap before converging."""

    def __init__(self, iterations: int, what: str = "solver"):
        self.iterations = iterations
        super().__init__(f"{what} did not converge within {iterations} iterations")


class NotUnique(NeighselError, ArithmeticError):
    """The optimization problem has no unique solution to report."""


class GridError(NeighselError, ValueError):
    """A penalty grid is not strictly descending and positive."""


class FoldTooSmall(NeighselError, ValueError):
    """A cross-validation fold would contain fewer than two rows."""


class InconsistentP(NeighselError, ValueError):
    """Two objects that must share a variable count p do not."""


class EmptyPath(NeighselError, ValueError):
    """An estimation path contains no positions to evaluate."""


class MleDoesNotExist(NeighselError, ArithmeticError):
    """A clique marginal is singular; the restricted MLE does not exist."""

    def __init__(self, clique: tuple[int, ...]):
        self.clique = tuple(clique)
        super().__init__(f"singular sample marginal on clique {self.clique}")


class ParseError(NeighselError, ValueError):
    """A text input could not be parsed.  Line and column are 1-based."""

    def __init__(self, line: int, column: int, detail: str = ""):
        self.line = line
        self.column = column
        msg = f"parse error at line {line}, column {column}"
        if detail:
            msg = f"{msg}: {detail}"
        super().__init__(msg)


class RaggedRow(NeighselError, ValueError):
    """A delimited row has the wrong number of fields.  Line is 1-based."""

    def __init__(self, line: int):
        self.line = line
        super().__init__(f"row at line {line} has the wrong number of fields")
