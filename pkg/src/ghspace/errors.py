"""Exception hierarchy shared by all ghspace modules."""

from __future__ import annotations


class GhspaceError(Exception):
    """Base class for every error raised by this package."""


# -- validation ---------------------------------------------------------------

class ValidationError(GhspaceError, ValueError):
    """A raw matrix is not a distance matrix."""


class NotSquare(ValidationError):
    def __init__(self, shape):
        self.shape = tuple(shape)
        super().__init__(f"matrix is not square: shape {self.shape}")


class NotFinite(ValidationError):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"entry ({i},{j}) is not a finite real")


class NonZeroDiagonal(ValidationError):
    def __init__(self, i: int):
        self.i = i
        super().__init__(f"diagonal entry ({i},{i}) is not zero")


class NotSymmetric(ValidationError):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"d[{i}][{j}] != d[{j}][{i}]")


class NegativeOrZeroOffDiagonal(ValidationError):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"off-diagonal entry ({i},{j}) is not positive")


class TriangleViolation(ValidationError):
    def __init__(self, i: int, j: int, k: int, deficit: float):
        self.i, self.j, self.k = i, j, k
        self.deficit = deficit
        super().__init__(
            f"triangle inequality fails: d({i},{j}) exceeds d({i},{k}) + d({k},{j}) "
            f"by {deficit:.12g}"
        )


# -- domain preconditions -----------------------------------------------------

class SinglePoint(GhspaceError, ValueError):
    def __init__(self, what: str = "operation"):
        super().__init__(f"{what} needs at least two points")


class TooFewPoints(GhspaceError, ValueError):
    def __init__(self, needed: int, got: int):
        self.needed, self.got = needed, got
        super().__init__(f"need at least {needed} points, got {got}")


class CardinalityMismatch(GhspaceError, ValueError):
    def __init__(self, n: int, m: int):
        self.n, self.m = n, m
        super().__init__(f"spaces have different cardinalities ({n} vs {m})")


class IndexOutOfRange(GhspaceError, IndexError):
    pass


class NotACorrespondence(GhspaceError, ValueError):
    pass


class EmptySubset(GhspaceError, ValueError):
    pass


class NotIsometricEmbedding(GhspaceError, ValueError):
    def __init__(self, part: int, y1: int, y2: int):
        self.part, self.y1, self.y2 = part, y1, y2
        super().__init__(
            f"embedding of part {part} does not preserve the distance between "
            f"points {y1} and {y2}"
        )


class BudgetExceeded(GhspaceError):
    """Search stopped at its node limit; ``result`` holds the certified interval."""

    def __init__(self, result):
        self.result = result
        super().__init__(
            f"node budget exhausted; d_GH in [{result.lower:.12g}, {result.upper:.12g}]"
        )


class EpsTooLarge(GhspaceError, ValueError):
    def __init__(self, eps: float, bound: float):
        self.eps, self.bound = eps, bound
        super().__init__(f"eps={eps:.12g} must be smaller than the codiameter {bound:.12g}")


class SizeOverflow(GhspaceError, ValueError):
    pass


class RejectionBudgetExceeded(GhspaceError):
    pass


class WindowTooSmall(GhspaceError, ValueError):
    pass


class ParseError(GhspaceError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")
