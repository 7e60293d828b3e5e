"""Exception hierarchy shared by all groupwl modules."""

from __future__ import annotations


class GroupWLError(Exception):
    """Base class for every error raised by groupwl."""


class ValidationError(GroupWLError):
    """A multiplication table violates a group axiom."""

    def __init__(self, message: str, cell: tuple[int, ...] | None = None):
        super().__init__(message)
        self.cell = cell


class NotClosed(ValidationError):
    pass


class NoIdentityAtZero(ValidationError):
    pass


class NotAssociative(ValidationError):
    pass


class MissingInverse(ValidationError):
    pass


class ParseError(GroupWLError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where = f" ({where})"
        super().__init__(message + where)
        self.line = line
        self.column = column


class NotNormal(GroupWLError):
    pass


class NotCentral(GroupWLError):
    pass


class NotIsomorphism(GroupWLError):
    pass


class NotNilpotent(GroupWLError):
    pass


class AbelianInput(GroupWLError):
    pass


class CapExceeded(GroupWLError):
    pass


class TooLarge(GroupWLError):
    pass


class Timeout(GroupWLError):
    pass


class BudgetExceeded(GroupWLError):
    pass


class DimensionTooSmall(GroupWLError):
    pass


class ArityTooLarge(GroupWLError):
    pass


class DecompositionMismatch(GroupWLError):
    pass
