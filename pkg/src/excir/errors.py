"""Exception hierarchy.

Everything that signals bad user input derives from :class:`InputError`, which
the CLI maps to exit status 2.
"""

from __future__ import annotations


class ExcirError(Exception):
    """Base class for all package errors."""


class InputError(ExcirError, ValueError):
    """Invalid user-supplied data or parameters."""


class InvalidInput(InputError):
    pass


class UnknownColumn(InputError, KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unknown column {self.name!r}"


class UnknownFeature(InputError, KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unknown feature {self.name!r}"


class InvalidGroup(InputError):
    pass


class InvalidWeight(InputError):
    pass


class InvalidK(InputError):
    pass


class InvalidFraction(InputError):
    pass


class DegenerateInput(InputError):
    """A statistic is undefined for the given input (e.g. zero variance)."""


class EmptySketch(InputError):
    pass


class SchemaError(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None, column: str | None = None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class IoError(InputError, OSError):
    pass
