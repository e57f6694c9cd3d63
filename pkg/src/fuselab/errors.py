"""Exception hierarchy for fuselab."""

from __future__ import annotations


class FuselabError(Exception):
    """Base class for every error raised by fuselab."""


class UnknownLabel(FuselabError, KeyError):
    def __init__(self, label, where: str = "basis"):
        self.label = label
        super().__init__(f"label {label!r} is not in the {where}")

    def __str__(self) -> str:
        return self.args[0]


class NonPositiveMultiplicity(FuselabError, ValueError):
    pass


class UnitLawViolation(FuselabError, ValueError):
    pass


class InvolutionNotInvolutive(FuselabError, ValueError):
    pass


class UnitActionViolation(FuselabError, ValueError):
    pass


class BallOverflow(FuselabError, RuntimeError):
    pass


class NotFinite(FuselabError, ValueError):
    pass


class Reducible(FuselabError, ValueError):
    pass


class ParameterOutOfRange(FuselabError, ValueError):
    pass


class NotAGroup(FuselabError, ValueError):
    pass


class NegativeMultiplicity(FuselabError, ValueError):
    """A graph module recursion produced a negative action constant."""

    def __init__(self, level: int, message: str | None = None):
        self.level = level
        super().__init__(message or f"negative multiplicity at level n={level}")


class Disconnected(FuselabError, ValueError):
    pass


class NotAModule(FuselabError, ValueError):
    pass


class DegenerateWindow(FuselabError, ValueError):
    pass


class DimensionNotRational(FuselabError, ValueError):
    pass


class NegativeCoefficient(FuselabError, ValueError):
    pass


class ZeroElement(FuselabError, ValueError):
    pass


class InvalidMeasure(FuselabError, ValueError):
    pass


class WeightNotPositive(FuselabError, ValueError):
    pass


class NotSymmetricElement(FuselabError, ValueError):
    pass


class InequalityFails(FuselabError):
    """A subinvariance row inequality failed; ``witness`` is the offending label."""

    def __init__(self, witness, lhs, rhs, message: str | None = None):
        self.witness = witness
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(message or f"row {witness}: {lhs} > {rhs}")


class SpecError(FuselabError, ValueError):
    """Problem in a spec file; carries a 1-based line/column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)


class SpecSyntaxError(SpecError):
    pass


class UnknownKey(SpecError):
    pass


class DuplicateRule(SpecError):
    pass


class MultiplicityNotPositiveInteger(SpecError):
    pass


class UnknownCatalogEntry(FuselabError, KeyError):
    def __str__(self) -> str:
        return self.args[0]
