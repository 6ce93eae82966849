"""Exception types shared across the package."""

from __future__ import annotations


class IsolatticeError(Exception):
    """Base class for all domain errors raised by this package."""


class DimensionMismatchError(IsolatticeError):
    pass


class RankDeficientError(IsolatticeError):
    pass


class SingularMatrixError(IsolatticeError):
    pass


class NotOverBaseError(IsolatticeError):
    """The lattice does not contain the base lattice."""


class NotStableError(IsolatticeError):
    """Conjugation produced an entry with the working prime in its denominator."""


class InsufficientPrecisionError(IsolatticeError):
    """The element is not known to enough digits to determine the output."""


class UnsatisfiableFamilyError(IsolatticeError):
    """The matrix family's constraints admit no solution."""


class InvalidTypeVectorError(IsolatticeError):
    """A polarization type vector violates the divisibility chain."""


class NotAPolarizationLatticeError(IsolatticeError):
    """The inverse matrix is not an antisymmetric integral form with paired invariants."""


class NoPushforwardError(IsolatticeError):
    """No pushforward exists; ``reason`` is ``"not-isotropic"`` or ``"undecided"``."""

    def __init__(self, reason: str, message: str | None = None):
        super().__init__(message or f"no pushforward: {reason}")
        self.reason = reason


class UnsupportedPolarizationTypeError(IsolatticeError):
    """Isotropy testing is only implemented for principal forms (or cyclic kernels)."""


class UnknownScenarioError(IsolatticeError):
    pass


class WireParseError(IsolatticeError):
    """Invalid wire document; carries position information when available."""

    def __init__(self, reason: str, line: int | None = None,
                 column: int | None = None, path: str | None = None):
        where = ""
        if line is not None:
            where = f" at line {line}, column {column}"
        elif path:
            where = f" at {path}"
        super().__init__(f"{reason}{where}")
        self.reason = reason
        self.line = line
        self.column = column
        self.path = path
