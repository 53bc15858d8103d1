"""
Exception hierarchy for gysin.

Every domain failure raises a subclass of GysinError. The optional
``location`` dict names where the failing invariant was detected
(degree, position, slot, square, ...); the CLI prints it and exits 1.
"""
from typing import Any, Dict, Optional


class GysinError(Exception):
    """Base class for all domain errors."""

    def __init__(self, message: str, location: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.location = dict(location or {})

    def __str__(self) -> str:
        if not self.location:
            return self.message
        where = ", ".join(f"{key}={value}" for key, value in self.location.items())
        return f"{self.message} ({where})"


class BadParams(GysinError):
    """Invalid parameters for a constructor or generator."""


class InvalidMatrix(GysinError):
    """Malformed matrix data: indices out of range or duplicate entries."""


class NotASublattice(GysinError):
    """A vector or denominator column does not lie in the numerator lattice."""


class RingMismatch(GysinError):
    """Operands live over different coefficient rings."""


class InvalidComplex(GysinError):
    """Shapes are inconsistent or the differential does not square to zero."""


class DSquaredNonzero(InvalidComplex):
    """An assembled differential squares to a nonzero map; location names a witness."""


class InvalidChainMap(GysinError):
    """A map of graded modules fails the chain condition or has the wrong shape."""


class ExactnessFailure(GysinError):
    """A short or long sequence fails to be exact."""


class NotAMorphism(GysinError):
    """Maps between short exact sequences do not commute."""


class InvalidFiltration(GysinError):
    """The differential (or a map) raises filtration level, or levels are malformed."""


class NotAHomotopy(GysinError):
    """f - g differs from dK + Kd."""


class OrderTooHigh(GysinError):
    """A homotopy exceeds the permitted filtered order."""


class SubcomplexViolation(GysinError):
    """Minus orbits are not closed under the differential."""


class Contradiction(GysinError):
    """Inconsistent partial data given to the exact-sequence solver."""


class MismatchReport(GysinError):
    """Two independent computations that must agree did not."""


class DocumentError(GysinError):
    """A JSON document failed schema validation or could not be decoded."""
