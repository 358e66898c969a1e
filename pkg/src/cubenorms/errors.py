"""Exception types shared across the package."""
from __future__ import annotations


class CubeNormsError(Exception):
    """Base class for all package errors."""


class InvalidElementError(CubeNormsError):
    """An element code is outside the group's range."""


class InvalidParameterError(CubeNormsError):
    """A parameter is outside its documented domain."""


class InvalidInputError(CubeNormsError):
    """Inputs are malformed or mutually inconsistent (mismatched domains, bad shapes)."""


class InvalidMajorantError(CubeNormsError):
    """A majorant violates its nonnegativity or normalization requirements."""


class PreconditionError(CubeNormsError):
    """A documented precondition does not hold (e.g. |f| <= nu pointwise)."""


class BudgetExceededError(CubeNormsError):
    """The requested computation exceeds a hard enumeration or memory budget."""


class IntervalTooSmallError(CubeNormsError):
    """The interval length is below the threshold required by the cutoff geometry."""

    def __init__(self, n_min: int, message: str | None = None):
        self.n_min = int(n_min)
        super().__init__(message or f"interval length below required minimum {self.n_min}")


class PrimeSearchError(CubeNormsError):
    """No prime modulus was found in the allowed window."""


class SearchFailureError(CubeNormsError):
    """An optimization loop terminated without producing a usable witness."""
