"""Result containers shared by the norm computations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover
    from .boxnorms import DualFamily

METHOD_DIRECT = "direct-enumeration"
METHOD_RECURSIVE = "recursive-derivative"
METHOD_FOURIER = "fourier-fast-path"
METHOD_LIFTED = "lifted-tensor"
METHOD_CONTRACTION = "grid-contraction"

KNOWN_METHODS = (
    METHOD_DIRECT,
    METHOD_RECURSIVE,
    METHOD_FOURIER,
    METHOD_LIFTED,
    METHOD_CONTRACTION,
)


@dataclass(frozen=True)
class NormResult:
    """Value of a norm computation plus how it was obtained.

    cost counts elementary multiply-adds performed by the chosen path; it is
    informational and not part of any numerical contract.
    """

    value: float
    method: str
    cost: int

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "cost", int(self.cost))


@dataclass(frozen=True)
class WeakNormEstimate:
    """Certified lower bound for a sup-over-families norm.

    lower_bound is the correlation achieved by witness; exact is True only when
    the search provably covered the whole family space.
    """

    lower_bound: float
    witness: "DualFamily"
    exact: bool
    cost: int = 0

    def __post_init__(self):
        object.__setattr__(self, "lower_bound", float(self.lower_bound))
