"""Classical defuzzifiers for discrete (quantised) fuzzy outputs."""
from dataclasses import dataclass

import numpy as np

from app.errors import DefuzzificationError

# Degrees within this band of the maximum count as maxima
TIE_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class DiscreteFuzzySet:
    supports: np.ndarray
    degrees: np.ndarray

    def __post_init__(self):
        supports = np.array(self.supports, dtype=float).reshape(-1)
        degrees = np.array(self.degrees, dtype=float).reshape(-1)
        if supports.size == 0:
            raise DefuzzificationError("A discrete fuzzy set needs at least one entry")
        if supports.size != degrees.size:
            raise DefuzzificationError(f"Got {supports.size} supports but {degrees.size} degrees")
        if np.any(degrees < 0.0) or np.any(degrees > 1.0):
            raise DefuzzificationError("Membership degrees must lie in [0, 1]")
        supports.setflags(write=False)
        degrees.setflags(write=False)
        object.__setattr__(self, "supports", supports)
        object.__setattr__(self, "degrees", degrees)

    def maxima(self) -> np.ndarray:
        peak = self.degrees.max()
        return self.supports[self.degrees >= peak - TIE_TOLERANCE]


def defuzz_max_criterion(s: DiscreteFuzzySet) -> float:
    """Support with the largest degree; ties go to the smallest support"""
    return float(s.maxima().min())


def defuzz_mean_of_max(s: DiscreteFuzzySet) -> float:
    """Mean of every support attaining the maximum degree"""
    return float(s.maxima().mean())


def defuzz_center_of_area(s: DiscreteFuzzySet) -> float:
    """Centre of gravity sum(mu*w)/sum(mu)"""
    mass = s.degrees.sum()
    if mass <= 0.0:
        raise DefuzzificationError("Center of area is undefined when every degree is zero")
    return float((s.degrees * s.supports).sum() / mass)
