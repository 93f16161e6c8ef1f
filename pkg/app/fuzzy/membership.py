import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple, Union

import numpy as np

from app.errors import PartitionError

# Configure logging
logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class MembershipKind(str, Enum):
    GAUSSIAN = "gaussian"
    TRIANGULAR = "triangular"


def _evaluate(kind: MembershipKind, center, width, amplitude, x):
    """Vectorised membership degree; broadcasting over x and the parameters"""
    if kind is MembershipKind.GAUSSIAN:
        z = (x - center) / width
        return amplitude * np.exp(-0.5 * z * z)
    return np.maximum(0.0, 1.0 - np.abs(x - center) / width)


@dataclass(frozen=True)
class MembershipFunction:
    """
    One antecedent fuzzy set

    Gaussian sets use a*exp(-1/2((x-b)/c)^2); triangular sets are symmetric
    with half-base c. The amplitude is fixed at 1.0.
    """
    kind: MembershipKind
    center: float
    width: float
    amplitude: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", MembershipKind(self.kind))
        if not np.isfinite(self.center):
            raise PartitionError(f"Membership center must be finite, got {self.center}")
        if not (self.width > 0 and np.isfinite(self.width)):
            raise PartitionError(f"Membership width must be positive, got {self.width}")
        if self.amplitude != 1.0:
            raise PartitionError(f"Membership amplitude is fixed at 1.0, got {self.amplitude}")

    def degree(self, x: ArrayLike) -> ArrayLike:
        value = _evaluate(self.kind, self.center, self.width, self.amplitude, np.asarray(x, dtype=float))
        return float(value) if np.ndim(value) == 0 else value


def membership(mf: MembershipFunction, x: ArrayLike) -> ArrayLike:
    """Degree of x in mf; defined for every real x, no universe clamping"""
    return mf.degree(x)


@dataclass(frozen=True)
class Partition:
    """Uniform grid of fuzzy sets over one variable's universe of discourse"""
    variable_name: str
    lo: float
    hi: float
    functions: Tuple[MembershipFunction, ...]
    _centers: np.ndarray = field(init=False, repr=False, compare=False)
    _widths: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        functions = tuple(self.functions)
        object.__setattr__(self, "functions", functions)

        if not self.lo < self.hi:
            raise PartitionError(f"Partition '{self.variable_name}' needs lo < hi, got [{self.lo}, {self.hi}]")
        if len(functions) < 2:
            raise PartitionError(f"Partition '{self.variable_name}' needs at least 2 sets, got {len(functions)}")
        if len({mf.kind for mf in functions}) != 1:
            raise PartitionError(f"Partition '{self.variable_name}' mixes membership kinds")

        centers = np.array([mf.center for mf in functions], dtype=float)
        widths = np.array([mf.width for mf in functions], dtype=float)
        if np.any(np.diff(centers) <= 0):
            raise PartitionError(f"Partition '{self.variable_name}' centers must be strictly increasing")

        # Uniform grid pinned to the universe bounds
        span = self.hi - self.lo
        expected = np.linspace(self.lo, self.hi, len(functions))
        if np.max(np.abs(centers - expected)) > 1e-9 * span:
            raise PartitionError(f"Partition '{self.variable_name}' centers are not a uniform grid over [{self.lo}, {self.hi}]")

        centers.setflags(write=False)
        widths.setflags(write=False)
        object.__setattr__(self, "_centers", centers)
        object.__setattr__(self, "_widths", widths)

    @property
    def size(self) -> int:
        return len(self.functions)

    @property
    def kind(self) -> MembershipKind:
        return self.functions[0].kind

    @property
    def centers(self) -> np.ndarray:
        return self._centers

    @property
    def widths(self) -> np.ndarray:
        return self._widths

    def degrees(self, x: float) -> np.ndarray:
        """Membership of a scalar in every set of the partition, shape (n,)"""
        return _evaluate(self.kind, self._centers, self._widths, 1.0, float(x))

    def degree_matrix(self, xs: np.ndarray) -> np.ndarray:
        """Membership of many values at once, shape (len(xs), n)"""
        xs = np.asarray(xs, dtype=float).reshape(-1, 1)
        return _evaluate(self.kind, self._centers[None, :], self._widths[None, :], 1.0, xs)


def make_uniform_partition(name: str,
                           lo: float,
                           hi: float,
                           n: int,
                           kind: Union[MembershipKind, str] = MembershipKind.GAUSSIAN,
                           width_fraction: float = 0.6) -> Partition:
    """
    Build n evenly spaced fuzzy sets over [lo, hi]

    Args:
        name: Variable label
        lo: Lower bound of the universe (first center)
        hi: Upper bound of the universe (last center)
        n: Number of sets, at least 2
        kind: gaussian or triangular
        width_fraction: Set width as a fraction of the center spacing, in (0, 2]

    Returns:
        Partition with widths width_fraction * (hi - lo) / (n - 1)
    """
    if int(n) != n or n < 2:
        raise PartitionError(f"Partition '{name}' needs an integer count >= 2, got {n}")
    if not lo < hi:
        raise PartitionError(f"Partition '{name}' needs lo < hi, got [{lo}, {hi}]")
    if not 0.0 < width_fraction <= 2.0:
        raise PartitionError(f"Partition '{name}' width fraction must be in (0, 2], got {width_fraction}")

    kind = MembershipKind(kind)
    n = int(n)
    spacing = (hi - lo) / (n - 1)
    width = width_fraction * spacing
    centers = np.linspace(lo, hi, n)
    functions = tuple(MembershipFunction(kind=kind, center=float(b), width=width) for b in centers)
    logger.debug(f"Built {kind.value} partition '{name}' with {n} sets over [{lo}, {hi}], width {width:.6g}")
    return Partition(variable_name=name, lo=float(lo), hi=float(hi), functions=functions)
