import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from app.errors import DimensionError, PartitionError, UnsupportedRegionError
from app.fuzzy.membership import Partition

# Configure logging
logger = logging.getLogger(__name__)

# Activation totals below this are treated as "no rule applies"
INFERENCE_FLOOR = 1e-300

INDEX_CONVENTION = "first-antecedent-fastest"


def _readonly(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ActivationVector:
    """Per-rule activation degrees d(l) and their sum b"""
    degrees: np.ndarray
    total: float

    def normalized(self) -> np.ndarray:
        """Degrees divided by their total, d(l)/b"""
        return self.degrees / self.total

    @property
    def supported(self) -> bool:
        return self.total >= INFERENCE_FLOOR


@dataclass(frozen=True, eq=False)
class RuleBase:
    """
    Grid rule base with singleton conclusions

    Rule l combines set i_j of every antecedent j, with
    l = i_1 + n_1*(i_2 + n_2*(i_3 + ...)), so the first antecedent varies fastest.
    """
    antecedents: Tuple[Partition, ...]
    conclusions: np.ndarray
    support_flags: np.ndarray = field(default=None)

    def __post_init__(self):
        antecedents = tuple(self.antecedents)
        if not antecedents:
            raise PartitionError("A rule base needs at least one antecedent")
        object.__setattr__(self, "antecedents", antecedents)

        rule_count = int(np.prod([p.size for p in antecedents]))
        conclusions = _readonly(self.conclusions, float).reshape(-1)
        if conclusions.size != rule_count:
            raise PartitionError(f"Expected {rule_count} conclusions for partitions {self.shape}, got {conclusions.size}")
        object.__setattr__(self, "conclusions", conclusions)

        flags = np.ones(rule_count, dtype=bool) if self.support_flags is None else self.support_flags
        flags = _readonly(flags, bool).reshape(-1)
        if flags.size != rule_count:
            raise PartitionError(f"Expected {rule_count} support flags, got {flags.size}")
        object.__setattr__(self, "support_flags", flags)

    @classmethod
    def structure(cls, antecedents: Sequence[Partition]) -> "RuleBase":
        """Rule base with every conclusion at zero"""
        count = int(np.prod([p.size for p in antecedents]))
        return cls(antecedents=tuple(antecedents), conclusions=np.zeros(count))

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(p.size for p in self.antecedents)

    @property
    def input_dim(self) -> int:
        return len(self.antecedents)

    @property
    def rule_count(self) -> int:
        return self.conclusions.size

    @property
    def variable_names(self) -> Tuple[str, ...]:
        return tuple(p.variable_name for p in self.antecedents)

    def rule_index(self, indices: Sequence[int]) -> int:
        """Rule number for one set index per antecedent"""
        return int(np.ravel_multi_index(tuple(indices), self.shape, order="F"))

    def set_indices(self, rule: int) -> Tuple[int, ...]:
        """Set index per antecedent for a rule number"""
        return tuple(int(i) for i in np.unravel_index(rule, self.shape, order="F"))

    def with_conclusions(self, conclusions: np.ndarray, support_flags: Optional[np.ndarray] = None) -> "RuleBase":
        flags = self.support_flags if support_flags is None else support_flags
        return RuleBase(antecedents=self.antecedents, conclusions=conclusions, support_flags=flags)

    def activation_matrix(self, inputs: np.ndarray) -> np.ndarray:
        """
        Activation degrees for many condition vectors

        Args:
            inputs: Array of shape (samples, m)

        Returns:
            Array of shape (samples, rules) using the rule index convention
        """
        inputs = np.asarray(inputs, dtype=float)
        if inputs.ndim != 2 or inputs.shape[1] != self.input_dim:
            raise DimensionError(f"Expected condition vectors of length {self.input_dim}, got shape {inputs.shape}")

        degrees = self.antecedents[0].degree_matrix(inputs[:, 0])
        for j in range(1, self.input_dim):
            memberships = self.antecedents[j].degree_matrix(inputs[:, j])
            # new index = old index + (rules so far) * i_j
            degrees = (memberships[:, :, None] * degrees[:, None, :]).reshape(inputs.shape[0], -1)
        return degrees


def _condition(rb: RuleBase, x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != rb.input_dim:
        raise DimensionError(f"Expected a condition vector of length {rb.input_dim}, got {x.size}")
    return x


def rule_activation(rb: RuleBase, x: Sequence[float]) -> ActivationVector:
    """Product-inference activation of every rule for one condition vector"""
    x = _condition(rb, x)
    degrees = rb.activation_matrix(x[None, :])[0]
    degrees.setflags(write=False)
    return ActivationVector(degrees=degrees, total=float(degrees.sum()))


def normalized_weights(activation: ActivationVector, x: Sequence[float]) -> np.ndarray:
    """d(l)/sum d(l), or UnsupportedRegionError when the total is below the floor"""
    if not activation.supported:
        raise UnsupportedRegionError(x, activation.total)
    return activation.normalized()


def weighted_output(weights: np.ndarray, conclusions: np.ndarray) -> float:
    return float(weights @ conclusions)


def infer(rb: RuleBase, x: Sequence[float]) -> float:
    """Singleton centroid Y = sum d(l)*w(l) / sum d(l)"""
    x = _condition(rb, x)
    weights = normalized_weights(rule_activation(rb, x), x)
    return weighted_output(weights, rb.conclusions)
