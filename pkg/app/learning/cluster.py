import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from app.fuzzy.rule_base import RuleBase
from app.learning.dataset import Dataset

# Configure logging
logger = logging.getLogger(__name__)

# Rules whose summed contribution stays below this get no conclusion
SUPPORT_THRESHOLD = 1e-8

# Samples per activation block
_CHUNK = 2048


@dataclass
class ClusterAccumulator:
    """Running Numerator/Denominator sums for every rule at once"""
    numerator: np.ndarray
    denominator: np.ndarray

    @classmethod
    def zeros(cls, rule_count: int) -> "ClusterAccumulator":
        return cls(numerator=np.zeros(rule_count), denominator=np.zeros(rule_count))

    def add(self, degrees: np.ndarray, targets: np.ndarray) -> None:
        """
        Accumulate contributions S1 = prod(mu) and S2 = y'*S1

        Args:
            degrees: Activation block, shape (samples, rules)
            targets: Output values y', shape (samples,)
        """
        self.numerator += targets @ degrees
        self.denominator += degrees.sum(axis=0)

    def conclusions(self, threshold: float = SUPPORT_THRESHOLD) -> Tuple[np.ndarray, np.ndarray]:
        supported = self.denominator >= threshold
        omega = np.zeros_like(self.numerator)
        omega[supported] = self.numerator[supported] / self.denominator[supported]
        return omega, supported


def cluster_init(structure: RuleBase, data: Dataset, threshold: float = SUPPORT_THRESHOLD) -> RuleBase:
    """
    Initialise every conclusion as the activation-weighted mean of the targets

    One pass over the samples updates all rules together. Rules whose
    denominator stays below the threshold keep w = 0 and are flagged unsupported.
    """
    data.require(structure.input_dim)

    accumulator = ClusterAccumulator.zeros(structure.rule_count)
    for start in range(0, len(data), _CHUNK):
        block = slice(start, start + _CHUNK)
        accumulator.add(structure.activation_matrix(data.inputs[block]), data.targets[block])

    omega, supported = accumulator.conclusions(threshold)
    unsupported = int((~supported).sum())
    logger.info(f"Cluster initialization over {len(data)} samples: "
                f"{structure.rule_count - unsupported}/{structure.rule_count} rules supported")
    if unsupported:
        logger.warning(f"{unsupported} rules have no supporting data and default to 0")
    return structure.with_conclusions(omega, supported)
