"""Exception types shared by every package in the toolkit."""
from typing import Optional, Sequence


class NeuroFuzzyError(ValueError):
    """Base class for all domain errors"""


class PartitionError(NeuroFuzzyError):
    """Invalid membership function or partition"""


class DimensionError(NeuroFuzzyError):
    """Condition vector does not match the rule base antecedents"""


class UnsupportedRegionError(NeuroFuzzyError):
    """Rule activation total fell below the inference floor"""

    def __init__(self, x: Sequence[float], total: float):
        self.x = tuple(float(v) for v in x)
        self.total = float(total)
        super().__init__(f"Unsupported region at x={self.x} (activation total {self.total:.3e})")


class DefuzzificationError(NeuroFuzzyError):
    """Discrete fuzzy set cannot be defuzzified"""


class DatasetError(NeuroFuzzyError):
    """Empty dataset or missing columns"""


class TrainingError(NeuroFuzzyError):
    """Invalid training configuration"""


class DivergenceError(NeuroFuzzyError):
    """An online-learned conclusion left the allowed range"""

    def __init__(self, rule: int, value: float, limit: float, t: Optional[float] = None):
        self.rule = rule
        self.value = value
        self.limit = limit
        self.t = t
        where = f" at t={t:.3f}s" if t is not None else ""
        super().__init__(f"Rule {rule} conclusion {value:.1f} exceeds divergence limit {limit:.1f}{where}")


class ModelFileError(NeuroFuzzyError):
    """Malformed model file or incompatible antecedent order"""


class ConfigError(NeuroFuzzyError):
    """Invalid experiment configuration"""
