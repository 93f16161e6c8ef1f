import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from app.errors import TrainingError, UnsupportedRegionError
from app.fuzzy.rule_base import RuleBase, normalized_weights, rule_activation, weighted_output
from app.learning.dataset import Dataset, Sample
from app.learning.metrics import ErrorReport, evaluate

# Configure logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    """Gradient tuning settings: learning rate alpha and K full passes"""
    alpha: float
    epochs: int
    shuffle: bool = False
    seed: int = 0

    def __post_init__(self):
        if not self.alpha > 0:
            raise TrainingError(f"Learning rate must be positive, got {self.alpha}")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise TrainingError(f"Epoch count must be an integer >= 1, got {self.epochs}")


@dataclass
class TrainingResult:
    rule_base: RuleBase
    history: List[ErrorReport] = field(default_factory=list)
    skipped: List[int] = field(default_factory=list)

    @property
    def rms_history(self) -> List[float]:
        return [report.rms for report in self.history]


def objective(rb: RuleBase, s: Sample) -> float:
    """Squared error E = 1/2 (Y(x') - y')^2"""
    weights = normalized_weights(rule_activation(rb, s.x), s.x)
    return 0.5 * (weighted_output(weights, rb.conclusions) - s.y) ** 2


def gradient(rb: RuleBase, s: Sample) -> np.ndarray:
    """dE/dw(l) = (Y(x') - y') d(l) / sum d(l) for every rule"""
    weights = normalized_weights(rule_activation(rb, s.x), s.x)
    return (weighted_output(weights, rb.conclusions) - s.y) * weights


def _descend(conclusions: np.ndarray, weights: np.ndarray, target: float, alpha: float) -> np.ndarray:
    # Y is taken before any rule moves, so all rules update together
    error = weighted_output(weights, conclusions) - target
    return conclusions - (alpha * error) * weights


def gradient_step(rb: RuleBase, s: Sample, alpha: float) -> RuleBase:
    """
    One descent step on a single example

    Raises:
        UnsupportedRegionError: when no rule is active at s.x; the rule base is left as is
    """
    weights = normalized_weights(rule_activation(rb, s.x), s.x)
    return rb.with_conclusions(_descend(rb.conclusions, weights, s.y, alpha))


def _sample_weights(rb: RuleBase, data: Dataset) -> Tuple[np.ndarray, np.ndarray]:
    """Normalised activations per sample, computed the same way gradient_step does"""
    weights = np.zeros((len(data), rb.rule_count))
    valid = np.zeros(len(data), dtype=bool)
    for k in range(len(data)):
        try:
            weights[k] = normalized_weights(rule_activation(rb, data.inputs[k]), data.inputs[k])
            valid[k] = True
        except UnsupportedRegionError as e:
            logger.debug(f"Skipping sample {k}: {str(e)}")
    return weights, valid


def train_epochs(rb: RuleBase, data: Dataset, cfg: TrainConfig) -> TrainingResult:
    """
    K sequential passes of gradient_step over the dataset

    Args:
        rb: Initial rule base (usually from cluster_init)
        data: Training examples, applied in order unless cfg.shuffle is set
        cfg: Learning rate and number of epochs

    Returns:
        TrainingResult with the tuned rule base, post-epoch training reports and
        the number of samples skipped per epoch
    """
    data.require(rb.input_dim)
    weights, valid = _sample_weights(rb, data)
    skipped = int((~valid).sum())
    if skipped:
        logger.warning(f"{skipped} training samples lie in unsupported regions and will be skipped")

    rng = np.random.default_rng(cfg.seed)
    conclusions = np.array(rb.conclusions, dtype=float)
    targets = data.targets
    result = TrainingResult(rule_base=rb)

    for epoch in range(int(cfg.epochs)):
        order = rng.permutation(len(data)) if cfg.shuffle else range(len(data))
        for k in order:
            if valid[k]:
                conclusions = _descend(conclusions, weights[k], targets[k], cfg.alpha)

        result.rule_base = rb.with_conclusions(conclusions)
        report = evaluate(result.rule_base, data)
        result.history.append(report)
        result.skipped.append(skipped)
        logger.info(f"Epoch {epoch + 1}/{cfg.epochs}: training RMS {report.rms:.6g}")

    return result
