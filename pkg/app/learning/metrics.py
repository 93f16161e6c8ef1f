import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from app.fuzzy.rule_base import INFERENCE_FLOOR, RuleBase
from app.learning.dataset import Dataset

# Configure logging
logger = logging.getLogger(__name__)

# Samples whose activation is carried less than this by supported rules
# are counted as sparse-region samples
COVERAGE_THRESHOLD = 0.5


@dataclass(frozen=True, eq=False)
class ErrorReport:
    """
    Model error over a dataset

    Errors are Y(x') - y'. Unsupported samples (activation below the inference
    floor) have NaN predictions and errors and are excluded from every statistic.
    A statistic with no samples to cover is NaN, and None in the summary.
    """
    rms: float
    max_abs: float
    percent_of_range: float
    per_sample_errors: np.ndarray
    predictions: np.ndarray
    support_fraction: np.ndarray
    unsupported_count: int
    sparse_count: int
    max_abs_covered: float
    percent_of_range_covered: float
    output_span: float

    @property
    def rms_percent(self) -> float:
        return 100.0 * self.rms / self.output_span

    def summary(self) -> dict:
        return {key: _finite_or_none(value) for key, value in self._figures().items()}

    def _figures(self) -> dict:
        return {
            "samples": int(self.per_sample_errors.size),
            "rms": self.rms,
            "rms_percent": self.rms_percent,
            "max_abs": self.max_abs,
            "percent_of_range": self.percent_of_range,
            "max_abs_covered": self.max_abs_covered,
            "percent_of_range_covered": self.percent_of_range_covered,
            "unsupported_samples": self.unsupported_count,
            "sparse_samples": self.sparse_count,
            "output_span": self.output_span,
        }


def _finite_or_none(value):
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def predict(rb: RuleBase, inputs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Batch inference

    Returns:
        Tuple of (predictions with NaN where unsupported, supported-rule share of activation)
    """
    degrees = rb.activation_matrix(inputs)
    totals = degrees.sum(axis=1)
    valid = totals >= INFERENCE_FLOOR

    predictions = np.full(totals.shape, np.nan)
    coverage = np.zeros(totals.shape)
    predictions[valid] = (degrees[valid] @ rb.conclusions) / totals[valid]
    coverage[valid] = (degrees[valid] @ rb.support_flags.astype(float)) / totals[valid]
    return predictions, coverage


def _peak(errors: np.ndarray) -> float:
    return float(np.max(np.abs(errors))) if errors.size else float("nan")


def evaluate(rb: RuleBase, data: Dataset, output_range: Optional[Tuple[float, float]] = None) -> ErrorReport:
    """
    Compare model predictions with dataset targets

    Args:
        rb: Rule base to evaluate
        data: Examples to score
        output_range: Output universe (lo, hi) used for percentages; the target
            range is used when omitted

    Returns:
        ErrorReport over the supported samples
    """
    data.require(rb.input_dim)
    predictions, coverage = predict(rb, data.inputs)
    errors = predictions - data.targets

    valid = ~np.isnan(predictions)
    covered = valid & (coverage >= COVERAGE_THRESHOLD)

    if output_range is None:
        span = float(np.ptp(data.targets))
    else:
        span = float(output_range[1] - output_range[0])
    if span <= 0.0:
        span = 1.0

    unsupported = int((~valid).sum())
    if unsupported:
        logger.debug(f"{unsupported} of {len(data)} samples fall in unsupported regions")
    if not valid.any():
        logger.error("Error evaluating model: no sample activates any rule")

    rms = float(np.sqrt(np.mean(errors[valid] ** 2))) if valid.any() else float("nan")
    max_abs = _peak(errors[valid])
    max_covered = _peak(errors[covered])

    return ErrorReport(
        rms=rms,
        max_abs=max_abs,
        percent_of_range=100.0 * max_abs / span,
        per_sample_errors=errors,
        predictions=predictions,
        support_fraction=coverage,
        unsupported_count=unsupported,
        sparse_count=int((valid & ~covered).sum()),
        max_abs_covered=max_covered,
        percent_of_range_covered=100.0 * max_covered / span,
        output_span=span,
    )
