"""
Feedback-error-learning position control

The proportional loop commands omega_p = kp*(y_ref - y). The fuzzy inverse model
adds omega_comp = h(y_ref, y, v), and the plant receives omega_ref = omega_p + omega_comp.
When learning is on, every rule conclusion moves by
update_sign * alpha * omega_p * d(l)/sum d(l), using the activation of the
condition that produced the command.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from app.errors import ConfigError, DivergenceError, ModelFileError, UnsupportedRegionError
from app.fuzzy.rule_base import RuleBase, infer, normalized_weights, rule_activation, weighted_output
from app.plant.simulator import HydraulicActuator, PlantParams, PlantState
from app.plant.trace import Trace

# Configure logging
logger = logging.getLogger(__name__)

# Antecedent order the compensator feeds to the model
CONDITION_ORDER = ("y_ref", "y", "v")


@dataclass(frozen=True)
class ControllerConfig:
    kp: float = 30000.0
    alpha: float = 0.0
    learning_enabled: bool = False
    compensation_enabled: bool = True
    update_sign: int = 1
    update_interval: int = 1
    divergence_limit: Optional[float] = None

    def __post_init__(self):
        if self.kp <= 0.0:
            raise ConfigError(f"kp must be positive, got {self.kp}")
        if self.alpha < 0.0:
            raise ConfigError(f"alpha cannot be negative, got {self.alpha}")
        if self.update_sign not in (1, -1):
            raise ConfigError(f"update_sign must be +1 or -1, got {self.update_sign}")
        if self.update_interval < 1:
            raise ConfigError(f"update_interval must be at least 1, got {self.update_interval}")


class ControlTrace(Trace):
    COLUMNS = ("t", "y_ref", "y", "v", "omega_p", "omega_comp", "omega_ref", "omega", "error")


@dataclass(frozen=True)
class ControlRow:
    t: float
    y_ref: float
    y: float
    v: float
    omega_p: float
    omega_comp: float
    omega_ref: float
    omega: float
    error: float
    supported: bool = True
    learned: bool = False

    def values(self) -> Tuple[float, ...]:
        return (self.t, self.y_ref, self.y, self.v, self.omega_p, self.omega_comp,
                self.omega_ref, self.omega, self.error)


@dataclass
class ControlResult:
    trace: ControlTrace
    rule_base: Optional[RuleBase]
    unsupported_steps: int = 0
    updates: int = 0
    final_state: Optional[PlantState] = field(default=None)


def check_condition_order(rb: RuleBase) -> None:
    """Raise unless the model's antecedents are (y_ref, y, v) in that order"""
    if rb.variable_names != CONDITION_ORDER:
        raise ModelFileError(f"Compensation needs antecedents {CONDITION_ORDER}, model has {rb.variable_names}")


def p_controller(cfg: ControllerConfig, y_ref: float, y: float) -> float:
    return cfg.kp * (y_ref - y)


def compensation(rb: RuleBase, y_ref: float, v: float, y: float, weights: Optional[np.ndarray] = None) -> float:
    """
    Inverse-model feedforward; 0 where the model has no active rule

    weights, when given, are the normalized activations of (y_ref, y, v) already
    computed by the caller.
    """
    if weights is not None:
        return weighted_output(weights, rb.conclusions)
    try:
        return infer(rb, (y_ref, y, v))
    except UnsupportedRegionError as e:
        logger.debug(f"Compensation falls back to 0: {str(e)}")
        return 0.0


def control_step(plant: HydraulicActuator, rb: Optional[RuleBase], cfg: ControllerConfig, y_ref: float,
                 tick: int = 0) -> Tuple[PlantState, RuleBase, ControlRow]:
    """
    One control cycle: sense, command, actuate, then adapt

    Args:
        plant: Actuator to drive; its state advances by one dt
        rb: Inverse model with antecedents (y_ref, y, v); may be None for P-only control
        cfg: Controller settings
        y_ref: Position reference for this tick
        tick: Tick counter, used with cfg.update_interval

    Returns:
        Tuple of (new plant state, possibly updated rule base, trace row for the pre-step instant)
    """
    sensed = plant.state
    y, v = sensed.sensed_y, sensed.sensed_v
    condition = (y_ref, y, v)

    omega_p = p_controller(cfg, y_ref, y)
    weights = None
    needs_model = cfg.compensation_enabled or cfg.learning_enabled
    if needs_model:
        if rb is None:
            raise ConfigError("Compensation and learning need an inverse model")
        try:
            weights = normalized_weights(rule_activation(rb, condition), condition)
        except UnsupportedRegionError as e:
            logger.debug(f"Unsupported region at t={sensed.t:.3f}s: {str(e)}")

    omega_comp = 0.0
    if cfg.compensation_enabled and weights is not None:
        omega_comp = compensation(rb, y_ref, v, y, weights)
    omega_ref = omega_p + omega_comp

    new_state = plant.step(omega_ref)

    learned = False
    learn_now = cfg.learning_enabled and tick % cfg.update_interval == 0
    if learn_now and weights is not None and omega_p != 0.0:
        conclusions = rb.conclusions + (cfg.update_sign * cfg.alpha * omega_p) * weights
        limit = cfg.divergence_limit if cfg.divergence_limit is not None else 10.0 * plant.params.omega_max
        worst = int(np.argmax(np.abs(conclusions)))
        if abs(conclusions[worst]) > limit:
            raise DivergenceError(worst, float(conclusions[worst]), limit, sensed.t)
        rb = rb.with_conclusions(conclusions)
        learned = True

    row = ControlRow(t=sensed.t, y_ref=y_ref, y=y, v=v, omega_p=omega_p, omega_comp=omega_comp,
                     omega_ref=omega_ref, omega=sensed.omega, error=y_ref - y,
                     supported=weights is not None or not needs_model, learned=learned)
    return new_state, rb, row


def run_control(params: PlantParams, rb: Optional[RuleBase], cfg: ControllerConfig, y_ref: Sequence[float],
                state: Optional[PlantState] = None) -> ControlResult:
    """
    Closed-loop run over a whole reference signal

    Returns:
        ControlResult with the trace and the (adapted) rule base
    """
    if len(y_ref) == 0:
        raise ConfigError("Reference signal is empty")
    if cfg.compensation_enabled or cfg.learning_enabled:
        if rb is None:
            raise ConfigError("Compensation and learning need an inverse model")
        check_condition_order(rb)

    plant = HydraulicActuator(params, state)
    result = ControlResult(trace=ControlTrace(), rule_base=rb)

    for tick, reference in enumerate(y_ref):
        _, result.rule_base, row = control_step(plant, result.rule_base, cfg, float(reference), tick)
        result.trace.append(*row.values())
        result.updates += int(row.learned)
        result.unsupported_steps += int(not row.supported)

    if result.unsupported_steps:
        logger.warning(f"{result.unsupported_steps} control steps ran in unsupported regions without compensation")
    logger.info(f"Control run of {len(result.trace)} steps finished with {result.updates} rule updates, "
                f"final error {result.trace['error'][-1]:.5f} m")
    result.final_state = plant.state
    return result


def _half_period_windows(t: np.ndarray, period: float, fraction: float):
    dt = t[1] - t[0] if t.size > 1 else 0.0
    half = period / 2.0
    count = int(np.floor((t[-1] + dt) / half + 1e-9))
    for k in range(count):
        end = (k + 1) * half
        window = (t >= end - fraction * half - 1e-9) & (t < end - 1e-9)
        if window.any():
            yield window


def half_period_errors(trace: ControlTrace, period: float, fraction: float = 0.25, signed: bool = False) -> np.ndarray:
    """
    Mean error over the final fraction of every complete half-period

    Args:
        trace: Control trace
        period: Reference period in seconds
        fraction: Tail share of each half-period to average
        signed: Average the signed error instead of |error|

    Returns:
        One value per half-period, in time order
    """
    error = trace["error"] if signed else np.abs(trace["error"])
    return np.asarray([float(error[w].mean()) for w in _half_period_windows(trace["t"], period, fraction)])


def is_non_increasing(values: Sequence[float], allowed_violations: int = 1, tolerance: float = 0.0) -> bool:
    """True when successive values never rise by more than tolerance, bar allowed_violations"""
    rises = np.diff(np.asarray(values, dtype=float)) > tolerance
    return int(rises.sum()) <= allowed_violations
