"""
Discrete-time electro-hydraulic actuator

Commanded motor speed passes through a first-order lag. The pump then drives the
piston through an asymmetric dead-zone characteristic with an optional input
backlash, and the piston position integrates between the two course ends.

    omega   rpm     motor/pump speed
    v       m/s     piston speed
    y       m       piston position, 0 <= y <= course
"""
import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from app.errors import ConfigError
from app.plant.trace import OpenLoopTrace

# Configure logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlantParams:
    dz_neg: float = -700.0
    dz_pos: float = 900.0
    gain_pos: float = 5.0e-5
    gain_neg: float = 4.2e-5
    motor_tau: float = 0.05
    omega_max: float = 3000.0
    course: float = 0.20
    dt: float = 0.01
    hysteresis_band: float = 0.0
    noise_amplitude: float = 0.0
    seed: int = 0
    initial_position: Optional[float] = None

    def __post_init__(self):
        if not self.dz_neg < 0.0 < self.dz_pos:
            raise ConfigError(f"Dead-zone must straddle zero, got [{self.dz_neg}, {self.dz_pos}]")
        if self.gain_pos <= 0.0 or self.gain_neg <= 0.0:
            raise ConfigError("Pump gains must be positive")
        if self.dt <= 0.0 or self.motor_tau <= 0.0:
            raise ConfigError("dt and motor_tau must be positive")
        if self.dt > self.motor_tau:
            raise ConfigError(f"dt ({self.dt}) must not exceed motor_tau ({self.motor_tau})")
        if self.course <= 0.0 or self.omega_max <= 0.0:
            raise ConfigError("course and omega_max must be positive")
        if self.hysteresis_band < 0.0 or self.noise_amplitude < 0.0:
            raise ConfigError("hysteresis_band and noise_amplitude cannot be negative")
        if self.initial_position is not None and not 0.0 <= self.initial_position <= self.course:
            raise ConfigError(f"initial_position must lie within [0, {self.course}]")

    @property
    def start_position(self) -> float:
        return self.course / 2.0 if self.initial_position is None else self.initial_position


@dataclass(frozen=True)
class PlantState:
    """
    Simulator state

    sensed_y and sensed_v are the sensor readings; they differ from y and v
    only when measurement noise is enabled.
    """
    omega: float = 0.0
    v: float = 0.0
    y: float = 0.0
    t: float = 0.0
    backlash: float = 0.0
    sensed_y: float = 0.0
    sensed_v: float = 0.0

    @classmethod
    def initial(cls, params: PlantParams, y: Optional[float] = None, omega: float = 0.0) -> "PlantState":
        position = params.start_position if y is None else y
        return cls(omega=omega, v=0.0, y=position, t=0.0, backlash=omega, sensed_y=position, sensed_v=0.0)


def _backlash(omega: float, memory: float, band: float) -> float:
    half = band / 2.0
    if omega > memory + half:
        return omega - half
    if omega < memory - half:
        return omega + half
    return memory


def pump_characteristic(params: PlantParams, omega: float, memory: float = 0.0) -> Tuple[float, float]:
    """
    Piston speed produced by a pump speed

    Args:
        params: Plant parameters
        omega: Pump speed in rpm
        memory: Backlash output from the previous step (used when hysteresis_band > 0)

    Returns:
        Tuple of (piston speed m/s, updated backlash memory)
    """
    effective = _backlash(omega, memory, params.hysteresis_band) if params.hysteresis_band > 0.0 else omega

    if effective > params.dz_pos:
        v = params.gain_pos * (effective - params.dz_pos)
    elif effective < params.dz_neg:
        v = params.gain_neg * (effective - params.dz_neg)
    else:
        v = 0.0
    return v, effective


def step(state: PlantState, params: PlantParams, omega_ref: float,
         noise: Tuple[float, float] = (0.0, 0.0)) -> PlantState:
    """
    Advance the plant by one dt

    Args:
        state: Current state
        params: Plant parameters
        omega_ref: Commanded motor speed in rpm
        noise: Additive (position, speed) sensor noise for the reported readings

    Returns:
        The next PlantState
    """
    command = float(np.clip(omega_ref, -params.omega_max, params.omega_max))
    omega = state.omega + (params.dt / params.motor_tau) * (command - state.omega)
    omega = float(np.clip(omega, -params.omega_max, params.omega_max))

    v, memory = pump_characteristic(params, omega, state.backlash)
    y = state.y + v * params.dt
    if y > params.course:
        y, v = params.course, 0.0
    elif y < 0.0:
        y, v = 0.0, 0.0

    return PlantState(omega=omega, v=v, y=y, t=state.t + params.dt, backlash=memory,
                      sensed_y=y + noise[0], sensed_v=v + noise[1])


class HydraulicActuator:
    """Stateful plant instance with its own seeded sensor-noise generator"""

    def __init__(self, params: PlantParams, state: Optional[PlantState] = None):
        self.params = params
        self.rng = np.random.default_rng(params.seed)
        self.state = state if state is not None else PlantState.initial(params)
        logger.debug(f"Actuator initialized at y={self.state.y:.4f} m with dt={params.dt}")

    def _noise(self) -> Tuple[float, float]:
        amplitude = self.params.noise_amplitude
        if amplitude <= 0.0:
            return 0.0, 0.0
        sample = self.rng.uniform(-amplitude, amplitude, size=2)
        return float(sample[0]), float(sample[1])

    def step(self, omega_ref: float) -> PlantState:
        self.state = step(self.state, self.params, omega_ref, self._noise())
        return self.state

    def with_dt(self, dt: float) -> "HydraulicActuator":
        return HydraulicActuator(replace(self.params, dt=dt), self.state)


def run_open_loop(params: PlantParams, omega_ref: Sequence[float], state: Optional[PlantState] = None) -> OpenLoopTrace:
    """
    Drive the plant with a speed reference and no position feedback

    Each row holds the state at t together with the command issued at t.
    """
    if len(omega_ref) == 0:
        raise ConfigError("Open-loop speed reference is empty")

    actuator = HydraulicActuator(params, state)
    trace = OpenLoopTrace()
    for command in omega_ref:
        current = actuator.state
        trace.append(current.t, float(command), current.omega, current.sensed_v, current.sensed_y)
        actuator.step(command)

    logger.info(f"Open-loop run of {len(trace)} steps ended at y={actuator.state.y:.4f} m")
    return trace
