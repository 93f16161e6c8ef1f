"""
Experiment configuration

A TOML file validated into pydantic models. Every constant an experiment
depends on lives in the file; the models only carry fallbacks.
"""
import logging
import os
import sys
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.control.fel import ControllerConfig
from app.errors import ConfigError
from app.fuzzy.membership import MembershipKind, Partition, make_uniform_partition
from app.learning.gradient import TrainConfig
from app.plant.simulator import PlantParams

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

# Load environment variables
load_dotenv()

# Configure logging
logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "configs/experiment.toml"
DEFAULT_OUTPUT_DIR = "runs"

CONTROL_MODES = ("p-only", "comp", "comp-learn-slow", "comp-learn-fast")

# Antecedent order and target column per model relation
RELATIONS = {
    "inverse": (("y_ref", "y", "v"), "omega"),
    "direct": (("y_ref", "omega", "v"), "y"),
}


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PlantSection(_Section):
    dz_neg: float = -700.0
    dz_pos: float = 900.0
    gain_pos: float = Field(5.0e-5, gt=0)
    gain_neg: float = Field(4.2e-5, gt=0)
    motor_tau: float = Field(0.05, gt=0)
    omega_max: float = Field(3000.0, gt=0)
    course: float = Field(0.20, gt=0)
    dt: float = Field(0.01, gt=0)
    hysteresis_band: float = Field(0.0, ge=0)
    noise_amplitude: float = Field(0.0, ge=0)
    initial_position: Optional[float] = None

    def to_params(self, seed: int = 0, dt: Optional[float] = None) -> PlantParams:
        values = self.model_dump()
        if dt is not None:
            values["dt"] = dt
        return PlantParams(seed=seed, **values)


class ControllerSection(_Section):
    kp: float = Field(30000.0, gt=0)
    update_sign: Literal[1, -1] = 1
    update_interval: int = Field(1, ge=1)
    dt: Optional[float] = Field(None, gt=0)
    slow_alpha: float = Field(0.0005, ge=0)
    fast_alpha: float = Field(0.02, ge=0)
    divergence_limit: Optional[float] = Field(None, gt=0)

    def for_mode(self, mode: str) -> ControllerConfig:
        """
        Controller settings for one of the four control experiments

        Args:
            mode: p-only, comp, comp-learn-slow or comp-learn-fast

        Returns:
            ControllerConfig with compensation and learning switched for the mode
        """
        if mode not in CONTROL_MODES:
            raise ConfigError(f"Unknown control mode '{mode}', expected one of {', '.join(CONTROL_MODES)}")
        alpha = {"comp-learn-slow": self.slow_alpha, "comp-learn-fast": self.fast_alpha}.get(mode, 0.0)
        return ControllerConfig(
            kp=self.kp,
            alpha=alpha,
            learning_enabled=mode.startswith("comp-learn"),
            compensation_enabled=mode != "p-only",
            update_sign=self.update_sign,
            update_interval=self.update_interval,
            divergence_limit=self.divergence_limit,
        )


class PartitionSpec(_Section):
    name: str
    lo: float
    hi: float
    count: int = Field(ge=2)
    kind: MembershipKind = MembershipKind.GAUSSIAN
    width_fraction: float = Field(0.6, gt=0, le=2)

    @model_validator(mode="after")
    def _check_universe(self) -> "PartitionSpec":
        if not self.lo < self.hi:
            raise ValueError(f"partition '{self.name}' needs lo < hi")
        return self

    def build(self) -> Partition:
        return make_uniform_partition(self.name, self.lo, self.hi, self.count, self.kind, self.width_fraction)


class ModelSection(_Section):
    relation: Literal["inverse", "direct"] = "inverse"
    partitions: List[PartitionSpec]
    output_lo: float = -3000.0
    output_hi: float = 3000.0

    @model_validator(mode="after")
    def _check_order(self) -> "ModelSection":
        names = tuple(p.name for p in self.partitions)
        if names != self.input_columns:
            raise ValueError(f"{self.relation} model needs partitions {self.input_columns} in that order, got {names}")
        if not self.output_lo < self.output_hi:
            raise ValueError("model output_lo must be below output_hi")
        return self

    @property
    def input_columns(self) -> Tuple[str, ...]:
        return RELATIONS[self.relation][0]

    @property
    def target_column(self) -> str:
        return RELATIONS[self.relation][1]

    def build_partitions(self) -> Tuple[Partition, ...]:
        return tuple(p.build() for p in self.partitions)


class TrainSection(_Section):
    alpha: float = Field(0.8, gt=0)
    # 0 keeps the cluster initialisation as the final model
    epochs: int = Field(50, ge=0)
    shuffle: bool = False

    def to_train_config(self, seed: int = 0) -> Optional[TrainConfig]:
        if self.epochs == 0:
            return None
        return TrainConfig(alpha=self.alpha, epochs=self.epochs, shuffle=self.shuffle, seed=seed)


class ExcitationSegment(_Section):
    """Sinusoidal position reference: peak-to-peak amplitude in m around mid-course"""
    amplitude: float = Field(ge=0)
    frequency: float = Field(ge=0, le=1)
    duration: float = Field(gt=0)
    split: Literal["train", "test"] = "train"


class SquareReference(_Section):
    kind: Literal["square"] = "square"
    low: float = 0.05
    high: float = 0.15
    period: float = Field(10.0, gt=0)
    duration: float = Field(40.0, gt=0)
    start_high: bool = True
    initial_position: Optional[float] = None

    @property
    def cycle(self) -> float:
        return self.period


class SinusoidReference(_Section):
    kind: Literal["sinusoid"]
    center: float = 0.10
    amplitude: float = Field(0.05, ge=0)
    frequency: float = Field(0.2, gt=0, le=1)
    duration: float = Field(40.0, gt=0)
    initial_position: Optional[float] = None

    @property
    def cycle(self) -> float:
        return 1.0 / self.frequency


class OpenLoopSection(_Section):
    """Zero-mean sinusoidal motor speed reference in rpm"""
    offset: float = 0.0
    amplitude: float = Field(1200.0, ge=0)
    frequency: float = Field(0.25, ge=0)
    duration: float = Field(60.0, gt=0)


class OutputSection(_Section):
    dir: Optional[str] = None


class ExperimentConfig(_Section):
    seed: int = Field(0, ge=0)
    plant: PlantSection = Field(default_factory=PlantSection)
    controller: ControllerSection = Field(default_factory=ControllerSection)
    model: ModelSection
    train: TrainSection = Field(default_factory=TrainSection)
    excitation: List[ExcitationSegment] = Field(default_factory=list)
    reference: Union[SquareReference, SinusoidReference] = Field(default_factory=SquareReference)
    open_loop: OpenLoopSection = Field(default_factory=OpenLoopSection)
    output: OutputSection = Field(default_factory=OutputSection)

    @model_validator(mode="after")
    def _check_ranges(self) -> "ExperimentConfig":
        course = self.plant.course
        for k, segment in enumerate(self.excitation):
            if segment.amplitude > course:
                raise ValueError(f"excitation segment {k} amplitude {segment.amplitude} exceeds the course {course}")
        for position in (self.plant.initial_position, self.reference.initial_position):
            if position is not None and not 0.0 <= position <= course:
                raise ValueError(f"initial position {position} lies outside [0, {course}]")
        return self

    def plant_params(self) -> PlantParams:
        return self.plant.to_params(self.seed)

    def control_params(self) -> PlantParams:
        """Plant parameters for control runs; controller.dt replaces plant.dt when set"""
        return self.plant.to_params(self.seed, self.controller.dt)


def _format_validation_error(e: ValidationError) -> str:
    problems = []
    for item in e.errors():
        where = ".".join(str(part) for part in item["loc"]) or "config"
        problems.append(f"{where}: {item['msg']}")
    return "; ".join(problems)


def parse_config(data: dict, seed: Optional[int] = None) -> ExperimentConfig:
    """Validate an already-parsed config mapping, applying a seed override"""
    if seed is not None:
        data = {**data, "seed": seed}
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid experiment config: {_format_validation_error(e)}") from e


def load_config(path: Optional[Union[str, Path]] = None, seed: Optional[int] = None) -> ExperimentConfig:
    """
    Read and validate an experiment config file

    Args:
        path: TOML file; falls back to NFC_CONFIG and then the shipped default
        seed: Overrides the file's seed when given

    Returns:
        Validated ExperimentConfig
    """
    path = Path(path or os.getenv("NFC_CONFIG") or DEFAULT_CONFIG_PATH)
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Cannot parse {path}: {str(e)}") from e

    config = parse_config(data, seed)
    logger.info(f"Loaded experiment config from {path} (seed {config.seed})")
    return config


def resolve_output_dir(cfg: ExperimentConfig, override: Optional[Union[str, Path]] = None) -> Path:
    """CLI flag, then NFC_OUTPUT_DIR, then [output] dir, then the default"""
    return Path(override or os.getenv("NFC_OUTPUT_DIR") or cfg.output.dir or DEFAULT_OUTPUT_DIR)
