from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from app.errors import DatasetError, DimensionError


@dataclass(frozen=True, eq=False)
class Sample:
    """One training example x' -> y'"""
    x: np.ndarray
    y: float


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Ordered examples for training or testing

    The order of rows is the update order used by gradient tuning.
    """
    inputs: np.ndarray
    targets: np.ndarray
    input_names: Tuple[str, ...] = ()
    output_name: str = "y"
    times: Optional[np.ndarray] = None
    dt: Optional[float] = None
    units: Tuple[Tuple[str, str], ...] = field(default=())

    def __post_init__(self):
        inputs = np.array(self.inputs, dtype=float)
        if inputs.ndim == 1:
            inputs = inputs.reshape(-1, 1)
        targets = np.array(self.targets, dtype=float).reshape(-1)
        if inputs.ndim != 2 or inputs.shape[0] != targets.size:
            raise DimensionError(f"Got {inputs.shape[0]} condition vectors for {targets.size} targets")
        if self.input_names and len(self.input_names) != inputs.shape[1]:
            raise DimensionError(f"Got {len(self.input_names)} input names for {inputs.shape[1]} columns")
        if self.times is not None:
            times = np.array(self.times, dtype=float).reshape(-1)
            if times.size != targets.size:
                raise DimensionError(f"Got {times.size} timestamps for {targets.size} samples")
            times.setflags(write=False)
            object.__setattr__(self, "times", times)
        inputs.setflags(write=False)
        targets.setflags(write=False)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "input_names", tuple(self.input_names))

    @classmethod
    def from_samples(cls, samples: Sequence[Sample], **meta) -> "Dataset":
        if not samples:
            raise DatasetError("Cannot build a dataset from zero samples")
        inputs = np.array([np.asarray(s.x, dtype=float).reshape(-1) for s in samples])
        targets = np.array([s.y for s in samples], dtype=float)
        return cls(inputs=inputs, targets=targets, **meta)

    def __len__(self) -> int:
        return self.targets.size

    @property
    def input_dim(self) -> int:
        return self.inputs.shape[1]

    def sample(self, k: int) -> Sample:
        return Sample(x=self.inputs[k], y=float(self.targets[k]))

    @property
    def samples(self) -> Iterator[Sample]:
        for k in range(len(self)):
            yield self.sample(k)

    def permuted(self, order: np.ndarray) -> "Dataset":
        times = None if self.times is None else self.times[order]
        return Dataset(inputs=self.inputs[order], targets=self.targets[order], input_names=self.input_names,
                       output_name=self.output_name, times=times, dt=self.dt, units=self.units)

    def require(self, input_dim: int) -> None:
        """Raise unless the dataset is non-empty with input_dim columns"""
        if len(self) == 0:
            raise DatasetError("Dataset is empty")
        if self.input_dim != input_dim:
            raise DimensionError(f"Dataset has {self.input_dim} inputs but the rule base expects {input_dim}")
