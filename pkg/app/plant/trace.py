from typing import Dict, List, Tuple

import numpy as np
import pandas as pd


class Trace:
    """Column-oriented per-step record; subclasses declare COLUMNS"""
    COLUMNS: Tuple[str, ...] = ()

    def __init__(self):
        self._columns: Dict[str, List[float]] = {name: [] for name in self.COLUMNS}

    def append(self, *values: float) -> None:
        for name, value in zip(self.COLUMNS, values, strict=True):
            self._columns[name].append(float(value))

    def __len__(self) -> int:
        return len(self._columns[self.COLUMNS[0]])

    def column(self, name: str) -> np.ndarray:
        return np.asarray(self._columns[name], dtype=float)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.column(name)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({name: self.column(name) for name in self.COLUMNS}, columns=list(self.COLUMNS))


class OpenLoopTrace(Trace):
    COLUMNS = ("t", "omega_ref", "omega", "v", "y")
