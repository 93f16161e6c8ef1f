"""
CSV files for datasets and traces

Dataset files start with a metadata comment line ("# dt=0.01") followed by the
header t,y_ref,omega,v,y in units s, m, rpm, m/s, m.
"""
import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import pandas as pd

from app.errors import DatasetError
from app.learning.dataset import Dataset
from app.plant.trace import Trace

# Configure logging
logger = logging.getLogger(__name__)

DATASET_COLUMNS = ("t", "y_ref", "omega", "v", "y")
UNITS = {"t": "s", "y_ref": "m", "omega": "rpm", "v": "m/s", "y": "m"}


def write_frame(frame: pd.DataFrame, path: Union[str, Path], comment: Optional[str] = None) -> Path:
    """Write a table as CSV with "\\n" line endings and an optional leading comment"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        if comment:
            f.write(f"# {comment}\n")
        frame.to_csv(f, index=False, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def write_trace(trace: Trace, path: Union[str, Path], columns: Optional[Sequence[str]] = None,
                dt: Optional[float] = None) -> Path:
    frame = trace.to_frame()
    if columns is not None:
        frame = frame[list(columns)]
    return write_frame(frame, path, comment=None if dt is None else f"dt={dt!r}")


def _read_dt(path: Path) -> Optional[float]:
    with open(path) as f:
        first = f.readline().strip()
    if first.startswith("#") and "dt=" in first:
        try:
            return float(first.split("dt=", 1)[1].split()[0])
        except ValueError:
            logger.warning(f"Ignoring malformed metadata line in {path}: {first}")
    return None


def read_frame(path: Union[str, Path], required: Sequence[str] = DATASET_COLUMNS) -> pd.DataFrame:
    """
    Read a CSV written by write_frame

    Args:
        path: File to read
        required: Columns that must be present

    Returns:
        DataFrame with float columns, parsed with round-trip precision
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, comment="#", float_precision="round_trip")
    except pd.errors.EmptyDataError as e:
        raise DatasetError(f"{path} holds no data") from e

    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise DatasetError(f"{path} is missing columns: {', '.join(missing)}")
    if frame.empty:
        raise DatasetError(f"{path} has a header but no rows")
    return frame


def load_dataset(path: Union[str, Path], input_columns: Sequence[str], target_column: str) -> Dataset:
    """
    Build learning examples from a dataset file

    The inverse relation uses inputs (y_ref, y, v) and target omega; the direct
    relation uses inputs (y_ref, omega, v) and target y.
    """
    path = Path(path)
    frame = read_frame(path, tuple(DATASET_COLUMNS))
    data = Dataset(
        inputs=frame[list(input_columns)].to_numpy(dtype=float),
        targets=frame[target_column].to_numpy(dtype=float),
        input_names=tuple(input_columns),
        output_name=target_column,
        times=frame["t"].to_numpy(dtype=float),
        dt=_read_dt(path),
        units=tuple((c, UNITS[c]) for c in (*input_columns, target_column)),
    )
    logger.info(f"Loaded {len(data)} samples from {path}: {', '.join(input_columns)} -> {target_column}")
    return data
