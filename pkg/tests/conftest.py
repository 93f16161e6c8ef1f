from pathlib import Path

import numpy as np
import pytest

from app.fuzzy.membership import make_uniform_partition
from app.fuzzy.rule_base import RuleBase

ROOT = Path(__file__).resolve().parent.parent
CONFIG_DIR = ROOT / "configs"

SMALL_CONFIG = """
seed = 3

[plant]
dt = 0.01

[controller]
kp = 30000.0
dt = 0.005
slow_alpha = 0.0005
fast_alpha = 0.02

[model]
relation = "inverse"
output_lo = -3000.0
output_hi = 3000.0

[[model.partitions]]
name = "y_ref"
lo = 0.0
hi = 0.2
count = 3

[[model.partitions]]
name = "y"
lo = 0.0
hi = 0.2
count = 4

[[model.partitions]]
name = "v"
lo = -0.12
hi = 0.12
count = 3

[train]
alpha = 0.5
epochs = 2

[[excitation]]
amplitude = 0.12
frequency = 0.5
duration = 10.0
split = "train"

[[excitation]]
amplitude = 0.06
frequency = 0.25
duration = 5.0
split = "test"

[reference]
kind = "square"
low = 0.05
high = 0.15
period = 4.0
duration = 4.0
initial_position = 0.05

[open_loop]
amplitude = 1200.0
frequency = 0.25
duration = 4.0
"""


@pytest.fixture
def small_config_path(tmp_path):
    """A fast experiment config: 3/4/3 sets, 15 s of data, 4 s control run"""
    path = tmp_path / "small.toml"
    path.write_text(SMALL_CONFIG)
    return path


@pytest.fixture
def grid_2x2():
    """Triangular 2x2 grid over [0, 1]^2 with conclusions 1..4 in rule-index order"""
    partitions = (
        make_uniform_partition("x1", 0.0, 1.0, 2, "triangular", 1.0),
        make_uniform_partition("x2", 0.0, 1.0, 2, "triangular", 1.0),
    )
    return RuleBase(antecedents=partitions, conclusions=np.array([1.0, 2.0, 3.0, 4.0]))


@pytest.fixture
def inverse_structure():
    """Zero-conclusion inverse model with antecedents (y_ref, y, v)"""
    partitions = (
        make_uniform_partition("y_ref", 0.0, 0.2, 5),
        make_uniform_partition("y", 0.0, 0.2, 6),
        make_uniform_partition("v", -0.12, 0.12, 5),
    )
    return RuleBase.structure(partitions)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
