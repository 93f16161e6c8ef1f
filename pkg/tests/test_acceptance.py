"""
End-to-end behaviour of the shipped experiment configs on the simulated actuator
"""
import json

import numpy as np
import pytest

from app.control.fel import half_period_errors, is_non_increasing, run_control
from app.control.reference import square_wave
from app.fuzzy.rule_base import RuleBase
from app.harness.config import load_config
from app.harness.datasets import load_dataset, read_frame
from app.harness.model_store import load_model
from app.harness.service import ExperimentService
from app.learning.cluster import cluster_init
from app.learning.metrics import evaluate
from app.plant.simulator import PlantParams, PlantState, step
from tests.conftest import CONFIG_DIR

COURSE = 0.20


@pytest.fixture(scope="module")
def experiment():
    return load_config(CONFIG_DIR / "experiment.toml")


@pytest.fixture(scope="module")
def inverse_run(experiment, tmp_path_factory):
    """Generated data and a fully tuned inverse model from the shipped config"""
    out = tmp_path_factory.mktemp("inverse")
    service = ExperimentService(experiment, out)
    train_path, test_path = service.gen_data()
    model_path = service.train(train_path)
    return train_path, test_path, model_path


def test_tuning_halves_held_out_error(experiment, inverse_run):
    train_path, test_path, model_path = inverse_run
    model_cfg = experiment.model
    train = load_dataset(train_path, model_cfg.input_columns, model_cfg.target_column)
    test = load_dataset(test_path, model_cfg.input_columns, model_cfg.target_column)
    span = (model_cfg.output_lo, model_cfg.output_hi)

    initial = cluster_init(RuleBase.structure(model_cfg.build_partitions()), train)
    tuned = load_model(model_path).to_rule_base()
    before = evaluate(initial, test, span)
    after = evaluate(tuned, test, span)

    assert after.rms <= 0.5 * before.rms
    assert after.percent_of_range_covered <= 20.0


def test_cluster_init_reports_unsupported_rules(experiment, inverse_run):
    report = json.loads((inverse_run[2].parent / "train_report.json").read_text())
    assert report["rules"] == 7 * 11 * 7
    assert report["unsupported_rules"] > 0
    assert report["final"]["rms"] < report["cluster_init"]["rms"]


def test_fast_online_learning_from_empty_model_removes_offset(experiment):
    params = experiment.control_params()
    reference = square_wave(0.05, 0.15, 10.0, 40.0, params.dt)
    model = RuleBase.structure(experiment.model.build_partitions())
    cfg = experiment.controller.for_mode("comp-learn-fast")

    result = run_control(params, model, cfg, reference, PlantState.initial(params, y=0.05))
    errors = half_period_errors(result.trace, 10.0)

    assert len(errors) == 8
    assert is_non_increasing(errors[0::2], allowed_violations=1, tolerance=2e-4)
    assert is_non_increasing(errors[1::2], allowed_violations=1, tolerance=2e-4)
    # halves ending at 15 s and 20 s
    assert errors[2] < 0.02 * COURSE
    assert errors[3] < 0.02 * COURSE
    assert np.all(errors[4:] < 0.02 * COURSE)


def test_fast_online_learning_from_trained_model(experiment, inverse_run):
    params = experiment.control_params()
    reference = square_wave(0.05, 0.15, 10.0, 40.0, params.dt)
    start = PlantState.initial(params, y=0.05)
    trained = load_model(inverse_run[2]).to_rule_base()

    p_only = run_control(params, None, experiment.controller.for_mode("p-only"), reference, start)
    learned = run_control(params, trained, experiment.controller.for_mode("comp-learn-fast"), reference, start)
    p_errors = half_period_errors(p_only.trace, 10.0)
    errors = half_period_errors(learned.trace, 10.0)

    assert len(errors) == 8
    assert errors[0] < p_errors[0]
    assert errors[-1] < errors[0]
    assert np.all(errors[4:] < 0.02 * COURSE)
    assert learned.updates > 0


def test_proportional_control_leaves_asymmetric_offset(experiment):
    params = experiment.control_params()
    reference = square_wave(0.05, 0.15, 10.0, 40.0, params.dt)
    cfg = experiment.controller.for_mode("p-only")
    result = run_control(params, None, cfg, reference, PlantState.initial(params, y=0.05))
    signed = half_period_errors(result.trace, 10.0, signed=True)

    rising, falling = signed[0::2], signed[1::2]
    assert np.all(rising > 0.02)
    assert np.all(falling < -0.015)
    assert np.all(rising + falling > 0.003)


@pytest.mark.parametrize("omega", [-700.0, -123.0, 0.0, 512.0, 900.0])
def test_dead_zone_never_moves_piston(omega):
    params = PlantParams()
    state = PlantState.initial(params, y=0.137, omega=omega)
    for _ in range(20000):
        state = step(state, params, omega)
    assert state.y == 0.137


@pytest.mark.parametrize("omega", [-701.0, 901.0])
def test_just_outside_dead_zone_moves_piston(omega):
    params = PlantParams()
    state = step(PlantState.initial(params, y=0.1, omega=omega), params, omega)
    assert state.v != 0.0
    assert state.y != 0.1


def test_open_loop_drift_reaches_course_end(experiment, tmp_path):
    frame = read_frame(ExperimentService(experiment, tmp_path).open_loop(), ())
    assert frame["t"].iloc[-1] < 60.0
    assert frame["y"].min() == 0.0 or frame["y"].max() == COURSE


def test_symmetric_plant_does_not_drift(tmp_path):
    cfg = load_config(CONFIG_DIR / "symmetric_plant.toml")
    frame = read_frame(ExperimentService(cfg, tmp_path).open_loop(), ())
    assert frame["y"].min() > 0.0
    assert frame["y"].max() < COURSE


def test_full_pipeline_is_byte_identical(experiment, tmp_path):
    cfg = experiment.model_copy(deep=True)
    cfg.train.epochs = 3
    outputs = []
    for name in ("first", "second"):
        service = ExperimentService(cfg, tmp_path / name)
        train_path, test_path = service.gen_data()
        model_path = service.train(train_path)
        service.evaluate(model_path, test_path)
        service.control("comp-learn-fast", model_path)
        outputs.append({p.name: p.read_bytes() for p in sorted((tmp_path / name).iterdir())})
    assert outputs[0] == outputs[1]
