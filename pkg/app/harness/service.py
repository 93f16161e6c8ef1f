import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from app.control.fel import ControlTrace, half_period_errors, run_control
from app.control.reference import sinusoid, square_wave
from app.errors import ConfigError, ModelFileError
from app.fuzzy.linguistic import describe_rule
from app.fuzzy.rule_base import RuleBase
from app.harness.config import RELATIONS, ExperimentConfig, ExcitationSegment, SquareReference
from app.harness.datasets import DATASET_COLUMNS, load_dataset, write_frame, write_trace
from app.harness.model_store import ModelFile, OutputDescriptor, load_model, save_model
from app.learning.cluster import cluster_init
from app.learning.gradient import train_epochs
from app.learning.metrics import evaluate
from app.plant.simulator import PlantState, run_open_loop

# Configure logging
logger = logging.getLogger(__name__)

# Rules listed in the training report
STRONGEST_RULES = 10


def control_outputs(out_dir: Path, mode: str) -> Tuple[Path, Path, Path]:
    """Trace, adapted-model and summary paths of one control mode; each mode owns its files"""
    return out_dir / f"trace_{mode}.csv", out_dir / f"model_{mode}.json", out_dir / f"control_summary_{mode}.json"


def excitation_reference(segment: ExcitationSegment, course: float, dt: float) -> np.ndarray:
    """Position reference for one segment: mid-course plus a sinusoid of the given peak-to-peak amplitude"""
    return sinusoid(course / 2.0, segment.amplitude / 2.0, segment.frequency, segment.duration, dt)


def _write_json(payload: Dict[str, Any], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(json.dumps(payload, indent=2) + "\n")
    logger.info(f"Wrote {path}")
    return path


class ExperimentService:
    """Runs the harness commands for one experiment config and output directory"""

    def __init__(self, cfg: ExperimentConfig, out_dir: Union[str, Path]):
        self.cfg = cfg
        self.out_dir = Path(out_dir)
        logger.info(f"Experiment service initialized (seed {cfg.seed}, output {self.out_dir})")

    def _check_excitation(self) -> None:
        segments = self.cfg.excitation
        if not segments:
            raise ConfigError("No excitation segments configured")
        train = {(s.amplitude, s.frequency) for s in segments if s.split == "train"}
        test = {(s.amplitude, s.frequency) for s in segments if s.split == "test"}
        if not train or not test:
            raise ConfigError("Excitation needs at least one train and one test segment")
        shared = train & test
        if shared:
            raise ConfigError(f"Test segments must use amplitude/frequency pairs unseen in training, shared: {sorted(shared)}")

    def gen_data(self) -> Tuple[Path, Path]:
        """
        Record training and test data under P-only closed-loop control

        Segments run back to back on one plant; each row goes to the file of the
        segment that produced it.

        Returns:
            Tuple of (train.csv path, test.csv path)
        """
        self._check_excitation()
        params = self.cfg.plant_params()
        controller = self.cfg.controller.for_mode("p-only")
        state = PlantState.initial(params)
        frames = {"train": [], "test": []}

        for k, segment in enumerate(self.cfg.excitation):
            reference = excitation_reference(segment, params.course, params.dt)
            if reference.size == 0:
                raise ConfigError(f"Excitation segment {k} is shorter than one sample period")
            result = run_control(replace(params, seed=params.seed + k), None, controller, reference, state)
            state = result.final_state
            frames[segment.split].append(result.trace.to_frame()[list(DATASET_COLUMNS)])
            logger.info(f"Segment {k} ({segment.split}): amplitude {segment.amplitude} m, "
                        f"{segment.frequency} Hz, {len(result.trace)} rows")

        comment = f"dt={params.dt!r}"
        train_path = write_frame(pd.concat(frames["train"], ignore_index=True), self.out_dir / "train.csv", comment)
        test_path = write_frame(pd.concat(frames["test"], ignore_index=True), self.out_dir / "test.csv", comment)
        return train_path, test_path

    def train(self, data_path: Union[str, Path]) -> Path:
        """
        Fit a rule base to a dataset file

        Cluster initialisation is followed by the configured number of gradient
        epochs; with epochs = 0 the cluster initialisation is the final model.

        Returns:
            Path of the written model file; train_report.json sits beside it
        """
        model_cfg = self.cfg.model
        data = load_dataset(data_path, model_cfg.input_columns, model_cfg.target_column)
        output_range = (model_cfg.output_lo, model_cfg.output_hi)

        initial = cluster_init(RuleBase.structure(model_cfg.build_partitions()), data)
        initial_report = evaluate(initial, data, output_range)

        rb, epoch_rms = initial, []
        train_cfg = self.cfg.train.to_train_config(self.cfg.seed)
        if train_cfg is not None:
            result = train_epochs(initial, data, train_cfg)
            rb, epoch_rms = result.rule_base, result.rms_history
        else:
            logger.info("Epoch count is 0, keeping the cluster initialization")
        final_report = evaluate(rb, data, output_range)

        output = OutputDescriptor(name=model_cfg.target_column, lo=model_cfg.output_lo, hi=model_cfg.output_hi)
        model_path = save_model(ModelFile.from_rule_base(rb, model_cfg.relation, output), self.out_dir / "model.json")

        support = rb.activation_matrix(data.inputs).sum(axis=0)
        strongest = np.argsort(-support, kind="stable")[:STRONGEST_RULES]
        unsupported = int((~rb.support_flags).sum())
        report = {
            "relation": model_cfg.relation,
            "inputs": list(model_cfg.input_columns),
            "output": model_cfg.target_column,
            "samples": len(data),
            "rules": rb.rule_count,
            "supported_rules": rb.rule_count - unsupported,
            "unsupported_rules": unsupported,
            "alpha": self.cfg.train.alpha,
            "epochs": self.cfg.train.epochs,
            "cluster_init": initial_report.summary(),
            "epoch_rms": [rms if np.isfinite(rms) else None for rms in epoch_rms],
            "final": final_report.summary(),
            "strongest_rules": [describe_rule(rb, int(l), model_cfg.target_column) for l in strongest],
        }
        _write_json(report, self.out_dir / "train_report.json")
        return model_path

    def evaluate(self, model_path: Union[str, Path], data_path: Union[str, Path]) -> Path:
        """
        Score a model file against a dataset file

        Returns:
            Path of eval.csv (t, target, inferred target, error); eval_summary.json sits beside it
        """
        model_file = load_model(model_path)
        input_columns, target = RELATIONS[model_file.relation]
        if model_file.variable_names != input_columns:
            raise ModelFileError(f"{model_file.relation} model has antecedents {model_file.variable_names}, "
                                 f"expected {input_columns}")
        rb = model_file.to_rule_base()
        data = load_dataset(data_path, input_columns, target)
        report = evaluate(rb, data, (model_file.output.lo, model_file.output.hi))

        frame = pd.DataFrame({
            "t": data.times,
            target: data.targets,
            f"{target}_star": report.predictions,
            "error": report.per_sample_errors,
        })
        eval_path = write_frame(frame, self.out_dir / "eval.csv")
        summary = {"relation": model_file.relation, **report.summary()}
        _write_json(summary, self.out_dir / "eval_summary.json")
        logger.info(f"Evaluation RMS {report.rms:.6g} ({report.rms_percent:.2f}% of span), "
                    f"peak {report.percent_of_range:.2f}%")
        return eval_path

    def _reference(self, dt: float) -> np.ndarray:
        ref = self.cfg.reference
        if isinstance(ref, SquareReference):
            return square_wave(ref.low, ref.high, ref.period, ref.duration, dt, ref.start_high)
        return sinusoid(ref.center, ref.amplitude, ref.frequency, ref.duration, dt)

    def control(self, mode: str, model_path: Optional[Union[str, Path]] = None) -> Path:
        """
        Closed-loop position experiment

        Args:
            mode: p-only, comp, comp-learn-slow or comp-learn-fast
            model_path: Inverse model file; optional for p-only

        Returns:
            Path of trace_<mode>.csv; model_<mode>.json (when a model was given) and
            control_summary_<mode>.json sit beside it. The input model file is never rewritten.
        """
        controller = self.cfg.controller.for_mode(mode)
        trace_out, model_out, summary_out = control_outputs(self.out_dir, mode)
        model_file = None
        rb = None
        if model_path is not None:
            if Path(model_path).resolve() == model_out.resolve():
                raise ConfigError(f"Control would overwrite its input model {model_path}; pass the trained model instead")
            model_file = load_model(model_path)
            if model_file.relation != "inverse":
                raise ModelFileError(f"Control needs an inverse model, {model_path} holds a {model_file.relation} model")
            rb = model_file.to_rule_base()
        elif mode != "p-only":
            raise ConfigError(f"Control mode {mode} needs a model file")

        params = self.cfg.control_params()
        reference = self._reference(params.dt)
        state = PlantState.initial(params, self.cfg.reference.initial_position)
        result = run_control(params, rb, controller, reference, state)

        trace_path = write_trace(result.trace, trace_out, ControlTrace.COLUMNS)
        if model_file is not None:
            save_model(ModelFile.from_rule_base(result.rule_base, "inverse", model_file.output), model_out)

        cycle = self.cfg.reference.cycle
        abs_errors = half_period_errors(result.trace, cycle)
        signed_errors = half_period_errors(result.trace, cycle, signed=True)
        course = params.course
        summary = {
            "mode": mode,
            "kp": controller.kp,
            "alpha": controller.alpha,
            "dt": params.dt,
            "steps": len(result.trace),
            "updates": result.updates,
            "unsupported_steps": result.unsupported_steps,
            "rms_error": float(np.sqrt(np.mean(result.trace["error"] ** 2))),
            "half_period_abs_error": abs_errors.tolist(),
            "half_period_signed_error": signed_errors.tolist(),
            "final_abs_error": float(abs_errors[-1]) if abs_errors.size else None,
            "final_error_percent_of_course": float(100.0 * abs_errors[-1] / course) if abs_errors.size else None,
        }
        _write_json(summary, summary_out)
        return trace_path

    def open_loop(self) -> Path:
        """Drive the plant with the configured speed sinusoid and record the response"""
        params = self.cfg.plant_params()
        ol = self.cfg.open_loop
        omega_ref = sinusoid(ol.offset, ol.amplitude, ol.frequency, ol.duration, params.dt)
        trace = run_open_loop(params, omega_ref)

        y = trace["y"]
        at_end = np.flatnonzero((y <= 0.0) | (y >= params.course))
        if at_end.size:
            logger.info(f"Piston reached a course end at t={trace['t'][at_end[0]]:.2f}s")
        else:
            logger.info(f"Piston stayed within the course, final y={y[-1]:.4f} m")
        return write_trace(trace, self.out_dir / "open_loop.csv")
