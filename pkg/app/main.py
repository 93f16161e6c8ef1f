import argparse
import logging
import os
import sys
from typing import List, Optional

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

logging.basicConfig(
    level=os.getenv("LOG_LEVEL", "INFO").upper(),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)

from app.errors import NeuroFuzzyError
from app.harness.config import CONTROL_MODES, load_config, resolve_output_dir
from app.harness.service import ExperimentService

# Configure logging
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neurofuzzy",
        description="Neuro-fuzzy modelling and feedback-error-learning control of a simulated hydraulic actuator",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment TOML file (default: $NFC_CONFIG or configs/experiment.toml)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", help="output directory (default: $NFC_OUTPUT_DIR or [output] dir)")

    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("gen-data", parents=[common], help="record train.csv and test.csv under P control")

    train = commands.add_parser("train", parents=[common], help="cluster-initialise and tune a rule base")
    train.add_argument("--data", help="training dataset (default: <out>/train.csv)")

    evaluate = commands.add_parser("eval", parents=[common], help="score a model on a dataset")
    evaluate.add_argument("--model", help="model file (default: <out>/model.json)")
    evaluate.add_argument("--data", help="dataset (default: <out>/test.csv)")

    control = commands.add_parser("control", parents=[common], help="closed-loop position experiment")
    control.add_argument("--mode", choices=CONTROL_MODES, default="comp-learn-fast")
    control.add_argument("--model", help="inverse model file (default: <out>/model.json; optional with --mode p-only)")

    commands.add_parser("open-loop", parents=[common], help="drive the plant with a speed sinusoid")
    return parser


def run(args: argparse.Namespace) -> None:
    cfg = load_config(args.config, args.seed)
    out_dir = resolve_output_dir(cfg, args.out)
    service = ExperimentService(cfg, out_dir)

    if args.command == "gen-data":
        service.gen_data()
    elif args.command == "train":
        service.train(args.data or out_dir / "train.csv")
    elif args.command == "eval":
        service.evaluate(args.model or out_dir / "model.json", args.data or out_dir / "test.csv")
    elif args.command == "control":
        model = args.model or (None if args.mode == "p-only" else out_dir / "model.json")
        service.control(args.mode, model)
    elif args.command == "open-loop":
        service.open_loop()


def main(argv: Optional[List[str]] = None) -> int:
    """
    CLI entry point

    Returns:
        0 on success, 1 after printing a one-line diagnostic to stderr
    """
    args = build_parser().parse_args(argv)
    try:
        run(args)
    except (NeuroFuzzyError, OSError) as e:
        logger.error(f"Error running {args.command}: {str(e)}")
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0
