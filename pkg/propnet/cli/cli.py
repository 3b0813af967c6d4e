import sys
import logging
import argparse
from typing import List, Optional

from propnet.cli.config import load_run_config
from propnet.cli.render import DEFAULT_MAX_DB, DEFAULT_MIN_DB
from propnet.cli._commands import (
    COMMANDS,
    _Style,
    _exit_code,
    _execute_error_message,
    _execute_version_command,
)
from propnet.harness.dataset import SPLITS
from propnet.harness.baselines import BASELINES

LOG_FORMAT: str = "%(asctime)s %(levelname)s %(message)s"


def _build_parser() -> argparse.ArgumentParser:
    """Return the parser of the command line interface."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags win over its values")
    common.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    common.add_argument("--seed", type=int, help="seed of every random draw")

    parser = argparse.ArgumentParser(
        prog="propnet",
        description="Propnet, path loss prediction as image-to-image regression.",
    )
    parser.add_argument("-v", "--version", action="store_true", help="print version")
    subparsers = parser.add_subparsers(dest="command", metavar="<COMMAND>")

    mapgen = subparsers.add_parser("mapgen", parents=[common], help="write synthetic maps")
    mapgen.add_argument("--out", help="output directory, one sub-directory per map")
    mapgen.add_argument("--n", type=int, default=1, help="number of maps")
    mapgen.add_argument("--size", type=int, default=256, help="width and height of the maps in pixels")
    mapgen.add_argument("--resolution", type=float, default=10.0, help="pixel size in meters")

    synth = subparsers.add_parser("synth", parents=[common], help="simulate a labeled dataset")
    synth.add_argument("--maps", help="directory of maps")
    synth.add_argument("--patterns", help="directory of *.pat radiation patterns")
    synth.add_argument("--clutter-table", help="CSV file of clutter losses")
    synth.add_argument("--out", help="output directory of the dataset")
    synth.add_argument("--n", type=int, default=8, help="number of samples")
    synth.add_argument("--field-mode", action="store_true", help="keep only the pixels along drive-test roads")
    synth.add_argument("--split", choices=SPLITS, default="train", help="split tag of the samples")
    synth.add_argument("--calibration", action="store_true", help="emit calibrate/holdout road splits")
    synth.add_argument("--width", type=int, default=64, help="patch width in pixels")
    synth.add_argument("--height", type=int, default=64, help="patch height in pixels")
    synth.add_argument("--workers", type=int, default=1, help="processes simulating the labels")

    training = subparsers.add_parser("train", parents=[common], help="train the network")
    training.add_argument("--data", help="dataset directory")
    training.add_argument("--out", default="weights.plw", help="output weights file")
    training.add_argument("--history", help="output CSV of the training history")
    training.add_argument("--epochs", type=int)
    training.add_argument("--batch-size", type=int)
    training.add_argument("--loss", dest="loss_mode", choices=("MAE", "MSE"))
    training.add_argument("--lr", type=float, help="learning rate")
    training.add_argument("--no-augment", action="store_true", help="turn the dihedral augmentation off")
    training.add_argument("--checkpoint-every", type=int)
    training.add_argument("--checkpoint-dir")
    training.add_argument("--train-split", choices=SPLITS)
    training.add_argument("--val-split", choices=SPLITS)
    training.add_argument("--base-channels", type=int)
    training.add_argument("--depth", type=int)
    training.add_argument("--workers", type=int, help="threads computing the gradients of a batch")

    evaluation = subparsers.add_parser("eval", parents=[common], help="print the RMSE of the network")
    evaluation.add_argument("--data", help="dataset directory")
    evaluation.add_argument("--weights", required=True)
    evaluation.add_argument("--split", choices=SPLITS, default="test")

    prediction = subparsers.add_parser("predict", parents=[common], help="write predicted path loss matrices")
    prediction.add_argument("--data", help="dataset directory")
    prediction.add_argument("--weights", required=True)
    prediction.add_argument("--split", choices=SPLITS, default="test")
    prediction.add_argument("--out", help="output directory")

    tuning = subparsers.add_parser("finetune", parents=[common], help="fine-tune the network on calibration data")
    tuning.add_argument("--data", help="dataset directory")
    tuning.add_argument("--weights", required=True)
    tuning.add_argument("--split", choices=SPLITS, default="calibrate")
    tuning.add_argument("--epochs", dest="finetune_epochs", type=int)
    tuning.add_argument("--lr-factor", type=float, default=0.1)
    tuning.add_argument("--loss", dest="loss_mode", choices=("MAE", "MSE"))
    tuning.add_argument("--batch-size", type=int)
    tuning.add_argument("--workers", type=int, help="threads computing the gradients of a batch")
    tuning.add_argument("--out", help="output weights file, next to the original one by default")

    baseline = subparsers.add_parser("baseline", parents=[common], help="print the RMSE of a conventional model")
    baseline.add_argument("--data", help="dataset directory")
    baseline.add_argument("--model", choices=BASELINES, required=True)
    baseline.add_argument("--split", choices=SPLITS, default="test")
    baseline.add_argument("--maps", help="directory of the maps the samples come from")
    baseline.add_argument("--patterns", help="directory of *.pat radiation patterns")
    baseline.add_argument("--clutter-table", help="CSV file of clutter losses")
    baseline.add_argument("--city-size", choices=("small_medium", "large"), default="small_medium")
    baseline.add_argument("--calibrate-split", choices=SPLITS, help="calibrate the SPM on this split first")
    baseline.add_argument("--out", help="output directory of the predicted matrices")

    render = subparsers.add_parser("render", parents=[common], help="draw a path loss matrix or the filters")
    render.add_argument("--matrix", help="PLM1 file to draw")
    render.add_argument("--weights", help="PLW1 file whose first-layer filters are drawn")
    render.add_argument("--out", required=True, help="output image, or directory for the filters")
    render.add_argument("--palette", choices=("gray", "color"), default="gray")
    render.add_argument("--min-db", type=float, default=DEFAULT_MIN_DB)
    render.add_argument("--max-db", type=float, default=DEFAULT_MAX_DB)
    render.add_argument("--scale", type=int, default=16, help="pixels per kernel entry of the filter images")

    gradcheck = subparsers.add_parser("gradcheck", parents=[common], help="check the backpropagated gradient")
    gradcheck.add_argument("--loss", dest="loss_mode", choices=("MAE", "MSE"), default="MSE")
    gradcheck.add_argument("--eps", type=float, default=1e-5)
    return parser


def run_command_line_interface(argv: Optional[List[str]] = None) -> None:
    """Run and manage the command line interface."""
    parser = _build_parser()
    args = parser.parse_args(sys.argv[1:] if argv is None else argv)

    if args.version:
        _execute_version_command()
    if args.command is None:
        _execute_error_message(message="no command provided", exit_code=1)

    logging.basicConfig(format=LOG_FORMAT, level=logging.DEBUG if args.verbose else logging.INFO)
    try:
        config = load_run_config(args.config).merged(
            maps_dir=getattr(args, "maps", None),
            patterns_dir=getattr(args, "patterns", None),
            clutter_table=getattr(args, "clutter_table", None),
            seed=args.seed,
        )
        config.check_paths()
        COMMANDS[args.command](args, config)
    except (ValueError, OSError) as error:
        _execute_error_message(
            message=f"`{_Style.YELLOW}{args.command}{_Style.END}` failed: {error}".rstrip("."),
            exit_code=_exit_code(error, command=args.command),
        )
    sys.exit(0)
