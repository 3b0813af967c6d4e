import sys
import logging
import argparse
from typing import Any, Dict, List, Tuple, Optional
from pathlib import Path

from propnet import __version__
from propnet.exceptions import (
    ParseError,
    EmptySplit,
    ConfigError,
    NoValidPixels,
    PropnetError,
    ShapeMismatch,
    NonDivisibleSize,
    DimensionMismatch,
)
from propnet.cli.config import RunConfig
from propnet.cli.render import render_gray, save_image, render_palette
from propnet.net.model import ArchSpec, load_weights, save_weights
from propnet.net.optim import AdamHyper
from propnet.raysim.matrix import load_matrix, save_matrix
from propnet.raysim.clutter import ClutterLossTable, load_clutter_table
from propnet.antenna.pattern import RadiationPattern, load_pattern
from propnet.geodata.gis_map import LAYER_FILES, GisMap, load_gis_map, save_gis_map
from propnet.net.gradcheck import grad_check
from propnet.harness.dataset import Dataset, save_dataset, load_dataset, calibration_split
from propnet.harness.filters import save_filter_images, export_first_layer_filters
from propnet.harness.training import TrainConfig, train, finetune, write_history
from propnet.geodata.synthetic import synth_gis_map
from propnet.harness.baselines import baseline_predictions, calibrate_spm_per_frequency
from propnet.harness.synthesis import known_patterns, synth_dataset
from propnet.harness.evaluation import predict, pooled_rmse, evaluate_rmse

logger = logging.getLogger(__name__)

EXIT_OK: int = 0
EXIT_FAILURE: int = 1
EXIT_CONFIG: int = 2
EXIT_GENERATION: int = 3
EXIT_MALFORMED: int = 4
EXIT_EMPTY_SPLIT: int = 5

# largest relative error accepted by the gradient check, per loss mode
GRAD_CHECK_TOLERANCE: Dict[str, float] = {"MSE": 1e-5, "MAE": 1e-4}

# flags of `train` and `finetune` written over the `train` section of the configuration
_TRAIN_FLAGS: Tuple[str, ...] = (
    "epochs",
    "batch_size",
    "loss_mode",
    "checkpoint_every",
    "checkpoint_dir",
    "train_split",
    "val_split",
    "workers",
)


class _Style:
    """Class to define the output messages style."""

    YELLOW: str = "\033[33m"
    RED: str = "\033[31m"
    END: str = "\033[0m"
    BOLD: str = "\033[1m"
    UNDERLINE: str = "\033[4m"


def _execute_error_message(message: str, exit_code: int) -> None:
    """Print an error message and exit with the given code."""
    sys.stderr.write(
        f"{_Style.RED}{_Style.BOLD}Error:{_Style.END} {message}. \n "
        f"For more information, try `{_Style.YELLOW}--help{_Style.END}`, or `{_Style.YELLOW}-h{_Style.END}`. \n"
    )
    sys.exit(exit_code)


def _exit_code(error: Exception, command: str) -> int:
    """Return the exit code reporting `error` raised by `command`."""
    if isinstance(error, (ConfigError, FileNotFoundError, NotADirectoryError)):
        return EXIT_CONFIG
    if isinstance(error, (EmptySplit, NoValidPixels)):
        return EXIT_EMPTY_SPLIT
    if isinstance(error, (ParseError, ShapeMismatch, NonDivisibleSize, DimensionMismatch)):
        return EXIT_MALFORMED
    if command in ("synth", "mapgen") and isinstance(error, PropnetError):
        return EXIT_GENERATION
    return EXIT_FAILURE


def _execute_version_command() -> None:
    """Execute the `--version` command."""
    sys.stdout.write(f"{_Style.BOLD}v{_Style.END}{__version__}" + "\n")
    sys.exit(EXIT_OK)


def _seed(args: argparse.Namespace, config: RunConfig) -> int:
    """Return the seed of the flags, else of the configuration, else 0."""
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    return 0 if config.seed is None else int(config.seed)


def _existing_dir(path: Optional[str], name: str) -> Path:
    if path is None:
        raise ConfigError(f"The option `--{name}` is required")
    if not Path(path).is_dir():
        raise ConfigError(f"Expected an existing directory for `--{name}`, but got {path}")
    return Path(path)


def _load_maps(maps_dir: Optional[str]) -> List[GisMap]:
    """Load every map of a directory holding one sub-directory per map, sorted by name."""
    directory = _existing_dir(maps_dir, name="maps")
    candidates = sorted(path for path in directory.iterdir() if (path / LAYER_FILES["clutter"]).is_file())
    if len(candidates) == 0:
        raise ConfigError(f"Expected at least one map directory in {directory}")
    return [load_gis_map(path) for path in candidates]


def _load_patterns(patterns_dir: Optional[str]) -> Dict[str, RadiationPattern]:
    """Load the ``*.pat`` files of a directory by file stem, or return the known patterns."""
    if patterns_dir is None:
        return known_patterns()
    paths = sorted(_existing_dir(patterns_dir, name="patterns").glob("*.pat"))
    if len(paths) == 0:
        raise ConfigError(f"Expected at least one pattern file in {patterns_dir}")
    return {path.stem: load_pattern(path) for path in paths}


def _load_clutter_table(path: Optional[str]) -> Optional[ClutterLossTable]:
    return None if path is None else load_clutter_table(path)


def _load_data(data: Optional[str], split: Optional[str] = None) -> Dataset:
    if data is None:
        raise ConfigError("The option `--data` is required")
    if not Path(data).exists():
        raise ConfigError(f"Expected an existing dataset, but got {data}")
    dataset = load_dataset(data)
    return dataset if split is None else dataset.split(split)


def _arch_spec(args: argparse.Namespace, config: RunConfig) -> ArchSpec:
    """Return the architecture of the configuration, with the flags written over it."""
    settings = dict(config.arch)
    for name in ("base_channels", "depth"):
        if getattr(args, name, None) is not None:
            settings[name] = getattr(args, name)
    try:
        return ArchSpec(**settings)
    except TypeError as error:
        raise ConfigError(f"Invalid architecture settings: {error}") from None


def _train_config(args: argparse.Namespace, config: RunConfig, **defaults: Any) -> TrainConfig:
    """Return the training settings of the configuration, with the flags written over it."""
    settings = {**defaults, **config.train}
    for name in _TRAIN_FLAGS:
        if getattr(args, name, None) is not None:
            settings[name] = getattr(args, name)
    if getattr(args, "no_augment", False):
        settings["augment"] = False
    lr = getattr(args, "lr", None)
    lr = settings.pop("lr", None) if lr is None else lr
    settings["hyper"] = AdamHyper() if lr is None else AdamHyper(lr=float(lr))
    settings["seed"] = _seed(args, config)
    try:
        return TrainConfig(**settings)
    except TypeError as error:
        raise ConfigError(f"Invalid training settings: {error}") from None


def _execute_mapgen_command(args: argparse.Namespace, config: RunConfig) -> None:
    """Execute the `mapgen` command: write synthetic maps, one directory each."""
    out = args.out or config.maps_dir
    if out is None:
        raise ConfigError("The option `--out` is required")
    seed = _seed(args, config)
    for idx in range(args.n):
        gis_map = synth_gis_map(
            name=f"map_{idx:03d}", width=args.size, height=args.size, resolution_m=args.resolution, seed=seed + idx
        )
        save_gis_map(gis_map, Path(out) / gis_map.name)
    sys.stdout.write(f"wrote {args.n} maps to {out}\n")


def _execute_synth_command(args: argparse.Namespace, config: RunConfig) -> None:
    """Execute the `synth` command: install virtual antennas on the maps and simulate their labels."""
    maps = _load_maps(config.maps_dir)
    patterns = _load_patterns(config.patterns_dir)
    clutter_table = _load_clutter_table(config.clutter_table)
    out = args.out or config.output_dir
    if out is None:
        raise ConfigError("The option `--out` is required")
    seed = _seed(args, config)
    dataset = synth_dataset(
        maps=maps,
        n_samples=args.n,
        seed=seed,
        field_mode=args.field_mode,
        split=args.split,
        width=args.width,
        height=args.height,
        patterns=patterns,
        clutter_table=clutter_table,
        workers=args.workers,
    )
    if args.calibration:
        dataset = calibration_split(dataset, seed=seed)
    manifest = save_dataset(dataset, out)
    sys.stdout.write(f"wrote {len(dataset)} samples to {manifest}\n")


def _execute_train_command(args: argparse.Namespace, config: RunConfig) -> None:
    """Execute the `train` command."""
    dataset = _load_data(args.data)
    weights, history = train(dataset, spec=_arch_spec(args, config), cfg=_train_config(args, config))
    save_weights(weights, args.out)
    if args.history is not None:
        write_history(history, args.history)
    sys.stdout.write(f"train_loss={history[-1].train_loss:.6f}\nrmse_db={history[-1].rmse_db:.6f}\n")


def _execute_eval_command(args: argparse.Namespace, config: RunConfig) -> None:  # noqa: ARG001
    """Execute the `eval` command: print the pooled RMSE of the network over a split."""
    samples = _load_data(args.data, split=args.split)
    rmse = evaluate_rmse(load_weights(args.weights), samples)
    sys.stdout.write(f"samples={len(samples)}\nrmse_db={rmse:.6f}\n")


def _execute_predict_command(args: argparse.Namespace, config: RunConfig) -> None:
    """Execute the `predict` command: write the predicted path loss matrices."""
    samples = _load_data(args.data, split=args.split)
    if len(samples) == 0:
        raise EmptySplit(f"Expected a non-empty `{args.split}` split to predict")
    out = Path(args.out or config.output_dir or "predictions")
    out.mkdir(parents=True, exist_ok=True)
    for idx, prediction in enumerate(predict(load_weights(args.weights), samples)):
        save_matrix(prediction, out / f"{idx:05d}.plm")
    sys.stdout.write(f"wrote {len(samples)} matrices to {out}\n")


def _execute_finetune_command(args: argparse.Namespace, config: RunConfig) -> None:
    """Execute the `finetune` command: write the fine-tuned weights next to the original ones."""
    weights_path = Path(args.weights)
    samples = _load_data(args.data, split=args.split)
    cfg = _train_config(args, config, epochs=5, augment=False)
    tuned = finetune(
        load_weights(weights_path), samples, cfg=cfg, epochs=args.finetune_epochs, lr_factor=args.lr_factor
    )
    out = Path(args.out) if args.out else weights_path.with_name(f"{weights_path.stem}_finetuned.plw")
    save_weights(tuned, out)
    sys.stdout.write(f"wrote {out}\nrmse_db={evaluate_rmse(tuned, samples):.6f}\n")


def _execute_baseline_command(args: argparse.Namespace, config: RunConfig) -> None:
    """Execute the `baseline` command: print the pooled RMSE of a conventional model over a split."""
    dataset = _load_data(args.data)
    samples = dataset.split(args.split)
    maps = {gis_map.name: gis_map for gis_map in _load_maps(config.maps_dir)} if config.maps_dir else None
    options = {
        "maps": maps,
        "patterns": _load_patterns(config.patterns_dir),
        "clutter_table": _load_clutter_table(config.clutter_table),
        "city_size": args.city_size,
    }
    labels = [sample.label for sample in samples]
    spm_params = None
    if args.calibrate_split is not None:
        if args.model != "spm":
            raise ConfigError("The option `--calibrate-split` only applies to the `spm` baseline")
        calibration = dataset.split(args.calibrate_split)
        if len(calibration) == 0:
            raise EmptySplit(f"Expected a non-empty `{args.calibrate_split}` split to calibrate on")
        uncalibrated = baseline_predictions(samples, model="spm", **options)
        sys.stdout.write(f"uncalibrated_rmse_db={pooled_rmse(uncalibrated, labels):.6f}\n")
        spm_params = calibrate_spm_per_frequency(calibration, maps=maps)
    predictions = baseline_predictions(samples, model=args.model, spm_params=spm_params, **options)
    rmse = pooled_rmse(predictions, labels)
    if args.out is not None:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        for idx, prediction in enumerate(predictions):
            save_matrix(prediction, Path(args.out) / f"{idx:05d}.plm")
    sys.stdout.write(f"rmse_db={rmse:.6f}\n")


def _execute_render_command(args: argparse.Namespace, config: RunConfig) -> None:  # noqa: ARG001
    """Execute the `render` command: draw a path loss matrix, or the first-layer filters of a network."""
    if (args.matrix is None) == (args.weights is None):
        raise ConfigError("Expected exactly one of `--matrix` and `--weights`")
    if args.weights is not None:
        paths = save_filter_images(export_first_layer_filters(load_weights(args.weights)), args.out, scale=args.scale)
        sys.stdout.write(f"wrote {len(paths)} filter images to {args.out}\n")
        return
    matrix = load_matrix(args.matrix)
    if args.palette == "gray":
        image = render_gray(matrix, min_db=args.min_db, max_db=args.max_db)
    else:
        image = render_palette(matrix, min_db=args.min_db, max_db=args.max_db)
    save_image(image, args.out)
    sys.stdout.write(f"wrote {args.out}\n")


def _execute_gradcheck_command(args: argparse.Namespace, config: RunConfig) -> None:
    """Execute the `gradcheck` command: exit with 1 if the backpropagated gradient is off."""
    error = grad_check(seed=_seed(args, config), eps=args.eps, mode=args.loss_mode)
    sys.stdout.write(f"max_relative_error={error:.3e}\n")
    if error >= GRAD_CHECK_TOLERANCE[args.loss_mode]:
        _execute_error_message(
            message=f"Expected a relative error below {GRAD_CHECK_TOLERANCE[args.loss_mode]:g}, but got {error:.3e}",
            exit_code=EXIT_FAILURE,
        )


COMMANDS = {
    "mapgen": _execute_mapgen_command,
    "synth": _execute_synth_command,
    "train": _execute_train_command,
    "eval": _execute_eval_command,
    "predict": _execute_predict_command,
    "finetune": _execute_finetune_command,
    "baseline": _execute_baseline_command,
    "render": _execute_render_command,
    "gradcheck": _execute_gradcheck_command,
}
