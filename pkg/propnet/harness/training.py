import csv
import logging
from typing import Any, Dict, List, Tuple, Union, Callable, Optional, Sequence
from pathlib import Path
from functools import partial
from dataclasses import field, dataclass
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from propnet._utils import _rng
from propnet.net.loss import LossReport, masked_loss
from propnet.exceptions import EmptySplit, NoValidPixels
from propnet.net.model import ArchSpec, ModelWeights, init_weights, save_weights, plnet_forward, plnet_backward
from propnet.net.optim import AdamHyper, adam_step, init_optimizer
from propnet.tensor.augment import AugmentTransform, dihedral_transforms
from propnet.harness.dataset import Dataset, PathLossSample
from propnet.harness.evaluation import evaluate_rmse

__all__ = ["TrainConfig", "EpochRecord", "train", "finetune", "write_history"]

logger = logging.getLogger(__name__)

FINETUNE_EPOCHS: int = 5
FINETUNE_LR_FACTOR: float = 0.1
HISTORY_HEADER: Tuple[str, ...] = ("epoch", "train_loss", "val_loss", "rmse_db")


@dataclass(frozen=True)
class TrainConfig:
    """Settings of the training loop.

    :param epochs: Number of passes over the training split.
    :param batch_size: Number of samples per optimizer step.
    :param loss_mode: Either ``MAE`` or ``MSE``.
    :param hyper: Hyperparameters of the Adam optimizer.
    :param augment: Whether every sample is transformed by a random symmetry of the square at every epoch.
    :param seed: Seed of the weights, the sample order and the augmentations.
    :param checkpoint_every: Save the weights every that many epochs, never if 0.
    :param checkpoint_dir: Directory of the checkpoints.
    :param train_split: Split tag of the training samples.
    :param val_split: Split tag of the validation samples, if any.
    :param workers: Number of threads computing the per-sample gradients of a batch.
    """

    epochs: int = 80
    batch_size: int = 8
    loss_mode: str = "MAE"
    hyper: AdamHyper = field(default_factory=AdamHyper)
    augment: bool = True
    seed: int = 0
    checkpoint_every: int = 0
    checkpoint_dir: Optional[str] = None
    train_split: str = "train"
    val_split: Optional[str] = "test"
    workers: int = 1

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError(f"Expected at least one epoch, but got {self.epochs}.")
        if self.batch_size < 1:
            raise ValueError(f"Expected a batch size of at least 1, but got {self.batch_size}.")
        if self.loss_mode not in ("MAE", "MSE"):
            raise ValueError(f"The given loss mode ({self.loss_mode}) is not supported. Supported modes are MAE, MSE.")
        if self.checkpoint_every < 0:
            raise ValueError(f"Expected a non-negative checkpoint cadence, but got {self.checkpoint_every}.")
        if self.checkpoint_every > 0 and self.checkpoint_dir is None:
            raise ValueError("A checkpoint directory is required when `checkpoint_every` is positive.")
        if self.workers < 1:
            raise ValueError(f"Expected a positive number of workers, but got {self.workers}.")


@dataclass(frozen=True)
class EpochRecord:
    """Losses at the end of an epoch; `rmse_db` is measured on the validation split when there is one."""

    epoch: int
    train_loss: float
    val_loss: Optional[float]
    rmse_db: float


def _allowed_transforms(sample: PathLossSample) -> List[AugmentTransform]:
    """Private method returning the symmetries that keep the shape of the sample."""
    transforms = list(dihedral_transforms())
    if sample.input.height == sample.input.width:
        return transforms
    return [t for t in transforms if t.rotation in (0, 180)]


def _sample_forward(
    w: ModelWeights, sample: PathLossSample, transform: AugmentTransform, mode: str
) -> Optional[Tuple[Dict[str, Any], LossReport]]:
    """Private method returning the forward cache and the loss of one sample, None if it has no valid pixel."""
    label = transform(sample.label)
    prediction, cache = plnet_forward(w, transform(sample.input), cache=True)
    try:
        report = masked_loss(prediction.values, label.values, label.mask, mode=mode)
    except NoValidPixels:
        logger.warning("skipping sample of map %s without valid pixels", sample.meta.get("map", "?"))
        return None
    return cache, report


def _sample_backward(
    w: ModelWeights, forward: Tuple[Dict[str, Any], LossReport], total: int
) -> "OrderedDict[str, np.ndarray]":
    """Private method returning the gradient of one sample, weighted by its share of the valid pixels."""
    cache, report = forward
    weight = report.valid_pixel_count / total
    return plnet_backward(w, cache, report.gradient * weight)


def _batch_step(
    w: ModelWeights,
    batch: Sequence[Tuple[PathLossSample, AugmentTransform]],
    mode: str,
    executor: Optional[ThreadPoolExecutor] = None,
) -> Tuple[Optional["OrderedDict[str, np.ndarray]"], float, int]:
    """Private method returning the gradient of the batch loss, its value and the number of valid pixels.

    The batch loss is pooled over the valid pixels of all the samples of the batch. Samples without valid pixels
    are skipped; the gradient is None if every sample is skipped. The samples are mapped over the executor, if
    any, and their gradients summed in batch order, so the result does not depend on the number of threads.
    """
    mapper: Callable = map if executor is None else executor.map
    samples, transforms = zip(*batch)
    forwards = [f for f in mapper(partial(_sample_forward, w, mode=mode), samples, transforms) if f is not None]
    total = sum(report.valid_pixel_count for _, report in forwards)
    if total == 0:
        return None, 0.0, 0

    grads: "OrderedDict[str, np.ndarray]" = OrderedDict((name, np.zeros_like(w[name])) for name in w)
    for sample_grads in mapper(partial(_sample_backward, w, total=total), forwards):
        for name, grad in sample_grads.items():
            grads[name] += grad
    value = 0.0
    for _, report in forwards:
        value += report.valid_pixel_count / total * report.value
    return grads, value, total


def _fit(
    w: ModelWeights,
    samples: Sequence[PathLossSample],
    val_samples: Sequence[PathLossSample],
    cfg: TrainConfig,
    hyper: AdamHyper,
    epochs: int,
) -> Tuple[ModelWeights, List[EpochRecord]]:
    """Private method running the mini-batch loop from the given weights, on `cfg.workers` threads."""
    if cfg.workers == 1:
        return _fit_epochs(w, samples, val_samples, cfg=cfg, hyper=hyper, epochs=epochs, executor=None)
    with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
        return _fit_epochs(w, samples, val_samples, cfg=cfg, hyper=hyper, epochs=epochs, executor=executor)


def _fit_epochs(
    w: ModelWeights,
    samples: Sequence[PathLossSample],
    val_samples: Sequence[PathLossSample],
    cfg: TrainConfig,
    hyper: AdamHyper,
    epochs: int,
    executor: Optional[ThreadPoolExecutor],
) -> Tuple[ModelWeights, List[EpochRecord]]:
    """Private method running the epochs; the weights and the optimizer state are only updated here."""
    rng = _rng(cfg.seed)
    state = init_optimizer(w, hyper=hyper)
    history = []
    for epoch in range(1, epochs + 1):
        order = rng.permutation(len(samples))
        choices = rng.integers(8, size=len(samples))
        epoch_loss, epoch_count = 0.0, 0
        for start in range(0, len(samples), cfg.batch_size):
            batch = []
            for idx in order[start : start + cfg.batch_size]:
                sample = samples[idx]
                transforms = _allowed_transforms(sample)
                transform = transforms[choices[idx] % len(transforms)] if cfg.augment else AugmentTransform()
                batch.append((sample, transform))
            grads, value, count = _batch_step(w, batch, mode=cfg.loss_mode, executor=executor)
            if grads is None:
                continue
            w, state = adam_step(w, grads, state)
            epoch_loss += value * count
            epoch_count += count
        if epoch_count == 0:
            raise NoValidPixels("Expected at least one training sample with a valid pixel.")

        val_loss = None
        if len(val_samples) > 0:
            val_loss = _pooled_loss(w, val_samples, mode=cfg.loss_mode)
        rmse = evaluate_rmse(w, val_samples if len(val_samples) > 0 else samples)
        record = EpochRecord(epoch=epoch, train_loss=epoch_loss / epoch_count, val_loss=val_loss, rmse_db=rmse)
        history.append(record)
        logger.info("epoch %d: train_loss=%.4f val_loss=%s rmse_db=%.4f", epoch, record.train_loss, val_loss, rmse)
        if cfg.checkpoint_every > 0 and epoch % cfg.checkpoint_every == 0:
            path = Path(cfg.checkpoint_dir) / f"epoch_{epoch:04d}.plw"
            path.parent.mkdir(parents=True, exist_ok=True)
            save_weights(w, path)
            logger.info("saved checkpoint %s", path)
    return w, history


def _pooled_loss(w: ModelWeights, samples: Sequence[PathLossSample], mode: str) -> float:
    """Private method returning the loss pooled over the valid pixels of the samples."""
    predictions = np.stack([plnet_forward(w, sample.input).values for sample in samples])
    truth = np.stack([sample.label.values for sample in samples])
    mask = np.stack([sample.label.mask for sample in samples])
    return masked_loss(predictions, truth, mask, mode=mode).value


def train(
    dataset: Dataset, spec: Optional[ArchSpec] = None, cfg: Optional[TrainConfig] = None
) -> Tuple[ModelWeights, List[EpochRecord]]:
    """Train the network from scratch on the training split of a dataset.

    The weights are drawn from ``cfg.seed``. Every epoch visits the training samples in a random order, by
    mini-batches; each optimizer step follows the masked loss pooled over the valid pixels of the batch. When
    augmentation is on, every sample is transformed by one of the 8 symmetries of the square, drawn anew at
    every epoch (non-square samples only use the symmetries keeping their shape). Samples without valid
    pixels are skipped with a warning.

    :param dataset: The dataset.
    :type dataset: Dataset
    :param spec: The architecture, the default one if omitted.
    :type spec: Optional[ArchSpec]
    :param cfg: The training settings, the default ones if omitted.
    :type cfg: Optional[TrainConfig]

    :return: The trained weights and one record per epoch.
    :rtype: Tuple[ModelWeights, List[EpochRecord]]

    :raises EmptySplit: If the training split is empty.
    :raises NonDivisibleSize: If a sample does not fit the architecture.
    """
    spec = ArchSpec() if spec is None else spec
    cfg = TrainConfig() if cfg is None else cfg
    samples = list(dataset.split(cfg.train_split))
    if len(samples) == 0:
        raise EmptySplit(f"Expected a non-empty `{cfg.train_split}` split to train on.")
    val_samples = list(dataset.split(cfg.val_split)) if cfg.val_split is not None else []
    for sample in samples + val_samples:
        spec.check_input_shape(height=sample.input.height, width=sample.input.width)
    logger.info("training on %d samples, validating on %d", len(samples), len(val_samples))
    return _fit(init_weights(spec, seed=cfg.seed), samples, val_samples, cfg, hyper=cfg.hyper, epochs=cfg.epochs)


def finetune(
    w: ModelWeights,
    samples: Union[Dataset, Sequence[PathLossSample]],
    cfg: Optional[TrainConfig] = None,
    epochs: Optional[int] = None,
    lr_factor: float = FINETUNE_LR_FACTOR,
) -> ModelWeights:
    """Continue training from `w` on calibration samples, with a reduced learning rate.

    Augmentation is off unless `cfg` turns it on. The given weights are left untouched.

    :param w: The pre-trained weights.
    :type w: ModelWeights
    :param samples: The calibration samples.
    :type samples: Union[Dataset, Sequence[PathLossSample]]
    :param cfg: The training settings, 5 epochs without augmentation if omitted.
    :type cfg: Optional[TrainConfig]
    :param epochs: Number of epochs overriding ``cfg.epochs``; 0 returns the weights unchanged.
    :type epochs: Optional[int]
    :param lr_factor: Factor applied to the learning rate of `cfg`.
    :type lr_factor: float

    :return: The fine-tuned weights.
    :rtype: ModelWeights

    :raises EmptySplit: If there is no calibration sample.
    """
    cfg = TrainConfig(epochs=FINETUNE_EPOCHS, augment=False) if cfg is None else cfg
    epochs = cfg.epochs if epochs is None else epochs
    if epochs < 0:
        raise ValueError(f"Expected a non-negative number of epochs, but got {epochs}.")
    samples = list(samples)
    if len(samples) == 0:
        raise EmptySplit("Expected at least one calibration sample to fine-tune on.")
    if epochs == 0:
        return w
    tuned, _ = _fit(w, samples, [], cfg, hyper=cfg.hyper.scaled(lr_factor), epochs=epochs)
    return tuned


def write_history(history: Sequence[EpochRecord], path: Union[str, Path]) -> None:
    """Write the training history as a CSV file with header ``epoch,train_loss,val_loss,rmse_db``."""
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(HISTORY_HEADER)
        for record in history:
            val_loss = "" if record.val_loss is None else f"{record.val_loss:.6f}"
            writer.writerow([record.epoch, f"{record.train_loss:.6f}", val_loss, f"{record.rmse_db:.6f}"])
