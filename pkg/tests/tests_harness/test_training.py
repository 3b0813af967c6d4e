import logging

import numpy as np
import pytest

from propnet import ArchSpec, AdamHyper, masked_loss, plnet_forward
from tests.test_utils import _check_values
from propnet.exceptions import EmptySplit, NoValidPixels, NonDivisibleSize
from propnet.harness.dataset import Dataset
from propnet.harness.training import EpochRecord, TrainConfig, train, finetune, write_history
from tests.tests_harness.test_cases import _sample

TINY = ArchSpec(base_channels=4, depth=2)


def _loss(w, samples, mode: str = "MAE") -> float:
    predictions = np.stack([plnet_forward(w, sample.input).values for sample in samples])
    truth = np.stack([sample.label.values for sample in samples])
    return masked_loss(predictions, truth, np.stack([sample.label.mask for sample in samples]), mode=mode).value


@pytest.mark.parametrize(
    argnames="kwargs, msg",
    argvalues=[
        ({"epochs": 0}, "Expected at least one epoch, but got 0."),
        ({"batch_size": 0}, "Expected a batch size of at least 1, but got 0."),
        ({"loss_mode": "L1"}, r"The given loss mode \(L1\) is not supported."),
        ({"checkpoint_every": -1}, "Expected a non-negative checkpoint cadence, but got -1."),
        ({"checkpoint_every": 2}, "A checkpoint directory is required"),
        ({"workers": 0}, "Expected a positive number of workers, but got 0."),
    ],
    ids=["epochs", "batch size", "loss mode", "cadence", "checkpoint directory", "workers"],
)
def test_train_config_error(kwargs, msg) -> None:
    """Tests for exceptions to the constructor of `TrainConfig`."""
    with pytest.raises(ValueError, match=msg):
        _ = TrainConfig(**kwargs)


def test_train_descends() -> None:
    """Tests that training on a single sample lowers its loss."""
    dataset = Dataset([_sample(seed=0)])
    cfg = TrainConfig(epochs=40, batch_size=1, hyper=AdamHyper(lr=1e-2), augment=False, val_split=None)
    w, history = train(dataset, spec=TINY, cfg=cfg)
    _check_values(
        expression="[r.epoch for r in history]",
        evaluation=[r.epoch for r in history],
        expected=list(range(1, 41)),
    )
    _check_values(expression="history[0].val_loss", evaluation=history[0].val_loss, expected=None)
    assert history[-1].train_loss < history[0].train_loss
    assert _loss(w, list(dataset)) < history[0].train_loss
    assert history[-1].rmse_db > 0


def test_train_determinism() -> None:
    """Tests that a fixed seed gives the same weights and history."""
    dataset = Dataset([_sample(seed=0), _sample(xy=(100.0, 0.0), seed=1), _sample(split="test", map_name="b", seed=2)])
    cfg = TrainConfig(epochs=3, batch_size=2, seed=5)
    w, history = train(dataset, spec=TINY, cfg=cfg)
    w_again, history_again = train(dataset, spec=TINY, cfg=cfg)
    _check_values(expression="same weights", evaluation=w == w_again, expected=True)
    _check_values(expression="same history", evaluation=history == history_again, expected=True)
    assert history[0].val_loss is not None
    w_other, _ = train(dataset, spec=TINY, cfg=TrainConfig(epochs=3, batch_size=2, seed=6))
    _check_values(expression="other seed", evaluation=w == w_other, expected=False)


def test_train_workers() -> None:
    """Tests that computing the gradients of a batch on several threads leaves the training unchanged."""
    empty = _sample(xy=(200.0, 0.0), seed=3, mask=np.zeros((8, 8), dtype=bool))
    dataset = Dataset(
        [_sample(seed=0), _sample(xy=(100.0, 0.0), seed=1), empty, _sample(split="test", map_name="b", seed=2)]
    )
    w, history = train(dataset, spec=TINY, cfg=TrainConfig(epochs=3, batch_size=3, seed=5))
    w_threads, history_threads = train(dataset, spec=TINY, cfg=TrainConfig(epochs=3, batch_size=3, seed=5, workers=3))
    _check_values(expression="same weights", evaluation=w == w_threads, expected=True)
    _check_values(expression="same history", evaluation=history == history_threads, expected=True)


def test_train_checkpoints(tmp_path) -> None:
    """Tests that checkpoints are written at the requested cadence."""
    cfg = TrainConfig(epochs=4, batch_size=1, checkpoint_every=2, checkpoint_dir=str(tmp_path / "ckpt"), val_split=None)
    _ = train(Dataset([_sample()]), spec=TINY, cfg=cfg)
    _check_values(
        expression="checkpoints",
        evaluation=sorted(path.name for path in (tmp_path / "ckpt").iterdir()),
        expected=["epoch_0002.plw", "epoch_0004.plw"],
    )


def test_train_skips_samples_without_valid_pixels(caplog) -> None:
    """Tests that a sample with an empty mask is skipped with a warning."""
    empty = _sample(xy=(100.0, 0.0), seed=1, mask=np.zeros((8, 8), dtype=bool))
    dataset = Dataset([_sample(seed=0), empty])
    cfg = TrainConfig(epochs=1, batch_size=1, val_split=None, augment=False)
    with caplog.at_level(logging.WARNING, logger="propnet.harness.training"):
        _, history = train(dataset, spec=TINY, cfg=cfg)
    assert "without valid pixels" in caplog.text
    _check_values(expression="len(history)", evaluation=len(history), expected=1)

    with pytest.raises(NoValidPixels, match="Expected at least one training sample with a valid pixel."):
        _ = train(Dataset([empty]), spec=TINY, cfg=cfg)


def test_train_error() -> None:
    """Tests for exceptions to the method `train()`."""
    with pytest.raises(EmptySplit, match="Expected a non-empty `train` split to train on."):
        _ = train(Dataset([_sample(split="test")]), spec=TINY, cfg=TrainConfig(epochs=1))
    with pytest.raises(NonDivisibleSize, match="divisible by 4, but got 10x10."):
        _ = train(Dataset([_sample(size=10)]), spec=TINY, cfg=TrainConfig(epochs=1))


def test_finetune() -> None:
    """Tests for the method `finetune()`."""
    w, _ = train(Dataset([_sample(seed=0)]), spec=TINY, cfg=TrainConfig(epochs=2, batch_size=1, val_split=None))
    calibration = [_sample(split="calibrate", seed=seed) for seed in (3, 4)]
    before = w.params["head.kernel"].copy()

    _check_values(
        expression="finetune(epochs=0) is w",
        evaluation=finetune(w, calibration, epochs=0) is w,
        expected=True,
    )
    tuned = finetune(w, calibration)
    np.testing.assert_array_equal(w.params["head.kernel"], before)
    _check_values(expression="tuned == w", evaluation=tuned == w, expected=False)
    _check_values(expression="determinism", evaluation=tuned == finetune(w, calibration), expected=True)
    assert _loss(tuned, calibration) <= _loss(w, calibration) + 1e-6

    with pytest.raises(EmptySplit, match="Expected at least one calibration sample to fine-tune on."):
        _ = finetune(w, [])
    with pytest.raises(ValueError, match="Expected a non-negative number of epochs, but got -1."):
        _ = finetune(w, calibration, epochs=-1)


def test_write_history(tmp_path) -> None:
    """Tests for the method `write_history()`."""
    path = tmp_path / "history.csv"
    write_history(
        [
            EpochRecord(epoch=1, train_loss=12.5, val_loss=None, rmse_db=14.0),
            EpochRecord(epoch=2, train_loss=10.25, val_loss=11.0, rmse_db=13.5),
        ],
        path,
    )
    _check_values(
        expression="history.csv",
        evaluation=path.read_text().splitlines(),
        expected=[
            "epoch,train_loss,val_loss,rmse_db",
            "1,12.500000,,14.000000",
            "2,10.250000,11.000000,13.500000",
        ],
    )
