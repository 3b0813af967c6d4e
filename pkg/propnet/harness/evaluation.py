from typing import List, Union, Sequence

import numpy as np

from propnet.exceptions import EmptySplit, NoValidPixels, ShapeMismatch
from propnet.net.model import ModelWeights, plnet_forward
from propnet.raysim.matrix import PathLossMatrix
from propnet.harness.dataset import Dataset, PathLossSample

__all__ = ["pooled_rmse", "evaluate_rmse", "predict"]


def pooled_rmse(
    predictions: Sequence[Union[PathLossMatrix, np.ndarray]], labels: Sequence[PathLossMatrix]
) -> float:
    """Return the root-mean-square error over the valid pixels of all the labels.

    Every valid pixel weighs the same, whatever the number of valid pixels of its sample. Only the masks of the
    labels matter; the predictions are taken at face value.

    :param predictions: The predicted path losses, one per label.
    :type predictions: Sequence[Union[PathLossMatrix, np.ndarray]]
    :param labels: The ground truth.
    :type labels: Sequence[PathLossMatrix]

    :return: The pooled RMSE in dB.
    :rtype: float

    :raises EmptySplit: If there is no label.
    :raises ShapeMismatch: If the numbers or the shapes of predictions and labels differ.
    :raises NoValidPixels: If no label has a valid pixel.

    :example:
        >>> import numpy as np
        >>> from propnet import PathLossMatrix, pooled_rmse
        ...
        >>> truth = PathLossMatrix(values=np.full((2, 2), 100.0))
        >>> pooled_rmse([np.full((2, 2), 103.0)], [truth])
        3.0
    """
    if len(labels) == 0:
        raise EmptySplit("Expected at least one sample to evaluate.")
    if len(predictions) != len(labels):
        raise ShapeMismatch(f"Expected {len(labels)} predictions, but got {len(predictions)}.")
    squared, count = 0.0, 0
    for prediction, label in zip(predictions, labels):
        values = prediction.values if isinstance(prediction, PathLossMatrix) else np.asarray(prediction, dtype=float)
        if values.shape != label.shape:
            raise ShapeMismatch(f"Expected a prediction of shape {label.shape}, but got {values.shape}.")
        errors = (values - label.values)[label.mask]
        squared += float(np.sum(errors**2))
        count += int(label.mask.sum())
    if count == 0:
        raise NoValidPixels("Expected at least one valid pixel among the labels.")
    return float(np.sqrt(squared / count))


def predict(w: ModelWeights, samples: Union[Dataset, Sequence[PathLossSample]]) -> List[PathLossMatrix]:
    """Return the path loss predicted by the network for every sample."""
    return [plnet_forward(w, sample.input) for sample in samples]


def evaluate_rmse(w: ModelWeights, samples: Union[Dataset, Sequence[PathLossSample]]) -> float:
    """Return the pooled RMSE of the network over the valid pixels of the given samples.

    :param w: The weights.
    :type w: ModelWeights
    :param samples: The samples, usually one split of a dataset.
    :type samples: Union[Dataset, Sequence[PathLossSample]]

    :return: The RMSE in dB.
    :rtype: float

    :raises EmptySplit: If there is no sample.
    """
    samples = list(samples)
    if len(samples) == 0:
        raise EmptySplit("Expected at least one sample to evaluate.")
    return pooled_rmse(predict(w, samples), [sample.label for sample in samples])
