from dataclasses import dataclass

import numpy as np

from propnet.exceptions import ShapeMismatch, NoValidPixels

__all__ = ["LossReport", "masked_loss"]

_SUPPORTED_MODES = ("MAE", "MSE")


@dataclass(frozen=True)
class LossReport:
    """Value and gradient of the masked loss.

    :param value: The loss.
    :param mode: Either ``MAE`` or ``MSE``.
    :param valid_pixel_count: Number of pixels entering the loss.
    :param gradient: Gradient of the loss with respect to the prediction, 0 at every invalid pixel.
    """

    value: float
    mode: str
    valid_pixel_count: int
    gradient: np.ndarray


def masked_loss(pred: np.ndarray, truth: np.ndarray, mask: np.ndarray, mode: str = "MAE") -> LossReport:
    """Return the mean absolute (or squared) error over the valid pixels, with its gradient.

    The arrays have shape (H, W) or (N, H, W); in the latter case the loss is pooled over the valid pixels of all
    samples. Invalid pixels contribute neither to the loss nor to the gradient, whatever their values.

    :param pred: The prediction.
    :type pred: np.ndarray
    :param truth: The ground truth.
    :type truth: np.ndarray
    :param mask: The validity mask.
    :type mask: np.ndarray
    :param mode: Either ``MAE`` or ``MSE``.
    :type mode: str

    :return: The loss report.
    :rtype: LossReport

    :raises ShapeMismatch: If the three arrays do not share the same shape.
    :raises NoValidPixels: If no pixel is valid.

    :example:
        >>> import numpy as np
        >>> from propnet import masked_loss
        ...
        >>> report = masked_loss(np.array([[3.0, 9.0]]), np.array([[1.0, 0.0]]), np.array([[True, False]]))
        >>> report.value, report.gradient.tolist()
        (2.0, [[1.0, 0.0]])
    """
    if mode not in _SUPPORTED_MODES:
        raise ValueError(f"The given mode ({mode}) is not supported. Supported modes are {_SUPPORTED_MODES}.")
    pred, truth, mask = np.asarray(pred), np.asarray(truth), np.asarray(mask, dtype=bool)
    if not (pred.shape == truth.shape == mask.shape):
        raise ShapeMismatch(f"Expected equal shapes, but got {pred.shape}, {truth.shape} and {mask.shape}.")
    count = int(mask.sum())
    if count == 0:
        raise NoValidPixels("Expected at least one valid pixel.")
    diff = np.where(mask, pred - truth, 0)
    if mode == "MAE":
        value = np.abs(diff).sum() / count
        gradient = np.sign(diff) / count
    else:
        value = (diff**2).sum() / count
        gradient = 2.0 * diff / count
    return LossReport(value=float(value), mode=mode, valid_pixel_count=count, gradient=gradient)
