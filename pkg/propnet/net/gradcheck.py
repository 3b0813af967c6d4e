import logging
from typing import Any, Dict, List, Tuple, Optional
from collections import OrderedDict

import numpy as np

from propnet._utils import _rng
from propnet.net.loss import masked_loss
from propnet.net.model import ArchSpec, ModelWeights, init_weights, plnet_forward, plnet_backward

__all__ = ["grad_check"]

logger = logging.getLogger(__name__)

GRAD_CHECK_SPEC = ArchSpec(base_channels=4, depth=2)
MIN_CHECKED_PARAMETERS: int = 200
# denominator floor of the relative error
RELATIVE_ERROR_FLOOR: float = 1e-3
# smallest distance, in dB, between prediction and truth in MAE mode
MAE_MARGIN_DB: float = 0.5


def _loss_and_pattern(
    w: ModelWeights, x: np.ndarray, truth: np.ndarray, mask: np.ndarray, mode: str
) -> Tuple[float, List[np.ndarray], Any, Dict[str, Any]]:
    """Private method returning the loss, the activation pattern and the loss report of the network."""
    prediction, cache = plnet_forward(w, x, cache=True)
    report = masked_loss(prediction.values, truth, mask, mode=mode)
    pattern = [cache[name] > 0 for name in sorted(cache) if name.endswith(".z")]
    pattern.append(np.sign(prediction.values - truth)[mask])
    return report.value, pattern, report, cache


def grad_check(
    spec: Optional[ArchSpec] = None,
    seed: int = 0,
    eps: float = 1e-5,
    mode: str = "MSE",
    size: int = 16,
    n_params: int = MIN_CHECKED_PARAMETERS,
) -> float:
    """Compare the backpropagated gradient of the masked loss with central finite differences.

    The check runs in double precision on random weights and biases, a random input, a random mask and a truth
    that differs from the prediction by at least 0.5 dB at every pixel. Parameters are drawn at random until
    `n_params` of them are checked; a parameter is skipped when its perturbation flips a relu or the sign of an
    error, since the loss is not differentiable there.

    :param spec: The architecture, a tiny one if omitted.
    :type spec: Optional[ArchSpec]
    :param seed: Seed of the PCG64 generator.
    :type seed: int
    :param eps: Perturbation of the central differences.
    :type eps: float
    :param mode: Either ``MAE`` or ``MSE``.
    :type mode: str
    :param size: Height and width of the input.
    :type size: int
    :param n_params: Number of parameters to check.
    :type n_params: int

    :return: The largest relative error ``|a - n| / max(|a|, |n|, 1e-3)``.
    :rtype: float
    """
    spec = spec or GRAD_CHECK_SPEC
    rng = _rng(seed)
    weights = init_weights(spec, seed=seed).astype(np.float64)
    params = OrderedDict(
        (name, value + 0.1 * rng.standard_normal(value.shape) if name.endswith(".bias") else value)
        for name, value in weights.params.items()
    )
    weights = weights.with_params(params)

    x = rng.standard_normal((spec.in_channels, size, size))
    base = plnet_forward(weights, x).values
    offset = rng.uniform(MAE_MARGIN_DB, 2.0, base.shape) * rng.choice([-1.0, 1.0], base.shape)
    truth = base + offset
    mask = rng.random(base.shape) < 0.5
    mask.flat[int(rng.integers(mask.size))] = True

    _, pattern, report, cache = _loss_and_pattern(weights, x, truth, mask, mode)
    analytic = plnet_backward(weights, cache, report.gradient)

    names = list(params)
    sizes = np.array([params[name].size for name in names])
    order = rng.permutation(int(sizes.sum()))
    bounds = np.cumsum(sizes)

    worst, checked, skipped = 0.0, 0, 0
    for flat in order:
        if checked >= n_params:
            break
        layer = int(np.searchsorted(bounds, flat, side="right"))
        name, index = names[layer], int(flat - (bounds[layer] - sizes[layer]))
        losses = []
        for sign in (1.0, -1.0):
            perturbed = OrderedDict((key, value.copy()) for key, value in params.items())
            perturbed[name].flat[index] += sign * eps
            loss, perturbed_pattern, _, _ = _loss_and_pattern(weights.with_params(perturbed), x, truth, mask, mode)
            if any(not np.array_equal(a, b) for a, b in zip(pattern, perturbed_pattern)):
                break
            losses.append(loss)
        if len(losses) < 2:
            skipped += 1
            continue
        numeric = (losses[0] - losses[1]) / (2.0 * eps)
        value = float(analytic[name].flat[index])
        worst = max(worst, abs(value - numeric) / max(abs(value), abs(numeric), RELATIVE_ERROR_FLOOR))
        checked += 1
    logger.info("gradient check: %d parameters checked, %d skipped, max relative error %.3g", checked, skipped, worst)
    return worst
