from typing import Dict, Tuple, Optional
from dataclasses import field, dataclass
from collections import OrderedDict

import numpy as np

from propnet.exceptions import ShapeMismatch
from propnet.net.model import ModelWeights

__all__ = ["AdamHyper", "OptimizerState", "init_optimizer", "adam_step"]


@dataclass(frozen=True)
class AdamHyper:
    """Hyperparameters of the Adam optimizer."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self) -> None:
        if not self.lr >= 0:
            raise ValueError(f"The parameter `lr` must be non-negative, but got {self.lr}.")
        for name in ("beta1", "beta2"):
            if not 0 <= getattr(self, name) < 1:
                raise ValueError(f"The parameter `{name}` must lie in [0, 1), but got {getattr(self, name)}.")
        if not self.eps > 0:
            raise ValueError(f"The parameter `eps` must be strictly positive, but got {self.eps}.")

    def scaled(self, factor: float) -> "AdamHyper":
        """Return the hyperparameters with the learning rate multiplied by `factor`."""
        return AdamHyper(lr=self.lr * factor, beta1=self.beta1, beta2=self.beta2, eps=self.eps)


@dataclass(frozen=True)
class OptimizerState:
    """First and second moment estimates of every parameter, and the number of steps taken."""

    m: Dict[str, np.ndarray]
    v: Dict[str, np.ndarray]
    step: int = 0
    hyper: AdamHyper = field(default_factory=AdamHyper)


def init_optimizer(w: ModelWeights, hyper: Optional[AdamHyper] = None) -> OptimizerState:
    """Return the optimizer state before the first step: zero moments, step 0."""
    zeros = OrderedDict((name, np.zeros_like(w[name])) for name in w)
    return OptimizerState(
        m=zeros,
        v=OrderedDict((name, value.copy()) for name, value in zeros.items()),
        hyper=hyper or AdamHyper(),
    )


def adam_step(
    w: ModelWeights,
    grads: Dict[str, np.ndarray],
    state: OptimizerState,
    hyper: Optional[AdamHyper] = None,
) -> Tuple[ModelWeights, OptimizerState]:
    """Take one Adam step, with bias-corrected moment estimates.

    Neither `w` nor `state` is modified.

    :param w: The current weights.
    :type w: ModelWeights
    :param grads: The gradient of every parameter.
    :type grads: Dict[str, np.ndarray]
    :param state: The current optimizer state.
    :type state: OptimizerState
    :param hyper: Hyperparameters overriding those of the state.
    :type hyper: Optional[AdamHyper]

    :return: The updated weights and state.
    :rtype: Tuple[ModelWeights, OptimizerState]

    :raises ShapeMismatch: If a gradient or a moment does not match its parameter.
    """
    hyper = hyper or state.hyper
    step = state.step + 1
    params, m, v = OrderedDict(), OrderedDict(), OrderedDict()
    for name in w:
        value, grad = w[name], grads.get(name)
        if grad is None or np.shape(grad) != value.shape or state.m[name].shape != value.shape:
            raise ShapeMismatch(f"Expected a gradient and moments of shape {value.shape} for `{name}`.")
        m[name] = hyper.beta1 * state.m[name] + (1.0 - hyper.beta1) * grad
        v[name] = hyper.beta2 * state.v[name] + (1.0 - hyper.beta2) * grad**2
        m_hat = m[name] / (1.0 - hyper.beta1**step)
        v_hat = v[name] / (1.0 - hyper.beta2**step)
        params[name] = (value - hyper.lr * m_hat / (np.sqrt(v_hat) + hyper.eps)).astype(value.dtype)
    return w.with_params(params), OptimizerState(m=m, v=v, step=step, hyper=hyper)
