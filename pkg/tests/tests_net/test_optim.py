import numpy as np
import pytest

from tests.test_utils import _check_values
from propnet.exceptions import ShapeMismatch
from propnet.net.model import ArchSpec, init_weights
from propnet.net.optim import AdamHyper, adam_step, init_optimizer

TINY = ArchSpec(base_channels=2, depth=1)


def test_init_optimizer() -> None:
    """Tests for the method `init_optimizer()`."""
    w = init_weights(TINY, seed=0)
    state = init_optimizer(w, hyper=AdamHyper(lr=0.01))
    _check_values(expression="state.step", evaluation=state.step, expected=0)
    _check_values(expression="state.hyper.lr", evaluation=state.hyper.lr, expected=0.01)
    _check_values(expression="list(state.m)", evaluation=list(state.m), expected=list(w))
    for name in w:
        np.testing.assert_array_equal(state.m[name], 0.0)
        np.testing.assert_array_equal(state.v[name], 0.0)


def test_adam_step_zero_gradient() -> None:
    """Tests that a zero gradient leaves the weights unchanged."""
    w = init_weights(TINY, seed=0)
    state = init_optimizer(w)
    grads = {name: np.zeros_like(w[name]) for name in w}
    for _ in range(3):
        w_next, state = adam_step(w, grads, state)
        _check_values(expression="adam_step(w, 0) == w", evaluation=w_next == w, expected=True)
    _check_values(expression="state.step", evaluation=state.step, expected=3)


def test_adam_step_constant_gradient() -> None:
    """Tests that under a constant gradient every step moves a parameter by ``lr * sign(g)``."""
    w = init_weights(TINY, seed=0).astype(np.float64)
    hyper = AdamHyper(lr=1e-3)
    state = init_optimizer(w, hyper=hyper)
    grads = {name: np.where(np.arange(w[name].size).reshape(w[name].shape) % 2, 0.5, -2.0) for name in w}
    for step in range(1, 51):
        w_next, state = adam_step(w, grads, state)
        _check_values(expression="state.step", evaluation=state.step, expected=step)
        for name in w:
            np.testing.assert_allclose(w_next[name] - w[name], -hyper.lr * np.sign(grads[name]), rtol=1e-6)
        w = w_next


def test_adam_step_does_not_modify_its_inputs() -> None:
    """Tests that `adam_step()` returns new weights and a new state."""
    w = init_weights(TINY, seed=0)
    state = init_optimizer(w)
    before = {name: w[name].copy() for name in w}
    grads = {name: np.ones_like(w[name]) for name in w}
    _, new_state = adam_step(w, grads, state)
    for name in w:
        np.testing.assert_array_equal(w[name], before[name])
        np.testing.assert_array_equal(state.m[name], 0.0)
        np.testing.assert_allclose(new_state.m[name], 0.1)
    _check_values(expression="state.step", evaluation=state.step, expected=0)


def test_adam_step_hyper_override() -> None:
    """Tests that the given hyperparameters override those of the state."""
    w = init_weights(TINY, seed=0).astype(np.float64)
    state = init_optimizer(w, hyper=AdamHyper(lr=1e-3))
    grads = {name: np.ones_like(w[name]) for name in w}
    w_next, new_state = adam_step(w, grads, state, hyper=AdamHyper(lr=1e-3).scaled(0.1))
    np.testing.assert_allclose(w_next["head.bias"] - w["head.bias"], -1e-4, rtol=1e-6)
    assert new_state.hyper.lr == pytest.approx(1e-4)


def test_adam_step_error() -> None:
    """Tests for exceptions to the method `adam_step()`."""
    w = init_weights(TINY, seed=0)
    grads = {name: np.zeros_like(w[name]) for name in w}
    with pytest.raises(ShapeMismatch, match="Expected a gradient and moments of shape"):
        _ = adam_step(w, {**grads, "head.bias": np.zeros(2)}, init_optimizer(w))
    with pytest.raises(ShapeMismatch, match="for `head.bias`"):
        _ = adam_step(w, {name: value for name, value in grads.items() if name != "head.bias"}, init_optimizer(w))


@pytest.mark.parametrize(
    argnames="kwargs, msg",
    argvalues=[
        ({"lr": -1.0}, "The parameter `lr` must be non-negative, but got -1.0."),
        ({"beta1": 1.0}, r"The parameter `beta1` must lie in \[0, 1\), but got 1.0."),
        ({"beta2": -0.1}, r"The parameter `beta2` must lie in \[0, 1\), but got -0.1."),
        ({"eps": 0.0}, "The parameter `eps` must be strictly positive, but got 0.0."),
    ],
    ids=["lr", "beta1", "beta2", "eps"],
)
def test_adam_hyper_error(kwargs, msg) -> None:
    """Tests for exceptions to the constructor of `AdamHyper`."""
    with pytest.raises(ValueError, match=msg):
        _ = AdamHyper(**kwargs)
