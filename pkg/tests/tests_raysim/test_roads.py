from collections import deque

import numpy as np
import pytest

from propnet import road_mask
from tests.test_utils import _check_values


def _is_connected(mask: np.ndarray) -> bool:
    """Return whether the true pixels of `mask` form one 4-connected component."""
    pixels = list(zip(*np.nonzero(mask)))
    seen, queue = {pixels[0]}, deque([pixels[0]])
    while queue:
        row, col = queue.popleft()
        for neighbour in ((row - 1, col), (row + 1, col), (row, col - 1), (row, col + 1)):
            if neighbour not in seen and 0 <= neighbour[0] < mask.shape[0] and 0 <= neighbour[1] < mask.shape[1]:
                if mask[neighbour]:
                    seen.add(neighbour)
                    queue.append(neighbour)
    return len(seen) == len(pixels)


@pytest.mark.parametrize(argnames="seed", argvalues=[0, 1, 7, 42, 2024], ids=lambda seed: f"seed={seed}")
def test_road_mask_coverage(seed) -> None:
    """Tests that the method `road_mask()` reaches the coverage target with one connected road network."""
    mask = road_mask(W=64, H=64, seed=seed, coverage_target=0.075)
    _check_values(expression="mask.shape", evaluation=mask.shape, expected=(64, 64))
    _check_values(expression="mask.dtype", evaluation=mask.dtype, expected=np.dtype(bool))
    assert 0.06 <= mask.mean() <= 0.09
    assert _is_connected(mask)


def test_road_mask_non_square() -> None:
    """Tests for the method `road_mask()` on a non-square image."""
    mask = road_mask(W=48, H=20, seed=5, coverage_target=0.1)
    _check_values(expression="mask.shape", evaluation=mask.shape, expected=(20, 48))
    _check_values(expression="mask.sum()", evaluation=int(mask.sum()), expected=96)


def test_road_mask_is_deterministic() -> None:
    """Tests that the same seed gives the same mask, and another seed another mask."""
    first = road_mask(W=32, H=32, seed=9)
    np.testing.assert_array_equal(first, road_mask(W=32, H=32, seed=9))
    assert not np.array_equal(first, road_mask(W=32, H=32, seed=10))


def test_road_mask_half_coverage() -> None:
    """Tests that a coverage target of 0.5 never validates more than half of the pixels."""
    mask = road_mask(W=64, H=64, seed=3, coverage_target=0.5)
    assert 0.4 <= mask.mean() <= 0.5


@pytest.mark.parametrize(argnames="coverage_target", argvalues=[0.0, 0.005, 0.6], ids=["0", "0.005", "0.6"])
def test_road_mask_error(coverage_target) -> None:
    """Tests for exceptions to the method `road_mask()`."""
    with pytest.raises(ValueError, match=r"Expected a coverage target in \[0.01, 0.5\]"):
        _ = road_mask(W=16, H=16, seed=0, coverage_target=coverage_target)
